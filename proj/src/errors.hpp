#pragma once

#include <stdexcept>
#include <string>

namespace cyclereg {

// Error categories shared between the C++ core and the C API.
// Values are part of the public ABI (see include/cyclereg.h).
enum class ErrorCode : int {
    Ok = 0,
    DegenerateAxis = 1,
    DegenerateClosure = 2,
    DegenerateEquation = 3,
    DegeneratePolynomial = 4,
    RankDeficient = 5,
    ResolverFallback = 6,
    DegenerateConfiguration = 7,
    InsufficientMatches = 8,
    NoValidSample = 9,
    Disconnected = 10,
    UnderDetermined = 11,
    InvalidArgument = 12,
    ParseError = 13,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

}  // namespace cyclereg
