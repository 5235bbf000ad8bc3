#pragma once

#include <vector>

#include "polysolve.hpp"

namespace cyclereg {

// Polynomial in (cos t_0, sin t_0, ..., cos t_{n-1}, sin t_{n-1}) that is
// multilinear per angle: each slot carries basis {1, cos, sin}. Closure
// constraints of transform chains have exactly this shape because every
// angle enters through a single z-rotation factor.
class TrigPoly {
public:
    explicit TrigPoly(int slots);
    static TrigPoly constant(int slots, double value);

    int slots() const { return slots_; }

    TrigPoly& operator+=(const TrigPoly& other);
    TrigPoly& operator-=(const TrigPoly& other);
    TrigPoly& operator*=(double k);
    friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
    friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
    friend TrigPoly operator*(TrigPoly a, double k) { return a *= k; }

    bool depends_on(int slot) const;

    // Multiplication by cos/sin of a slot the polynomial does not yet use.
    TrigPoly mul_cos(int slot) const;
    TrigPoly mul_sin(int slot) const;

    double eval(const std::vector<double>& angles) const;
    // same contraction with precomputed cos/sin per slot
    double eval_cs(const double* cosv, const double* sinv) const;
    TrigPoly derivative(int slot) const;

    // Substitutes numeric (cos, sin) for one slot; the slot drops to
    // degree 0 but keeps its index so angle vectors stay aligned.
    TrigPoly fix(int slot, double angle) const;
    TrigPoly fix_cs(int slot, double c, double s) const;

    // a1*cos + a2*sin + a3 in `slot`; every other slot must be degree 0.
    TrigLinearEq linear_in(int slot) const;

    double max_abs_coeff() const;

    // Half-angle forms (t_j = tan(theta_j/2), denominators cleared); slots
    // not listed must be degree 0.
    BivariatePoly to_bivariate(int slot_u, int slot_v) const;
    TrivariatePoly to_trivariate(int slot_x, int slot_u, int slot_v) const;

private:
    int slots_;
    std::vector<double> c_;  // 3^slots coefficients, digit k = slot k basis

    int stride(int slot) const;
};

}  // namespace cyclereg
