#include "trig_poly.hpp"

#include <cassert>
#include <cmath>

namespace cyclereg {

namespace {
int pow3(int n) {
    int p = 1;
    while (n-- > 0) p *= 3;
    return p;
}
}  // namespace

TrigPoly::TrigPoly(int slots) : slots_(slots), c_(pow3(slots), 0.0) {
    assert(slots >= 0 && slots <= 4);
}

TrigPoly TrigPoly::constant(int slots, double value) {
    TrigPoly p(slots);
    p.c_[0] = value;
    return p;
}

int TrigPoly::stride(int slot) const { return pow3(slot); }

TrigPoly& TrigPoly::operator+=(const TrigPoly& other) {
    assert(slots_ == other.slots_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += other.c_[i];
    return *this;
}

TrigPoly& TrigPoly::operator-=(const TrigPoly& other) {
    assert(slots_ == other.slots_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= other.c_[i];
    return *this;
}

TrigPoly& TrigPoly::operator*=(double k) {
    for (double& v : c_) v *= k;
    return *this;
}

bool TrigPoly::depends_on(int slot) const {
    const int st = stride(slot);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if ((static_cast<int>(i) / st) % 3 != 0 && c_[i] != 0.0) return true;
    }
    return false;
}

TrigPoly TrigPoly::mul_cos(int slot) const {
    assert(!depends_on(slot));
    TrigPoly out(slots_);
    const int st = stride(slot);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        out.c_[i + st] = c_[i];
    }
    return out;
}

TrigPoly TrigPoly::mul_sin(int slot) const {
    assert(!depends_on(slot));
    TrigPoly out(slots_);
    const int st = stride(slot);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        out.c_[i + 2 * st] = c_[i];
    }
    return out;
}

double TrigPoly::eval(const std::vector<double>& angles) const {
    assert(static_cast<int>(angles.size()) == slots_);
    double cosv[4], sinv[4];
    for (int s = 0; s < slots_; ++s) {
        cosv[s] = std::cos(angles[s]);
        sinv[s] = std::sin(angles[s]);
    }
    return eval_cs(cosv, sinv);
}

double TrigPoly::eval_cs(const double* cosv, const double* sinv) const {
    // contract slot by slot, highest slot first (largest stride)
    double buf[81];
    std::copy(c_.begin(), c_.end(), buf);
    int len = static_cast<int>(c_.size());
    for (int slot = slots_ - 1; slot >= 0; --slot) {
        const int st = len / 3;
        const double cv = cosv[slot];
        const double sv = sinv[slot];
        for (int i = 0; i < st; ++i)
            buf[i] = buf[i] + cv * buf[i + st] + sv * buf[i + 2 * st];
        len = st;
    }
    return buf[0];
}

TrigPoly TrigPoly::derivative(int slot) const {
    TrigPoly out(slots_);
    const int st = stride(slot);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const int digit = (static_cast<int>(i) / st) % 3;
        if (digit == 1) out.c_[i + st] -= c_[i];       // d(cos) = -sin
        else if (digit == 2) out.c_[i - st] += c_[i];  // d(sin) = +cos
    }
    return out;
}

TrigPoly TrigPoly::fix_cs(int slot, double c, double s) const {
    TrigPoly out(slots_);
    const int st = stride(slot);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const int digit = (static_cast<int>(i) / st) % 3;
        const std::size_t base = i - digit * st;
        if (digit == 0) out.c_[base] += c_[i];
        else if (digit == 1) out.c_[base] += c_[i] * c;
        else out.c_[base] += c_[i] * s;
    }
    return out;
}

TrigPoly TrigPoly::fix(int slot, double angle) const {
    return fix_cs(slot, std::cos(angle), std::sin(angle));
}

TrigLinearEq TrigPoly::linear_in(int slot) const {
    const int st = stride(slot);
    TrigLinearEq eq;
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const int digit = (static_cast<int>(i) / st) % 3;
        assert(i == static_cast<std::size_t>(digit * st) &&
               "linear_in: other slots must be fixed first");
        if (digit == 0) eq.a3 += c_[i];
        else if (digit == 1) eq.a1 += c_[i];
        else eq.a2 += c_[i];
    }
    return eq;
}

double TrigPoly::max_abs_coeff() const {
    double m = 0.0;
    for (double v : c_) m = std::max(m, std::abs(v));
    return m;
}

namespace {
// basis {1, cos, sin} as quadratics in t after clearing (1 + t^2)
const double kHalfAngleMap[3][3] = {
    {1.0, 0.0, 1.0},   // 1        -> 1 + t^2
    {1.0, 0.0, -1.0},  // cos      -> 1 - t^2
    {0.0, 2.0, 0.0},   // sin      -> 2t
};
}  // namespace

BivariatePoly TrigPoly::to_bivariate(int slot_u, int slot_v) const {
    BivariatePoly out;
    out.coeffs = Eigen::MatrixXd::Zero(3, 3);
    const int su = stride(slot_u);
    const int sv = stride(slot_v);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const int du = (static_cast<int>(i) / su) % 3;
        const int dv = (static_cast<int>(i) / sv) % 3;
        assert(i == static_cast<std::size_t>(du * su + dv * sv) &&
               "to_bivariate: other slots must be fixed first");
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                out.coeffs(a, b) +=
                    c_[i] * kHalfAngleMap[du][a] * kHalfAngleMap[dv][b];
    }
    return out;
}

TrivariatePoly TrigPoly::to_trivariate(int slot_x, int slot_u,
                                       int slot_v) const {
    TrivariatePoly out;
    out.coeff_x.resize(3);
    for (auto& c : out.coeff_x) c.coeffs = Eigen::MatrixXd::Zero(3, 3);
    const int sx = stride(slot_x);
    const int su = stride(slot_u);
    const int sv = stride(slot_v);
    for (std::size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0.0) continue;
        const int dx = (static_cast<int>(i) / sx) % 3;
        const int du = (static_cast<int>(i) / su) % 3;
        const int dv = (static_cast<int>(i) / sv) % 3;
        assert(i == static_cast<std::size_t>(dx * sx + du * su + dv * sv) &&
               "to_trivariate: other slots must be fixed first");
        for (int x = 0; x < 3; ++x) {
            if (kHalfAngleMap[dx][x] == 0.0) continue;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    out.coeff_x[x].coeffs(a, b) += c_[i] * kHalfAngleMap[dx][x] *
                                                   kHalfAngleMap[du][a] *
                                                   kHalfAngleMap[dv][b];
        }
    }
    return out;
}

}  // namespace cyclereg
