#pragma once

#include <Eigen/Core>
#include <functional>
#include <vector>

#include "errors.hpp"

namespace cyclereg {

// a1*cos(theta) + a2*sin(theta) + a3 = 0
struct TrigLinearEq {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0;
};

struct SinCosPair {
    double c = 1.0, s = 0.0;
    double angle() const { return std::atan2(s, c); }
};

// Intersects the line a1*c + a2*s + a3 = 0 with the unit circle. Returns 0,
// 1 (tangency) or 2 pairs. Throws DegenerateEquation when a1 and a2 both
// vanish (no solution if a3 != 0, identically satisfied otherwise).
std::vector<SinCosPair> solve_trig_linear(const TrigLinearEq& eq,
                                          double tol = 1e-12);

// Weierstrass substitution t = tan(theta/2). encode returns +inf at
// theta = pi; decode(+-inf) = (-1, 0).
double half_angle_encode(double theta);
SinCosPair half_angle_decode(double t);

// Coefficients ascending by degree.
struct UnivariatePoly {
    std::vector<double> coeffs;

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    double eval(double x) const;
    UnivariatePoly derivative() const;
    double max_abs_coeff() const;
    // drops leading coefficients below rel_tol * max |coeff|
    void trim(double rel_tol = 1e-12);
    void normalize();  // scale so max |coeff| == 1
};

struct RootOptions {
    double imag_tol = 1e-6;      // |imag| <= imag_tol * (1 + |real|)
    double residual_tol = 1e-6;  // relative backward-error acceptance
};

// All real roots via eigenvalues of the companion matrix of the monic
// normalization, each polished with one Newton step. Throws
// DegeneratePolynomial when every coefficient vanishes.
std::vector<double> univariate_real_roots(const UnivariatePoly& p,
                                          const RootOptions& opts = {});

// coeff(i, j) multiplies u^i v^j
struct BivariatePoly {
    Eigen::MatrixXd coeffs;

    int degree_u() const { return static_cast<int>(coeffs.rows()) - 1; }
    int degree_v() const { return static_cast<int>(coeffs.cols()) - 1; }
    double eval(double u, double v) const;
    double max_abs_coeff() const { return coeffs.cwiseAbs().maxCoeff(); }
    void normalize();
    // drops trailing rows/columns below rel_tol * max |coeff|
    void trim(double rel_tol = 1e-11);
    // Coefficients of v^j as polynomials in u (ascending), and vice versa.
    std::vector<std::vector<double>> coeff_lists_in_v() const;
    std::vector<std::vector<double>> coeff_lists_in_u() const;
};

BivariatePoly multiply(const BivariatePoly& a, const BivariatePoly& b);
BivariatePoly add_scaled(const BivariatePoly& a, double ka,
                         const BivariatePoly& b, double kb);

// p(x, v, w) stored as coefficients of x^k, each a BivariatePoly in (v, w).
struct TrivariatePoly {
    std::vector<BivariatePoly> coeff_x;

    int degree_x() const { return static_cast<int>(coeff_x.size()) - 1; }
    double eval(double x, double v, double w) const;
    double max_abs_coeff() const;
    void normalize();
};

enum class Var { U, V };

// Resultant eliminating one variable, computed by evaluating the Sylvester
// determinant at Chebyshev sample points of the surviving variable(s) and
// interpolating. Throws RankDeficient when the determinant vanishes at every
// sample (shared factor).
UnivariatePoly sylvester_resultant(const BivariatePoly& p,
                                   const BivariatePoly& q, Var eliminate);
BivariatePoly sylvester_resultant(const TrivariatePoly& p,
                                  const TrivariatePoly& q);

// sum_k coeffs[k] * s^k * c^(bound - k); equals the polynomial value times
// cos^bound(theta/2) when s = sin(theta/2), c = cos(theta/2). Stays finite
// through theta = pi, where t = tan(theta/2) does not.
double eval_homogeneous(const std::vector<double>& coeffs, int bound, double s,
                        double c);

struct CircleRootOptions {
    double zero_rel_tol = 1e-11;  // identically-zero detection
    double dip_rel_tol = 1e-7;    // local |f| minima treated as double roots
    int newton_iters = 40;
};

// All theta in (-pi, pi] where f vanishes; f must be a trigonometric
// polynomial of degree <= trig_degree. Samples uniformly on the circle,
// recovers Fourier coefficients by DFT, then locates sign changes and
// near-zero dips with a bracketed Newton refinement. Throws RankDeficient if
// f is numerically zero everywhere.
std::vector<double> circle_roots(const std::function<double(double)>& f,
                                 int trig_degree,
                                 const CircleRootOptions& opts = {});

// Real angles theta where Res_x(p, q)(tan(theta/2)) vanishes, including
// theta = pi. p_coeffs[k] holds the coefficient of x^k as an ascending
// polynomial in t = tan(theta/2); d_p / d_q bound those coefficient degrees.
// The Sylvester determinant is evaluated on the unit circle with per-row
// homogenization, so no explicit coefficient recovery of the (possibly
// high-degree) resultant is needed.
std::vector<double> sylvester_circle_roots(
    const std::vector<std::vector<double>>& p_coeffs, int d_p,
    const std::vector<std::vector<double>>& q_coeffs, int d_q,
    const CircleRootOptions& opts = {});

}  // namespace cyclereg
