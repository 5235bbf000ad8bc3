#include "polysolve.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>

namespace cyclereg {

std::vector<SinCosPair> solve_trig_linear(const TrigLinearEq& eq, double tol) {
    const double scale =
        std::max({std::abs(eq.a1), std::abs(eq.a2), std::abs(eq.a3)});
    const double eps = tol * std::max(1.0, scale);
    if (std::abs(eq.a1) <= eps && std::abs(eq.a2) <= eps) {
        if (std::abs(eq.a3) <= eps) {
            throw Error(ErrorCode::DegenerateEquation,
                        "solve_trig_linear: identically satisfied");
        }
        throw Error(ErrorCode::DegenerateEquation,
                    "solve_trig_linear: no cos/sin dependence");
    }

    // Line-circle intersection. Closest point of the line to the origin is
    // -a3/r^2 * (a1, a2); offsets of +-h along the tangent direction.
    const double r2 = eq.a1 * eq.a1 + eq.a2 * eq.a2;
    const double r = std::sqrt(r2);
    const double d = -eq.a3 / r;  // signed distance of intersection midpoint
    const double h2 = 1.0 - d * d;

    std::vector<SinCosPair> out;
    const double tangency_tol = 1e-12 * std::max(1.0, std::abs(d));
    const double cx = d * eq.a1 / r;
    const double cy = d * eq.a2 / r;
    if (h2 < -tangency_tol) return out;  // line misses the circle
    if (h2 <= tangency_tol) {
        const double inv = 1.0 / std::hypot(cx, cy);
        out.push_back({cx * inv, cy * inv});
        return out;
    }
    const double h = std::sqrt(h2);
    out.push_back({cx - h * eq.a2 / r, cy + h * eq.a1 / r});
    out.push_back({cx + h * eq.a2 / r, cy - h * eq.a1 / r});
    return out;
}

double half_angle_encode(double theta) {
    const double c = std::cos(theta * 0.5);
    if (std::abs(c) < 1e-154) return std::numeric_limits<double>::infinity();
    return std::sin(theta * 0.5) / c;
}

SinCosPair half_angle_decode(double t) {
    if (std::isinf(t)) return {-1.0, 0.0};
    const double d = 1.0 + t * t;
    return {(1.0 - t * t) / d, 2.0 * t / d};
}

double UnivariatePoly::eval(double x) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

UnivariatePoly UnivariatePoly::derivative() const {
    UnivariatePoly d;
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        d.coeffs.push_back(coeffs[k] * static_cast<double>(k));
    return d;
}

double UnivariatePoly::max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs) m = std::max(m, std::abs(c));
    return m;
}

void UnivariatePoly::trim(double rel_tol) {
    const double cut = rel_tol * max_abs_coeff();
    while (coeffs.size() > 1 && std::abs(coeffs.back()) <= cut)
        coeffs.pop_back();
}

void UnivariatePoly::normalize() {
    const double m = max_abs_coeff();
    if (m > 0.0)
        for (double& c : coeffs) c /= m;
}

std::vector<double> univariate_real_roots(const UnivariatePoly& p,
                                          const RootOptions& opts) {
    UnivariatePoly q = p;
    if (q.max_abs_coeff() == 0.0) {
        throw Error(ErrorCode::DegeneratePolynomial,
                    "univariate_real_roots: zero polynomial");
    }
    q.normalize();
    q.trim();
    const int n = q.degree();
    if (n < 1) return {};

    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -q.coeffs[i] / q.coeffs[n];

    Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
    const UnivariatePoly dq = q.derivative();

    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        const std::complex<double> ev = es.eigenvalues()[i];
        if (std::abs(ev.imag()) > opts.imag_tol * (1.0 + std::abs(ev.real())))
            continue;
        double x = ev.real();
        const double slope = dq.eval(x);
        if (slope != 0.0) x -= q.eval(x) / slope;

        double backward = 0.0;  // sum |c_k| |x|^k, the evaluation scale
        double pow_x = 1.0;
        for (double c : q.coeffs) {
            backward += std::abs(c) * pow_x;
            pow_x *= std::abs(x);
        }
        if (std::abs(q.eval(x)) <= opts.residual_tol * std::max(1.0, backward))
            roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double BivariatePoly::eval(double u, double v) const {
    double acc = 0.0;
    for (int i = static_cast<int>(coeffs.rows()) - 1; i >= 0; --i) {
        double row = 0.0;
        for (int j = static_cast<int>(coeffs.cols()) - 1; j >= 0; --j)
            row = row * v + coeffs(i, j);
        acc = acc * u + row;
    }
    return acc;
}

void BivariatePoly::normalize() {
    const double m = max_abs_coeff();
    if (m > 0.0) coeffs /= m;
}

void BivariatePoly::trim(double rel_tol) {
    const double cut = rel_tol * max_abs_coeff();
    int rows = static_cast<int>(coeffs.rows());
    int cols = static_cast<int>(coeffs.cols());
    while (rows > 1 && coeffs.row(rows - 1).cwiseAbs().maxCoeff() <= cut)
        --rows;
    while (cols > 1 &&
           coeffs.topRows(rows).col(cols - 1).cwiseAbs().maxCoeff() <= cut)
        --cols;
    coeffs = coeffs.topLeftCorner(rows, cols).eval();
}

std::vector<std::vector<double>> BivariatePoly::coeff_lists_in_v() const {
    std::vector<std::vector<double>> out(coeffs.cols());
    for (int j = 0; j < coeffs.cols(); ++j) {
        out[j].resize(coeffs.rows());
        for (int i = 0; i < coeffs.rows(); ++i) out[j][i] = coeffs(i, j);
    }
    return out;
}

std::vector<std::vector<double>> BivariatePoly::coeff_lists_in_u() const {
    std::vector<std::vector<double>> out(coeffs.rows());
    for (int i = 0; i < coeffs.rows(); ++i) {
        out[i].resize(coeffs.cols());
        for (int j = 0; j < coeffs.cols(); ++j) out[i][j] = coeffs(i, j);
    }
    return out;
}

BivariatePoly multiply(const BivariatePoly& a, const BivariatePoly& b) {
    BivariatePoly out;
    out.coeffs = Eigen::MatrixXd::Zero(a.coeffs.rows() + b.coeffs.rows() - 1,
                                       a.coeffs.cols() + b.coeffs.cols() - 1);
    for (int i = 0; i < a.coeffs.rows(); ++i)
        for (int j = 0; j < a.coeffs.cols(); ++j) {
            if (a.coeffs(i, j) == 0.0) continue;
            out.coeffs.block(i, j, b.coeffs.rows(), b.coeffs.cols()) +=
                a.coeffs(i, j) * b.coeffs;
        }
    return out;
}

BivariatePoly add_scaled(const BivariatePoly& a, double ka,
                         const BivariatePoly& b, double kb) {
    BivariatePoly out;
    out.coeffs = Eigen::MatrixXd::Zero(
        std::max(a.coeffs.rows(), b.coeffs.rows()),
        std::max(a.coeffs.cols(), b.coeffs.cols()));
    out.coeffs.topLeftCorner(a.coeffs.rows(), a.coeffs.cols()) = ka * a.coeffs;
    out.coeffs.topLeftCorner(b.coeffs.rows(), b.coeffs.cols()) +=
        kb * b.coeffs;
    return out;
}

double TrivariatePoly::eval(double x, double v, double w) const {
    double acc = 0.0;
    for (auto it = coeff_x.rbegin(); it != coeff_x.rend(); ++it)
        acc = acc * x + it->eval(v, w);
    return acc;
}

double TrivariatePoly::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& c : coeff_x) m = std::max(m, c.max_abs_coeff());
    return m;
}

void TrivariatePoly::normalize() {
    const double m = max_abs_coeff();
    if (m > 0.0)
        for (auto& c : coeff_x) c.coeffs /= m;
}

namespace {

std::vector<double> chebyshev_nodes(int n) {
    std::vector<double> x(n);
    for (int k = 0; k < n; ++k)
        x[k] = std::cos(M_PI * (2.0 * k + 1.0) / (2.0 * n));
    return x;
}

// Inverse of the monomial Vandermonde at the n Chebyshev nodes. The node set
// is fixed per size, so the inverse is cached.
const Eigen::MatrixXd& vandermonde_inverse(int n) {
    thread_local std::map<int, Eigen::MatrixXd> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    const std::vector<double> x = chebyshev_nodes(n);
    Eigen::MatrixXd v(n, n);
    for (int k = 0; k < n; ++k) {
        double p = 1.0;
        for (int j = 0; j < n; ++j) {
            v(k, j) = p;
            p *= x[k];
        }
    }
    return cache.emplace(n, v.inverse()).first->second;
}

// Sylvester matrix with scalar coefficient entries.
double sylvester_det_scalar(const std::vector<double>& a,
                            const std::vector<double>& b) {
    const int m = static_cast<int>(a.size()) - 1;
    const int n = static_cast<int>(b.size()) - 1;
    const int size = m + n;
    Eigen::MatrixXd mat = Eigen::MatrixXd::Zero(size, size);
    for (int r = 0; r < n; ++r)
        for (int k = 0; k <= m; ++k) mat(r, r + m - k) = a[k];
    for (int r = 0; r < m; ++r)
        for (int k = 0; k <= n; ++k) mat(n + r, r + n - k) = b[k];
    return mat.determinant();
}

}  // namespace

UnivariatePoly sylvester_resultant(const BivariatePoly& p,
                                   const BivariatePoly& q, Var eliminate) {
    BivariatePoly pn = p;
    BivariatePoly qn = q;
    if (eliminate == Var::V) {
        pn.coeffs = p.coeffs.transpose().eval();
        qn.coeffs = q.coeffs.transpose().eval();
    }
    pn.normalize();
    qn.normalize();

    const int m = pn.degree_u();
    const int n = qn.degree_u();
    if (m < 1 || n < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "sylvester_resultant: eliminated variable has degree 0");
    }

    const int bound = m * qn.degree_v() + n * pn.degree_v();
    const int samples = bound + 1;
    const std::vector<double> nodes = chebyshev_nodes(samples);

    Eigen::VectorXd values(samples);
    double max_det = 0.0;
    std::vector<double> a(m + 1), b(n + 1);
    for (int k = 0; k < samples; ++k) {
        for (int i = 0; i <= m; ++i) {
            double acc = 0.0;
            for (int j = pn.degree_v(); j >= 0; --j)
                acc = acc * nodes[k] + pn.coeffs(i, j);
            a[i] = acc;
        }
        for (int i = 0; i <= n; ++i) {
            double acc = 0.0;
            for (int j = qn.degree_v(); j >= 0; --j)
                acc = acc * nodes[k] + qn.coeffs(i, j);
            b[i] = acc;
        }
        values[k] = sylvester_det_scalar(a, b);
        max_det = std::max(max_det, std::abs(values[k]));
    }
    if (max_det < 1e-12) {
        throw Error(ErrorCode::RankDeficient,
                    "sylvester_resultant: determinant vanishes at all samples");
    }

    const Eigen::VectorXd coeffs = vandermonde_inverse(samples) * values;
    UnivariatePoly out;
    out.coeffs.assign(coeffs.data(), coeffs.data() + samples);
    out.trim(1e-11);
    return out;
}

BivariatePoly sylvester_resultant(const TrivariatePoly& p,
                                  const TrivariatePoly& q) {
    TrivariatePoly pn = p;
    TrivariatePoly qn = q;
    pn.normalize();
    qn.normalize();

    const int m = pn.degree_x();
    const int n = qn.degree_x();
    if (m < 1 || n < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "sylvester_resultant: eliminated variable has degree 0");
    }

    // Effective degrees: structurally absent variables must not inflate the
    // interpolation grid (their phantom coefficients would only carry noise).
    auto max_deg = [](const TrivariatePoly& t, bool v_axis) {
        const double cut = 1e-12 * t.max_abs_coeff();
        int d = 0;
        for (const auto& c : t.coeff_x) {
            for (int i = 0; i < c.coeffs.rows(); ++i)
                for (int j = 0; j < c.coeffs.cols(); ++j)
                    if (std::abs(c.coeffs(i, j)) > cut)
                        d = std::max(d, v_axis ? i : j);
        }
        return d;
    };
    const int bound_v = m * max_deg(qn, true) + n * max_deg(pn, true);
    const int bound_w = m * max_deg(qn, false) + n * max_deg(pn, false);
    const int nv = bound_v + 1;
    const int nw = bound_w + 1;
    const std::vector<double> vnodes = chebyshev_nodes(nv);
    const std::vector<double> wnodes = chebyshev_nodes(nw);

    Eigen::MatrixXd values(nv, nw);
    double max_det = 0.0;
    std::vector<double> a(m + 1), b(n + 1);
    for (int kv = 0; kv < nv; ++kv) {
        for (int kw = 0; kw < nw; ++kw) {
            for (int i = 0; i <= m; ++i)
                a[i] = pn.coeff_x[i].eval(vnodes[kv], wnodes[kw]);
            for (int i = 0; i <= n; ++i)
                b[i] = qn.coeff_x[i].eval(vnodes[kv], wnodes[kw]);
            values(kv, kw) = sylvester_det_scalar(a, b);
            max_det = std::max(max_det, std::abs(values(kv, kw)));
        }
    }
    if (max_det < 1e-12) {
        throw Error(ErrorCode::RankDeficient,
                    "sylvester_resultant: determinant vanishes at all samples");
    }

    BivariatePoly out;
    out.coeffs = vandermonde_inverse(nv) * values *
                 vandermonde_inverse(nw).transpose();
    return out;
}

double eval_homogeneous(const std::vector<double>& coeffs, int bound, double s,
                        double c) {
    // sum_k coeffs[k] s^k c^(bound-k) via a Horner recurrence in s that
    // accumulates the matching c powers, so theta = pi (c = 0) stays exact.
    if (coeffs.empty()) return 0.0;
    const int top = static_cast<int>(coeffs.size()) - 1;
    double acc = coeffs[top];
    double cc = 1.0;
    for (int k = top - 1; k >= 0; --k) {
        cc *= c;
        acc = acc * s + coeffs[k] * cc;
    }
    for (int k = top; k < bound; ++k) acc *= c;
    return acc;
}

namespace {

struct TrigSeries {
    std::vector<std::complex<double>> coeff;  // c_m, m = 0..M

    double eval(double theta) const {
        const std::complex<double> w(std::cos(theta), std::sin(theta));
        std::complex<double> wm = w;
        double acc = coeff[0].real();
        for (std::size_t m = 1; m < coeff.size(); ++m) {
            acc += 2.0 * (coeff[m] * wm).real();
            wm *= w;
        }
        return acc;
    }

    double eval_derivative(double theta) const {
        const std::complex<double> w(std::cos(theta), std::sin(theta));
        std::complex<double> wm = w;
        double acc = 0.0;
        for (std::size_t m = 1; m < coeff.size(); ++m) {
            acc -= 2.0 * static_cast<double>(m) * (coeff[m] * wm).imag();
            wm *= w;
        }
        return acc;
    }
};

// Bracketed Newton: bisection whenever the step escapes the bracket.
double refine_root(const TrigSeries& series, double a, double b, double fa,
                   double fb, int iters) {
    double x = 0.5 * (a + b);
    for (int it = 0; it < iters; ++it) {
        const double fx = series.eval(x);
        if (fx == 0.0) return x;
        if ((fa < 0.0) == (fx < 0.0)) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        const double d = series.eval_derivative(x);
        double xn = (d != 0.0) ? x - fx / d : 0.5 * (a + b);
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (std::abs(xn - x) < 1e-15) return xn;
        x = xn;
    }
    return x;
}

}  // namespace

std::vector<double> circle_roots(const std::function<double(double)>& f,
                                 int trig_degree,
                                 const CircleRootOptions& opts) {
    const int samples = std::max(2 * trig_degree + 4, 16);
    std::vector<double> theta(samples), vals(samples);
    double scale = 0.0;
    for (int k = 0; k < samples; ++k) {
        theta[k] = -M_PI + 2.0 * M_PI * k / samples;
        vals[k] = f(theta[k]);
        scale = std::max(scale, std::abs(vals[k]));
    }
    if (scale < opts.zero_rel_tol) {
        throw Error(ErrorCode::RankDeficient,
                    "circle_roots: function vanishes at every sample");
    }

    TrigSeries series;
    series.coeff.resize(trig_degree + 1);
    for (int m = 0; m <= trig_degree; ++m) {
        std::complex<double> acc(0.0, 0.0);
        for (int k = 0; k < samples; ++k) {
            acc += vals[k] * std::complex<double>(std::cos(m * theta[k]),
                                                  -std::sin(m * theta[k]));
        }
        series.coeff[m] = acc / static_cast<double>(samples);
    }

    // Adjacent roots can sit far closer than the fitting grid (distinct
    // solutions of the downstream systems regularly land within 1e-3 of each
    // other in one angle), so all root location runs on a dense scan of the
    // fitted series, which is exact for a band-limited input and cheap to
    // evaluate, backed by an extremum sweep that brackets sub-grid pairs.
    const int dense = std::max(64, 32 * trig_degree);
    const double step = 2.0 * M_PI / dense;
    std::vector<double> dth(dense), dv(dense), dd(dense);
    for (int k = 0; k < dense; ++k) {
        dth[k] = -M_PI + step * k;
        dv[k] = series.eval(dth[k]);
        dd[k] = series.eval_derivative(dth[k]);
    }

    TrigSeries deriv;
    deriv.coeff.resize(series.coeff.size());
    for (std::size_t mm = 0; mm < series.coeff.size(); ++mm)
        deriv.coeff[mm] = series.coeff[mm] *
                          std::complex<double>(0.0, static_cast<double>(mm));

    const double exact_tol = 1e-13 * scale;
    std::vector<double> roots;
    for (int k = 0; k < dense; ++k) {
        const int k1 = (k + 1) % dense;
        if (std::abs(dv[k]) <= exact_tol) {
            roots.push_back(dth[k]);
            continue;
        }
        if (std::abs(dv[k1]) <= exact_tol) continue;  // handled at k1
        if ((dv[k] < 0.0) != (dv[k1] < 0.0)) {
            roots.push_back(refine_root(series, dth[k], dth[k] + step, dv[k],
                                        dv[k1], opts.newton_iters));
            continue;
        }
        // No sign change: an interior extremum may still hide a root pair.
        if ((dd[k] < 0.0) == (dd[k1] < 0.0)) continue;
        const double x =
            refine_root(deriv, dth[k], dth[k] + step, dd[k], dd[k1],
                        opts.newton_iters);
        const double fx = series.eval(x);
        if (std::abs(fx) <= opts.dip_rel_tol * scale) {
            roots.push_back(x);  // tangency: treat as a double root
        } else if ((fx < 0.0) != (dv[k] < 0.0)) {
            roots.push_back(refine_root(series, dth[k], x, dv[k], fx,
                                        opts.newton_iters));
            roots.push_back(refine_root(series, x, dth[k] + step, fx, dv[k1],
                                        opts.newton_iters));
        }
    }

    for (double& r : roots) {
        r = std::remainder(r, 2.0 * M_PI);
        if (r <= -M_PI) r += 2.0 * M_PI;
    }
    std::sort(roots.begin(), roots.end());
    // merge numerically identical roots (wrap-aware at +-pi)
    std::vector<double> out;
    for (double r : roots) {
        if (!out.empty() && std::abs(r - out.back()) < 1e-10) continue;
        out.push_back(r);
    }
    if (out.size() > 1 &&
        std::abs((out.front() + 2.0 * M_PI) - out.back()) < 1e-10) {
        out.pop_back();
    }
    return out;
}

std::vector<double> sylvester_circle_roots(
    const std::vector<std::vector<double>>& p_coeffs, int d_p,
    const std::vector<std::vector<double>>& q_coeffs, int d_q,
    const CircleRootOptions& opts) {
    const int m = static_cast<int>(p_coeffs.size()) - 1;
    const int n = static_cast<int>(q_coeffs.size()) - 1;
    if (m < 1 || n < 1) {
        throw Error(ErrorCode::InvalidArgument,
                    "sylvester_circle_roots: eliminated variable has degree 0");
    }

    double p_scale = 0.0, q_scale = 0.0;
    for (const auto& c : p_coeffs)
        for (double x : c) p_scale = std::max(p_scale, std::abs(x));
    for (const auto& c : q_coeffs)
        for (double x : c) q_scale = std::max(q_scale, std::abs(x));
    if (p_scale == 0.0 || q_scale == 0.0) {
        throw Error(ErrorCode::RankDeficient,
                    "sylvester_circle_roots: zero polynomial");
    }

    // Total homogenization power. It must be even so the determinant is
    // 2pi-periodic in theta; an odd budget gets one extra cos factor (which
    // only adds an extraneous candidate at pi).
    int total = n * d_p + m * d_q;
    const bool pad = (total % 2) != 0;
    if (pad) total += 1;

    const int size = m + n;
    Eigen::MatrixXd mat(size, size);
    std::vector<double> pv(m + 1), pv_pad(m + 1), qv(n + 1);
    double hadamard = 1.0;
    auto det_at = [&](double th) {
        const double s = std::sin(0.5 * th);
        const double c = std::cos(0.5 * th);
        for (int k = 0; k <= m; ++k) {
            pv[k] = eval_homogeneous(p_coeffs[k], d_p, s, c) / p_scale;
            if (pad) pv_pad[k] = pv[k] * c;
        }
        for (int k = 0; k <= n; ++k)
            qv[k] = eval_homogeneous(q_coeffs[k], d_q, s, c) / q_scale;
        mat.setZero();
        for (int r = 0; r < n; ++r) {
            const std::vector<double>& row = (pad && r == 0) ? pv_pad : pv;
            for (int k = 0; k <= m; ++k) mat(r, r + m - k) = row[k];
        }
        for (int r = 0; r < m; ++r)
            for (int k = 0; k <= n; ++k) mat(n + r, r + n - k) = qv[k];
        hadamard = 1.0;
        for (int r = 0; r < size; ++r) hadamard *= mat.row(r).norm();
        return mat.determinant();
    };

    // Distinguish a structurally singular pencil (shared factor) from the
    // small determinant values the homogenization naturally produces: the
    // Hadamard ratio is scale-free.
    const int probes = 2 * total + 5;
    double best_ratio = 0.0;
    for (int k = 0; k < probes; ++k) {
        const double th = -M_PI + 2.0 * M_PI * k / probes;
        const double d = det_at(th);
        if (hadamard > 0.0)
            best_ratio = std::max(best_ratio, std::abs(d) / hadamard);
    }
    if (best_ratio < 1e-13) {
        throw Error(ErrorCode::RankDeficient,
                    "sylvester_circle_roots: determinant vanishes at every "
                    "sample");
    }

    std::vector<double> roots = circle_roots(det_at, total / 2, opts);

    // The fitted series localizes roots globally but loses pointwise
    // precision where the homogenization crushes the determinant; polish
    // each root against the row-equilibrated determinant, whose sign and
    // local scale stay trustworthy.
    auto det_eq = [&](double th) {
        det_at(th);
        for (int r = 0; r < size; ++r) {
            const double norm = mat.row(r).norm();
            if (norm > 0.0) mat.row(r) /= norm;
        }
        return mat.determinant();
    };
    const double w = 2.0 * M_PI / (64.0 * total);
    for (double& r : roots) {
        double a = r - w, b = r + w;
        double fa = det_eq(a), fm = det_eq(r), fb = det_eq(b);
        if ((fa < 0.0) != (fm < 0.0)) {
            b = r;
            fb = fm;
        } else if ((fm < 0.0) != (fb < 0.0)) {
            a = r;
            fa = fm;
        } else {
            continue;  // tangency or already converged
        }
        // Illinois iteration on the bracket
        for (int it = 0; it < 20 && b - a > 1e-15; ++it) {
            const double mth = (a * fb - b * fa) / (fb - fa);
            if (!(mth > a && mth < b)) break;
            const double fmid = det_eq(mth);
            if (fmid == 0.0) {
                a = b = mth;
                break;
            }
            if ((fa < 0.0) != (fmid < 0.0)) {
                b = mth;
                fb = fmid;
                fa *= 0.5;
            } else {
                a = mth;
                fa = fmid;
                fb *= 0.5;
            }
        }
        r = 0.5 * (a + b);
    }
    return roots;
}

}  // namespace cyclereg
