#include "solvers.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "trig_poly.hpp"

namespace cyclereg {

int cycle_length(SolverKind kind) {
    switch (kind) {
        case SolverKind::Pairwise: return 2;
        case SolverKind::Cycle3: return 3;
        case SolverKind::Cycle4: return 4;
        case SolverKind::Cycle5: return 5;
        case SolverKind::Planar2: return 2;
        case SolverKind::Planar3: return 3;
        case SolverKind::Planar4: return 4;
    }
    return 0;
}

bool is_planar(SolverKind kind) {
    return kind == SolverKind::Planar2 || kind == SolverKind::Planar3 ||
           kind == SolverKind::Planar4;
}

int closure_match_count(SolverKind kind) {
    return kind == SolverKind::Cycle5 ? 2 : 1;
}

int minimal_match_count(SolverKind kind) {
    const int n = cycle_length(kind);
    const int per_edge = is_planar(kind) ? 1 : 2;
    return per_edge * (n - 1) + closure_match_count(kind);
}

int max_solution_count(SolverKind kind) {
    switch (kind) {
        case SolverKind::Pairwise: return 2;
        case SolverKind::Cycle3: return 4;
        case SolverKind::Cycle4: return 16;
        case SolverKind::Cycle5: return 32;
        case SolverKind::Planar2: return 2;
        case SolverKind::Planar3: return 4;
        case SolverKind::Planar4: return 16;
    }
    return 0;
}

const char* solver_kind_name(SolverKind kind) {
    switch (kind) {
        case SolverKind::Pairwise: return "pairwise";
        case SolverKind::Cycle3: return "cycle3";
        case SolverKind::Cycle4: return "cycle4";
        case SolverKind::Cycle5: return "cycle5";
        case SolverKind::Planar2: return "planar2";
        case SolverKind::Planar3: return "planar3";
        case SolverKind::Planar4: return "planar4";
    }
    return "?";
}

std::optional<SolverKind> solver_kind_from_name(std::string_view name) {
    for (SolverKind k :
         {SolverKind::Pairwise, SolverKind::Cycle3, SolverKind::Cycle4,
          SolverKind::Cycle5, SolverKind::Planar2, SolverKind::Planar3,
          SolverKind::Planar4}) {
        if (name == solver_kind_name(k)) return k;
    }
    return std::nullopt;
}

namespace {

std::pair<int, int> sorted_pair(int a, int b) {
    return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

PointMatch oriented(const PointMatch& m, int from, int to) {
    if (m.scan_a == from && m.scan_b == to) return m;
    PointMatch flipped;
    flipped.scan_a = m.scan_b;
    flipped.scan_b = m.scan_a;
    flipped.p_a = m.p_b;
    flipped.p_b = m.p_a;
    return flipped;
}

[[noreturn]] void layout_error(SolverKind kind, const std::string& detail) {
    const int n = cycle_length(kind);
    const int per = is_planar(kind) ? 1 : 2;
    std::ostringstream os;
    os << "invalid " << solver_kind_name(kind) << " layout (" << detail
       << "); expected " << minimal_match_count(kind) << " matches: " << per
       << " per adjacent scan pair";
    for (int e = 0; e + 1 < n; ++e)
        os << (e ? "," : "") << " (S" << e + 1 << ",S" << e + 2 << ")";
    os << " then " << closure_match_count(kind) << " closing (S1,S" << n << ")";
    throw Error(ErrorCode::InvalidArgument, os.str());
}

}  // namespace

CycleInstance make_cycle_instance(SolverKind kind,
                                  const std::vector<PointMatch>& matches) {
    const int n = cycle_length(kind);
    const int per_edge = is_planar(kind) ? 1 : 2;
    const int n_closure = closure_match_count(kind);
    const int expected = minimal_match_count(kind);
    if (static_cast<int>(matches.size()) != expected) {
        layout_error(kind, "got " + std::to_string(matches.size()) + " matches");
    }
    for (const PointMatch& m : matches) {
        if (m.scan_a == m.scan_b) layout_error(kind, "self-match");
        if (!m.p_a.allFinite() || !m.p_b.allFinite())
            layout_error(kind, "non-finite coordinates");
    }

    CycleInstance inst;
    inst.kind = kind;
    inst.n = n;
    inst.planar = is_planar(kind);

    // The first row fixes the orientation of the whole chain.
    inst.scans = {matches[0].scan_a, matches[0].scan_b};
    for (int e = 0; e < n - 1; ++e) {
        const int base = e * per_edge;
        int from, to;
        if (e == 0) {
            from = inst.scans[0];
            to = inst.scans[1];
        } else {
            from = inst.scans.back();
            const PointMatch& lead = matches[base];
            if (lead.scan_a == from) to = lead.scan_b;
            else if (lead.scan_b == from) to = lead.scan_a;
            else layout_error(kind, "edge " + std::to_string(e + 1) +
                                        " does not continue the chain");
            for (int s : inst.scans)
                if (s == to) layout_error(kind, "scan id repeats in the chain");
            inst.scans.push_back(to);
        }
        for (int j = 0; j < per_edge; ++j) {
            const PointMatch& m = matches[base + j];
            if (sorted_pair(m.scan_a, m.scan_b) != sorted_pair(from, to))
                layout_error(kind, "edge " + std::to_string(e + 1) +
                                       " rows mix scan pairs");
            inst.adjacent.push_back(oriented(m, from, to));
        }
    }
    for (int j = 0; j < n_closure; ++j) {
        const PointMatch& m = matches[per_edge * (n - 1) + j];
        if (sorted_pair(m.scan_a, m.scan_b) !=
            sorted_pair(inst.scans.front(), inst.scans.back()))
            layout_error(kind, "closing rows must join the first and last scan");
        inst.closure.push_back(
            oriented(m, inst.scans.front(), inst.scans.back()));
    }
    return inst;
}

PredefinedPair make_predefined_planar(const PointMatch& match) {
    PredefinedPair pair;
    pair.h.translation = -match.p_a;
    pair.g.translation = -match.p_b;
    return pair;
}

std::vector<RigidTransform> recover_edge_transforms(
    const std::vector<double>& angles,
    const std::vector<PredefinedPair>& pairs) {
    if (angles.size() != pairs.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "recover_edge_transforms: angle/pair count mismatch");
    }
    std::vector<RigidTransform> out;
    out.reserve(angles.size());
    for (std::size_t i = 0; i < angles.size(); ++i)
        out.push_back(pairs[i].g.inverse() * rot_z(angles[i]) * pairs[i].h);
    return out;
}

namespace {

struct Prepared {
    std::vector<PredefinedPair> pairs;
    std::vector<RigidTransform> k;  // k[j] couples edges j and j+1
    std::vector<Vec3> closure_a;    // closure points in the first aligned frame
    std::vector<Vec3> closure_b;    // and in the last aligned frame
    double scale = 0.0;
};

Prepared prepare(const CycleInstance& inst) {
    Prepared prep;
    const int n_edges = inst.n - 1;
    prep.pairs.reserve(n_edges);
    for (int e = 0; e < n_edges; ++e) {
        if (inst.planar) {
            prep.pairs.push_back(make_predefined_planar(inst.adjacent[e]));
        } else {
            const PointMatch& m1 = inst.adjacent[2 * e];
            const PointMatch& m2 = inst.adjacent[2 * e + 1];
            prep.pairs.push_back(make_predefined(m1.p_a, m2.p_a, m1.p_b, m2.p_b));
        }
    }
    for (int j = 0; j + 1 < n_edges; ++j)
        prep.k.push_back(k_matrix(prep.pairs[j + 1].h, prep.pairs[j].g));
    for (const PointMatch& m : inst.closure) {
        prep.closure_a.push_back(prep.pairs.front().h.apply(m.p_a));
        prep.closure_b.push_back(prep.pairs.back().g.apply(m.p_b));
    }
    auto grow = [&prep](const PointMatch& m) {
        prep.scale = std::max(prep.scale, m.p_a.cwiseAbs().maxCoeff());
        prep.scale = std::max(prep.scale, m.p_b.cwiseAbs().maxCoeff());
    };
    for (const PointMatch& m : inst.adjacent) grow(m);
    for (const PointMatch& m : inst.closure) grow(m);
    return prep;
}

struct Tols {
    double accept;
    double consistency;
    double variety;
    double dedup;
    double prefilter;
};

Tols resolve_tols(const SolverOptions& opts, double scale) {
    Tols t;
    t.accept = opts.accept_tol >= 0.0 ? opts.accept_tol : 1e-6 * (1.0 + scale);
    t.consistency =
        opts.consistency_tol >= 0.0 ? opts.consistency_tol : t.accept;
    t.variety =
        opts.variety_tol >= 0.0 ? opts.variety_tol : 1e-7 * (1.0 + scale);
    t.dedup = opts.dedup_tol;
    // Loose by design: candidates only need to land inside the Newton basin.
    t.prefilter = 0.05 * (1.0 + scale);
    return t;
}

// Max closure residual of the angle tuple, evaluated numerically in the
// aligned frames (rigid maps preserve the distance, so this equals the
// original-frame point error).
double closure_residual(const std::vector<double>& angles,
                        const Prepared& prep) {
    double worst = 0.0;
    for (std::size_t i = 0; i < prep.closure_a.size(); ++i) {
        Vec3 v = prep.closure_a[i];
        for (std::size_t j = 0; j < angles.size(); ++j) {
            const double c = std::cos(angles[j]);
            const double s = std::sin(angles[j]);
            v = Vec3(c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z());
            if (j < prep.k.size()) v = prep.k[j].apply(v);
        }
        worst = std::max(worst, (v - prep.closure_b[i]).norm());
    }
    return worst;
}

double angle_distance(double a, double b) {
    return std::abs(std::remainder(a - b, 2.0 * M_PI));
}

double tuple_distance(const std::vector<double>& a,
                      const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, angle_distance(a[i], b[i]));
    return d;
}

struct Candidate {
    std::vector<double> angles;
    double residual = 0.0;
};

SolutionSet finalize(std::vector<Candidate> cands, const Prepared& prep,
                     const Tols& tols, int bound) {
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) {
                  if (a.residual != b.residual) return a.residual < b.residual;
                  return a.angles < b.angles;
              });
    // Non-maximum suppression keeps the best residual per angle cluster and
    // guarantees the solver's solution-count bound.
    std::vector<Candidate> kept;
    for (const Candidate& c : cands) {
        bool dup = false;
        for (const Candidate& k : kept) {
            if (tuple_distance(c.angles, k.angles) <= tols.dedup) {
                dup = true;
                break;
            }
        }
        if (!dup) kept.push_back(c);
        if (static_cast<int>(kept.size()) == bound) break;
    }
    std::sort(kept.begin(), kept.end(),
              [](const Candidate& a, const Candidate& b) {
                  return a.angles < b.angles;
              });

    SolutionSet set;
    for (const Candidate& c : kept) {
        CycleSolution sol;
        sol.angles = c.angles;
        sol.edge_transforms = recover_edge_transforms(c.angles, prep.pairs);
        sol.residual = c.residual;
        set.solutions.push_back(std::move(sol));
    }
    return set;
}

// ---- symbolic chains ----------------------------------------------------

using TrigVec = std::array<TrigPoly, 3>;

TrigVec sym_const(int slots, const Vec3& p) {
    return {TrigPoly::constant(slots, p.x()), TrigPoly::constant(slots, p.y()),
            TrigPoly::constant(slots, p.z())};
}

TrigVec sym_rot_z(int slot, const TrigVec& v) {
    return {v[0].mul_cos(slot) - v[1].mul_sin(slot),
            v[0].mul_sin(slot) + v[1].mul_cos(slot), v[2]};
}

TrigVec sym_rot_z_t(int slot, const TrigVec& v) {
    return {v[0].mul_cos(slot) + v[1].mul_sin(slot),
            v[1].mul_cos(slot) - v[0].mul_sin(slot), v[2]};
}

TrigVec sym_apply(const RigidTransform& t, const TrigVec& v) {
    const int slots = v[0].slots();
    TrigVec out = {TrigPoly(slots), TrigPoly(slots), TrigPoly(slots)};
    for (int i = 0; i < 3; ++i) {
        TrigPoly acc = TrigPoly::constant(slots, t.translation[i]);
        for (int j = 0; j < 3; ++j) {
            if (t.rotation(i, j) != 0.0) acc += v[j] * t.rotation(i, j);
        }
        out[i] = acc;
    }
    return out;
}

// L(theta_{n-1}) K_{n-1} ... K_2 L(theta_1) applied to the closure point.
TrigVec forward_chain(const Prepared& prep, int slots, const Vec3& q) {
    TrigVec v = sym_const(slots, q);
    v = sym_rot_z(0, v);
    for (std::size_t j = 0; j < prep.k.size(); ++j) {
        v = sym_apply(prep.k[j], v);
        v = sym_rot_z(static_cast<int>(j) + 1, v);
    }
    return v;
}

// K_2^-1 L(theta_2)^T ... K_{n-1}^-1 L(theta_{n-1})^T applied to the closure
// point in the last aligned frame. The leading L(theta_1)^T of the full
// inverse chain is omitted; it does not touch the z row.
TrigVec inverse_chain_tail(const Prepared& prep, int slots, const Vec3& qb) {
    TrigVec v = sym_const(slots, qb);
    const int last = static_cast<int>(prep.k.size());
    v = sym_rot_z_t(last, v);
    for (int j = last - 1; j >= 0; --j) {
        v = sym_apply(prep.k[j].inverse(), v);
        if (j > 0) v = sym_rot_z_t(j, v);
    }
    return v;
}

// Square Newton iteration on the chosen constraint rows, updating the listed
// angle slots.
struct PolishSystem {
    std::vector<TrigPoly> eqs;
    std::vector<int> free_slots;
    std::vector<std::vector<TrigPoly>> grads;

    PolishSystem(std::vector<TrigPoly> equations, std::vector<int> slots)
        : eqs(std::move(equations)), free_slots(std::move(slots)) {
        for (const TrigPoly& e : eqs) {
            std::vector<TrigPoly> g;
            for (int s : free_slots) g.push_back(e.derivative(s));
            grads.push_back(std::move(g));
        }
    }

    double max_residual(const std::vector<double>& angles) const {
        double m = 0.0;
        for (const TrigPoly& e : eqs) m = std::max(m, std::abs(e.eval(angles)));
        return m;
    }

    bool polish(std::vector<double>& angles, double tol, int iters = 20) const {
        using SmallMat =
            Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
        using SmallVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 4, 1>;
        const int d = static_cast<int>(eqs.size());
        SmallMat jac(d, d);
        SmallVec f(d);
        double cosv[4], sinv[4];
        const double entry = max_residual(angles);
        for (int it = 0; it < iters; ++it) {
            const int n_slots = eqs.front().slots();
            for (int s = 0; s < n_slots; ++s) {
                cosv[s] = std::cos(angles[s]);
                sinv[s] = std::sin(angles[s]);
            }
            double worst = 0.0;
            for (int i = 0; i < d; ++i) {
                f[i] = eqs[i].eval_cs(cosv, sinv);
                worst = std::max(worst, std::abs(f[i]));
                for (int j = 0; j < d; ++j)
                    jac(i, j) = grads[i][j].eval_cs(cosv, sinv);
            }
            if (it >= 4 && worst > 10.0 * (entry + tol)) return false;
            SmallVec step = jac.colPivHouseholderQr().solve(SmallVec(-f));
            const double norm = step.cwiseAbs().maxCoeff();
            if (!std::isfinite(norm)) return false;
            if (norm > 0.5) step *= 0.5 / norm;  // stay within the basin
            for (int j = 0; j < d; ++j) {
                const int s = free_slots[j];
                angles[s] = wrap_angle(angles[s] + step[j]);
            }
            if (norm < 1e-13) break;
        }
        return max_residual(angles) <= tol;
    }
};

std::vector<double> trig_linear_roots(const TrigPoly& fixed, int slot) {
    std::vector<double> out;
    const TrigLinearEq eq = fixed.linear_in(slot);
    try {
        for (const SinCosPair& p : solve_trig_linear(eq))
            out.push_back(p.angle());
    } catch (const Error&) {
        // degenerate row: caller consults a fallback equation
    }
    return out;
}

// Compatibility curve of two constraints that are trig-linear in the shared
// angle `slot`: the locus over the surviving angle pair where a common
// (complex) root in `slot` exists. Both rows' (cos, sin) coefficient pairs
// are images of the closure points' xy coordinates under one similarity, so
// the similarity magnitude G = a^2 + b^2 factors out of the raw Sylvester
// resultant; without this reduction the two curves fed to the final
// elimination share the factor G and their resultant vanishes identically.
//   compat = d2^2 |p|^2 - 2 d1 d2 (p.q) + d1^2 |q|^2 - G cross(p, q)^2
// where p, q are the in-plane closure coordinates and d_i the angle-free
// parts of the rows.
BivariatePoly zrow_compat(const TrigPoly& f, const TrigPoly& g, int slot,
                          int slot_u, int slot_v, const Eigen::Vector2d& p_xy,
                          const Eigen::Vector2d& q_xy) {
    const TrigPoly d1 = f.fix_cs(slot, 0.0, 0.0);
    const TrigPoly a1 = f.fix_cs(slot, 1.0, 0.0) - d1;
    const TrigPoly b1 = f.fix_cs(slot, 0.0, 1.0) - d1;
    const TrigPoly d2 = g.fix_cs(slot, 0.0, 0.0);
    const TrigPoly a2 = g.fix_cs(slot, 1.0, 0.0) - d2;
    const TrigPoly b2 = g.fix_cs(slot, 0.0, 1.0) - d2;

    const double n1 = p_xy.squaredNorm();
    const double n2 = q_xy.squaredNorm();
    if (n1 <= 0.0 && n2 <= 0.0) {
        throw Error(ErrorCode::DegenerateClosure,
                    "both closure points lie on the virtual axis");
    }
    const double dot = p_xy.dot(q_xy);
    const double cr = p_xy.x() * q_xy.y() - p_xy.y() * q_xy.x();

    const BivariatePoly d1b = d1.to_bivariate(slot_u, slot_v);
    const BivariatePoly d2b = d2.to_bivariate(slot_u, slot_v);
    BivariatePoly sim;  // G, cleared: (a^2 + b^2) / |p|^2 of the larger row
    if (n1 >= n2) {
        const BivariatePoly a1b = a1.to_bivariate(slot_u, slot_v);
        const BivariatePoly b1b = b1.to_bivariate(slot_u, slot_v);
        sim = add_scaled(multiply(a1b, a1b), 1.0 / n1, multiply(b1b, b1b),
                         1.0 / n1);
    } else {
        const BivariatePoly a2b = a2.to_bivariate(slot_u, slot_v);
        const BivariatePoly b2b = b2.to_bivariate(slot_u, slot_v);
        sim = add_scaled(multiply(a2b, a2b), 1.0 / n2, multiply(b2b, b2b),
                         1.0 / n2);
    }

    BivariatePoly out = add_scaled(multiply(d2b, d2b), n1,
                                   multiply(d1b, d2b), -2.0 * dot);
    out = add_scaled(out, 1.0, multiply(d1b, d1b), n2);
    out = add_scaled(out, 1.0, sim, -cr * cr);
    return out;
}

// Roots in theta_v of res(t_u, t_v) with t_u pinned to tan(theta_u/2),
// evaluated homogeneously so theta_u = pi stays regular. Returns an empty
// list when the slice vanishes identically.
std::vector<double> slice_circle_roots(const BivariatePoly& res,
                                       double theta_u) {
    const double s = std::sin(0.5 * theta_u);
    const double c = std::cos(0.5 * theta_u);
    std::vector<double> gcoef(res.degree_v() + 1, 0.0);
    std::vector<double> ucol(res.degree_u() + 1);
    for (int j = 0; j <= res.degree_v(); ++j) {
        for (int i = 0; i <= res.degree_u(); ++i) ucol[i] = res.coeffs(i, j);
        gcoef[j] = eval_homogeneous(ucol, res.degree_u(), s, c);
    }
    int bound = res.degree_v();
    if (bound % 2) bound += 1;  // keep integer trig degree
    try {
        auto f = [&](double th) {
            return eval_homogeneous(gcoef, bound, std::sin(0.5 * th),
                                    std::cos(0.5 * th));
        };
        return circle_roots(f, bound / 2);
    } catch (const Error&) {
        return {};
    }
}

}  // namespace

// ---- pairwise -----------------------------------------------------------

SolutionSet solve_pairwise_minimal(const CycleInstance& inst,
                                   const SolverOptions& opts) {
    const Prepared prep = prepare(inst);
    const Tols tols = resolve_tols(opts, prep.scale);
    const Vec3& q = prep.closure_a[0];
    const Vec3& qb = prep.closure_b[0];

    // L(alpha) q = q': both xy rows are trig-linear in alpha; pick the
    // better-conditioned one and keep the circle intersections that
    // back-substitute into the full constraint.
    const TrigLinearEq row1{q.x(), -q.y(), -qb.x()};
    const TrigLinearEq row2{q.y(), q.x(), -qb.y()};
    const double n1 = std::hypot(row1.a1, row1.a2);
    const double n2 = std::hypot(row2.a1, row2.a2);
    if (std::max(n1, n2) <= 1e-9 * (1.0 + prep.scale)) {
        throw Error(ErrorCode::DegenerateClosure,
                    "pairwise: closing point lies on the virtual axis");
    }
    const TrigLinearEq& best = n1 >= n2 ? row1 : row2;

    std::vector<Candidate> cands;
    for (const SinCosPair& p : solve_trig_linear(best)) {
        Candidate c;
        c.angles = {p.angle()};
        c.residual = closure_residual(c.angles, prep);
        if (c.residual <= tols.accept) cands.push_back(std::move(c));
    }
    return finalize(std::move(cands), prep, tols, max_solution_count(inst.kind));
}

// ---- 3-cycle ------------------------------------------------------------

SolutionSet solve_3cycle(const CycleInstance& inst, const SolverOptions& opts) {
    const Prepared prep = prepare(inst);
    const Tols tols = resolve_tols(opts, prep.scale);
    const Vec3& q = prep.closure_a[0];
    const Vec3& qb = prep.closure_b[0];

    const TrigVec fwd = forward_chain(prep, 2, q);
    const TrigVec inv = inverse_chain_tail(prep, 2, qb);
    // The z rows decouple: the forward one depends only on alpha, the
    // inverse one only on beta.
    const TrigPoly e_alpha = fwd[2] - TrigPoly::constant(2, qb.z());
    const TrigPoly e_beta = inv[2] - TrigPoly::constant(2, q.z());

    std::vector<double> alphas = trig_linear_roots(e_alpha, 0);
    std::vector<double> betas = trig_linear_roots(e_beta, 1);
    if (alphas.empty() && betas.empty()) {
        throw Error(ErrorCode::DegenerateClosure,
                    "3-cycle: both decoupled rows are degenerate");
    }
    // One degenerate row still leaves the partner angle known; recover the
    // missing angle from an in-plane row at each fixed partner value.
    if (alphas.empty()) {
        for (double b : betas)
            for (double a : trig_linear_roots(fwd[0].fix(1, b), 0))
                alphas.push_back(a);
    }
    if (betas.empty()) {
        for (double a : alphas)
            for (double b : trig_linear_roots(fwd[0].fix(0, a), 1))
                betas.push_back(b);
    }

    std::vector<Candidate> cands;
    for (double a : alphas) {
        for (double b : betas) {
            Candidate c;
            c.angles = {a, b};
            c.residual = closure_residual(c.angles, prep);
            if (c.residual <= tols.accept) cands.push_back(std::move(c));
        }
    }
    return finalize(std::move(cands), prep, tols, max_solution_count(inst.kind));
}

// ---- 4-cycle ------------------------------------------------------------

SolutionSet solve_4cycle(const CycleInstance& inst, const SolverOptions& opts) {
    const Prepared prep = prepare(inst);
    const Tols tols = resolve_tols(opts, prep.scale);
    const Vec3& q = prep.closure_a[0];
    const Vec3& qb = prep.closure_b[0];

    const TrigVec fwd = forward_chain(prep, 3, q);
    const TrigVec inv = inverse_chain_tail(prep, 3, qb);

    const TrigPoly e1 = fwd[2] - TrigPoly::constant(3, qb.z());  // alpha, beta
    const TrigPoly e2 = inv[2] - TrigPoly::constant(3, q.z());   // beta, gamma
    TrigPoly e3 = fwd[0] - TrigPoly::constant(3, qb.x());        // all three
    if (e3.derivative(0).max_abs_coeff() < 1e-8 * (1.0 + prep.scale))
        e3 = fwd[1] - TrigPoly::constant(3, qb.y());

    std::vector<double> betas;
    BivariatePoly res_f;  // Res_{t_alpha}(e1, e3) over (t_beta, t_gamma)
    try {
        res_f = sylvester_resultant(e1.to_trivariate(0, 1, 2),
                                    e3.to_trivariate(0, 1, 2));
        res_f.normalize();
        res_f.trim();
        const BivariatePoly e2_bi = e2.to_bivariate(1, 2);
        betas = sylvester_circle_roots(
            e2_bi.coeff_lists_in_v(), e2_bi.degree_u(),
            res_f.coeff_lists_in_v(), res_f.degree_u());
    } catch (const Error& err) {
        if (err.code() == ErrorCode::RankDeficient) {
            throw Error(ErrorCode::ResolverFallback,
                        std::string("4-cycle elimination is rank deficient: ") +
                            err.what());
        }
        throw;
    }

    const PolishSystem system({e1, e2, e3}, {0, 1, 2});
    std::vector<Candidate> cands;
    for (double beta : betas) {
        std::vector<double> gammas = trig_linear_roots(e2.fix(1, beta), 2);
        if (gammas.empty()) gammas = slice_circle_roots(res_f, beta);
        std::vector<double> alphas = trig_linear_roots(e1.fix(1, beta), 0);
        if (alphas.empty()) {
            for (double gamma : gammas)
                for (double a :
                     trig_linear_roots(e3.fix(1, beta).fix(2, gamma), 0))
                    alphas.push_back(a);
        }
        for (double gamma : gammas) {
            for (double alpha : alphas) {
                std::vector<double> angles = {alpha, beta, gamma};
                if (std::abs(e3.eval(angles)) > tols.prefilter) continue;
                if (!system.polish(angles, tols.variety)) continue;
                Candidate c;
                c.angles = angles;
                c.residual = closure_residual(angles, prep);
                if (c.residual <= tols.accept) cands.push_back(std::move(c));
            }
        }
    }
    return finalize(std::move(cands), prep, tols, max_solution_count(inst.kind));
}

// ---- 5-cycle ------------------------------------------------------------

SolutionSet solve_5cycle(const CycleInstance& inst, const SolverOptions& opts) {
    const Prepared prep = prepare(inst);
    const Tols tols = resolve_tols(opts, prep.scale);

    const TrigVec fwd1 = forward_chain(prep, 4, prep.closure_a[0]);
    const TrigVec fwd2 = forward_chain(prep, 4, prep.closure_a[1]);
    const TrigVec inv1 = inverse_chain_tail(prep, 4, prep.closure_b[0]);
    const TrigVec inv2 = inverse_chain_tail(prep, 4, prep.closure_b[1]);

    // n-1 = 4 chosen constraints: forward z rows drop theta_4, inverse z
    // rows drop theta_1. The two unused xy rows are enforced at verification.
    const TrigPoly e1 = fwd1[2] - TrigPoly::constant(4, prep.closure_b[0].z());
    const TrigPoly e2 = fwd2[2] - TrigPoly::constant(4, prep.closure_b[1].z());
    const TrigPoly e3 = inv1[2] - TrigPoly::constant(4, prep.closure_a[0].z());
    const TrigPoly e4 = inv2[2] - TrigPoly::constant(4, prep.closure_a[1].z());

    BivariatePoly p_res, q_res;  // reduced compatibility curves over (t_2, t_3)
    std::vector<double> theta2s;
    try {
        const auto xy = [](const Vec3& v) {
            return Eigen::Vector2d(v.x(), v.y());
        };
        p_res = zrow_compat(e1, e2, 0, 1, 2, xy(prep.closure_a[0]),
                            xy(prep.closure_a[1]));
        q_res = zrow_compat(e3, e4, 3, 1, 2, xy(prep.closure_b[0]),
                            xy(prep.closure_b[1]));
        p_res.normalize();
        q_res.normalize();
        p_res.trim();
        q_res.trim();
        theta2s = sylvester_circle_roots(
            p_res.coeff_lists_in_v(), p_res.degree_u(),
            q_res.coeff_lists_in_v(), q_res.degree_u());
    } catch (const Error& err) {
        if (err.code() == ErrorCode::RankDeficient) {
            throw Error(ErrorCode::ResolverFallback,
                        std::string("5-cycle elimination is rank deficient: ") +
                            err.what());
        }
        throw;
    }

    const bool dbg = getenv("CYCLEREG_DEBUG5") != nullptr;
    if (dbg) {
        fprintf(stderr, "[dbg] theta2s (%zu):", theta2s.size());
        for (double t : theta2s) fprintf(stderr, " %.6f", t);
        fprintf(stderr, "\n");
    }
    const PolishSystem system({e1, e2, e3, e4}, {0, 1, 2, 3});
    std::vector<Candidate> cands;
    for (double t2 : theta2s) {
        std::vector<double> theta3s = slice_circle_roots(p_res, t2);
        if (theta3s.empty()) theta3s = slice_circle_roots(q_res, t2);
        if (dbg) {
            fprintf(stderr, "[dbg] t2=%.6f theta3s (%zu):", t2, theta3s.size());
            for (double t : theta3s) fprintf(stderr, " %.6f", t);
            fprintf(stderr, "\n");
        }

        for (double t3 : theta3s) {
            const TrigPoly e1_23 = e1.fix(1, t2).fix(2, t3);
            const TrigPoly e3_23 = e3.fix(1, t2).fix(2, t3);

            std::vector<double> t1s = trig_linear_roots(e1_23, 0);
            if (t1s.empty())
                t1s = trig_linear_roots(e2.fix(1, t2).fix(2, t3), 0);
            std::vector<double> t4s = trig_linear_roots(e3_23, 3);
            if (t4s.empty())
                t4s = trig_linear_roots(e4.fix(1, t2).fix(2, t3), 3);

            for (double t1 : t1s) {
                if (std::abs(e2.eval({t1, t2, t3, 0.0})) > tols.prefilter) {
                    if (dbg) fprintf(stderr, "[dbg] drop e2 pre %g\n", e2.eval({t1, t2, t3, 0.0}));
                    continue;
                }
                for (double t4 : t4s) {
                    if (std::abs(e4.eval({0.0, t2, t3, t4})) > tols.prefilter) {
                        if (dbg) fprintf(stderr, "[dbg] drop e4 pre\n");
                        continue;
                    }
                    std::vector<double> angles = {t1, t2, t3, t4};
                    if (!system.polish(angles, tols.variety)) {
                        if (dbg) fprintf(stderr, "[dbg] drop polish %.3e\n", system.max_residual(angles));
                        continue;
                    }
                    Candidate c;
                    c.angles = angles;
                    c.residual = closure_residual(angles, prep);
                    if (c.residual <= tols.accept) cands.push_back(std::move(c));
                    else if (dbg) fprintf(stderr, "[dbg] drop accept %.3e\n", c.residual);
                }
            }
        }
    }
    return finalize(std::move(cands), prep, tols, max_solution_count(inst.kind));
}

// ---- planar solvers -----------------------------------------------------

SolutionSet solve_planar_pairwise(const CycleInstance& inst,
                                  const SolverOptions& opts) {
    const Prepared prep = prepare(inst);
    const Tols tols = resolve_tols(opts, prep.scale);
    const Vec3& q = prep.closure_a[0];
    const Vec3& qb = prep.closure_b[0];

    if (std::hypot(q.x(), q.y()) <= 1e-9 * (1.0 + prep.scale) ||
        std::hypot(qb.x(), qb.y()) <= 1e-9 * (1.0 + prep.scale)) {
        throw Error(ErrorCode::DegenerateClosure,
                    "planar pairwise: closing point coincides with the anchor "
                    "in the xy plane");
    }
    // z carries no unknown under planar motion: consistency gate only
    if (std::abs(q.z() - qb.z()) > tols.consistency) return {};

    const TrigLinearEq row1{q.x(), -q.y(), -qb.x()};
    const TrigLinearEq row2{q.y(), q.x(), -qb.y()};
    const TrigLinearEq& best =
        std::hypot(row1.a1, row1.a2) >= std::hypot(row2.a1, row2.a2) ? row1
                                                                     : row2;
    std::vector<Candidate> cands;
    for (const SinCosPair& p : solve_trig_linear(best)) {
        Candidate c;
        c.angles = {p.angle()};
        c.residual = closure_residual(c.angles, prep);
        if (c.residual <= tols.accept) cands.push_back(std::move(c));
    }
    return finalize(std::move(cands), prep, tols, max_solution_count(inst.kind));
}

SolutionSet solve_planar_3cycle(const CycleInstance& inst,
                                const SolverOptions& opts) {
    const Prepared prep = prepare(inst);
    const Tols tols = resolve_tols(opts, prep.scale);
    const Vec3& q = prep.closure_a[0];
    const Vec3& qb = prep.closure_b[0];

    const TrigVec fwd = forward_chain(prep, 2, q);
    // z row is constant under planar motion: consistency gate
    if (std::abs(fwd[2].eval({0.0, 0.0}) - qb.z()) > tols.consistency)
        return {};

    const TrigPoly e1 = fwd[0] - TrigPoly::constant(2, qb.x());
    const TrigPoly e2 = fwd[1] - TrigPoly::constant(2, qb.y());

    std::vector<double> betas;
    try {
        const BivariatePoly b1 = e1.to_bivariate(0, 1);
        const BivariatePoly b2 = e2.to_bivariate(0, 1);
        betas = sylvester_circle_roots(b1.coeff_lists_in_u(), b1.degree_v(),
                                       b2.coeff_lists_in_u(), b2.degree_v());
    } catch (const Error& err) {
        if (err.code() == ErrorCode::RankDeficient) {
            throw Error(
                ErrorCode::ResolverFallback,
                std::string("planar 3-cycle elimination is rank deficient: ") +
                    err.what());
        }
        throw;
    }

    const PolishSystem system({e1, e2}, {0, 1});
    std::vector<Candidate> cands;
    for (double beta : betas) {
        std::vector<double> alphas = trig_linear_roots(e1.fix(1, beta), 0);
        if (alphas.empty()) alphas = trig_linear_roots(e2.fix(1, beta), 0);
        for (double alpha : alphas) {
            std::vector<double> angles = {alpha, beta};
            if (std::abs(e2.eval(angles)) > tols.prefilter) continue;
            if (!system.polish(angles, tols.variety)) continue;
            Candidate c;
            c.angles = angles;
            c.residual = closure_residual(angles, prep);
            if (c.residual <= tols.accept) cands.push_back(std::move(c));
        }
    }
    return finalize(std::move(cands), prep, tols, max_solution_count(inst.kind));
}

SolutionSet solve_planar_4cycle(const CycleInstance& inst,
                                const SolverOptions& opts) {
    const Prepared prep = prepare(inst);
    const Tols tols = resolve_tols(opts, prep.scale);
    const Vec3& q = prep.closure_a[0];
    const Vec3& qb = prep.closure_b[0];

    const TrigVec fwd = forward_chain(prep, 3, q);

    SolutionSet set;
    set.under_determined = true;

    if (std::abs(fwd[2].eval({0.0, 0.0, 0.0}) - qb.z()) > tols.consistency)
        return set;  // inconsistent data: empty family

    // Under planar motion the closure z row carries no unknown, leaving two
    // equations in three angles: a one-parameter family, sampled over alpha.
    const TrigPoly e1 = fwd[0] - TrigPoly::constant(3, qb.x());
    const TrigPoly e2 = fwd[1] - TrigPoly::constant(3, qb.y());

    constexpr int kFamilySamples = 64;
    for (int k = 0; k < kFamilySamples; ++k) {
        const double alpha = -M_PI + 2.0 * M_PI * k / kFamilySamples;
        const TrigPoly e1_a = e1.fix(0, alpha);
        const TrigPoly e2_a = e2.fix(0, alpha);
        std::vector<double> gammas;
        try {
            const BivariatePoly b1 = e1_a.to_bivariate(1, 2);
            const BivariatePoly b2 = e2_a.to_bivariate(1, 2);
            gammas = sylvester_circle_roots(b1.coeff_lists_in_u(),
                                            b1.degree_v(),
                                            b2.coeff_lists_in_u(),
                                            b2.degree_v());
        } catch (const Error&) {
            continue;
        }
        const PolishSystem system({e1_a, e2_a}, {1, 2});
        std::vector<std::array<double, 3>> batch;
        for (double gamma : gammas) {
            std::vector<double> b_roots =
                trig_linear_roots(e1_a.fix(2, gamma), 1);
            if (b_roots.empty())
                b_roots = trig_linear_roots(e2_a.fix(2, gamma), 1);
            for (double beta : b_roots) {
                std::vector<double> angles = {alpha, beta, gamma};
                if (std::abs(e2_a.eval(angles)) > tols.prefilter) continue;
                if (!system.polish(angles, tols.variety)) continue;
                bool dup = false;
                for (const auto& b : batch) {
                    if (angle_distance(b[1], angles[1]) <= tols.dedup &&
                        angle_distance(b[2], angles[2]) <= tols.dedup) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) batch.push_back({alpha, angles[1], angles[2]});
            }
        }
        set.family.insert(set.family.end(), batch.begin(), batch.end());
    }
    return set;
}

SolutionSet solve_cycle(const CycleInstance& inst, const SolverOptions& opts) {
    switch (inst.kind) {
        case SolverKind::Pairwise: return solve_pairwise_minimal(inst, opts);
        case SolverKind::Cycle3: return solve_3cycle(inst, opts);
        case SolverKind::Cycle4: return solve_4cycle(inst, opts);
        case SolverKind::Cycle5: return solve_5cycle(inst, opts);
        case SolverKind::Planar2: return solve_planar_pairwise(inst, opts);
        case SolverKind::Planar3: return solve_planar_3cycle(inst, opts);
        case SolverKind::Planar4: return solve_planar_4cycle(inst, opts);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown solver kind");
}

// ---- Procrustes ---------------------------------------------------------

RigidTransform refine_procrustes(const std::vector<PointMatch>& matches) {
    if (matches.size() < 3) {
        throw Error(ErrorCode::InsufficientMatches,
                    "refine_procrustes: needs at least 3 matches, got " +
                        std::to_string(matches.size()));
    }
    const double n = static_cast<double>(matches.size());
    Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
    for (const PointMatch& m : matches) {
        ca += m.p_a;
        cb += m.p_b;
    }
    ca /= n;
    cb /= n;

    Mat3 cross = Mat3::Zero();
    Mat3 scatter = Mat3::Zero();
    for (const PointMatch& m : matches) {
        cross += (m.p_a - ca) * (m.p_b - cb).transpose();
        scatter += (m.p_a - ca) * (m.p_a - ca).transpose();
    }

    {
        Eigen::JacobiSVD<Mat3> scatter_svd(scatter);
        const double s0 = scatter_svd.singularValues()[0];
        const double s1 = scatter_svd.singularValues()[1];
        if (s1 <= 1e-12 * std::max(1.0, s0)) {
            throw Error(ErrorCode::DegenerateConfiguration,
                        "refine_procrustes: source points are collinear or "
                        "coincident");
        }
    }

    Eigen::JacobiSVD<Mat3> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 d = Mat3::Identity();
    d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant();
    RigidTransform out;
    out.rotation = svd.matrixV() * d * svd.matrixU().transpose();
    out.translation = cb - out.rotation * ca;
    return out;
}

}  // namespace cyclereg
