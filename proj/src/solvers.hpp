#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

#include "geometry.hpp"

namespace cyclereg {

struct PointMatch {
    int scan_a = 0;
    int scan_b = 0;
    Vec3 p_a = Vec3::Zero();
    Vec3 p_b = Vec3::Zero();
};

enum class SolverKind {
    Pairwise,
    Cycle3,
    Cycle4,
    Cycle5,
    Planar2,
    Planar3,
    Planar4,
};

int cycle_length(SolverKind kind);
bool is_planar(SolverKind kind);
int minimal_match_count(SolverKind kind);
int closure_match_count(SolverKind kind);
int max_solution_count(SolverKind kind);
const char* solver_kind_name(SolverKind kind);
std::optional<SolverKind> solver_kind_from_name(std::string_view name);

// A minimal problem: n scans in a loop, the adjacent matches that pin the
// virtual axes (2 per edge, 1 when planar) and the closure match(es)
// coupling the first and last scan. `adjacent` is edge-major.
struct CycleInstance {
    SolverKind kind = SolverKind::Pairwise;
    int n = 2;
    bool planar = false;
    std::vector<int> scans;
    std::vector<PointMatch> adjacent;
    std::vector<PointMatch> closure;
};

// Validates the exact minimal layout (counts, pair structure, chain
// connectivity, finite coordinates) and orients every match along the cycle.
// Throws InvalidArgument describing the expected layout on any mismatch.
CycleInstance make_cycle_instance(SolverKind kind,
                                  const std::vector<PointMatch>& matches);

struct CycleSolution {
    std::vector<double> angles;  // theta_1..theta_{n-1}
    std::vector<RigidTransform> edge_transforms;
    double residual = 0.0;  // max closure residual, scene units
};

struct SolutionSet {
    std::vector<CycleSolution> solutions;
    // Planar 4-cycle: the closure constraint leaves a one-parameter family;
    // `family` samples it for diagnostics instead of pretending isolation.
    bool under_determined = false;
    std::vector<std::array<double, 3>> family;
};

struct SolverOptions {
    // Negative values resolve to scale-aware defaults:
    //   accept_tol      1e-6 * (1 + coordinate scale)
    //   consistency_tol accept_tol
    //   variety_tol     1e-7 * (1 + coordinate scale)
    double accept_tol = -1.0;
    double consistency_tol = -1.0;
    double variety_tol = -1.0;
    double dedup_tol = 1e-6;  // radians, max-norm over the angle tuple
};

SolutionSet solve_pairwise_minimal(const CycleInstance& inst,
                                   const SolverOptions& opts = {});
SolutionSet solve_3cycle(const CycleInstance& inst,
                         const SolverOptions& opts = {});
SolutionSet solve_4cycle(const CycleInstance& inst,
                         const SolverOptions& opts = {});
SolutionSet solve_5cycle(const CycleInstance& inst,
                         const SolverOptions& opts = {});
SolutionSet solve_planar_pairwise(const CycleInstance& inst,
                                  const SolverOptions& opts = {});
SolutionSet solve_planar_3cycle(const CycleInstance& inst,
                                const SolverOptions& opts = {});
SolutionSet solve_planar_4cycle(const CycleInstance& inst,
                                const SolverOptions& opts = {});

SolutionSet solve_cycle(const CycleInstance& inst,
                        const SolverOptions& opts = {});

// Predefined transforms for the planar case: pure translations sending the
// anchor points to the origin (rotation axis fixed to z).
PredefinedPair make_predefined_planar(const PointMatch& match);

// Edge i transform = g_i^-1 * rot_z(theta_i) * h_i.
std::vector<RigidTransform> recover_edge_transforms(
    const std::vector<double>& angles, const std::vector<PredefinedPair>& pairs);

// Least-squares rigid alignment (orthogonal factorization of the
// cross-covariance with reflection fix). Needs >= 3 non-collinear source
// points; throws DegenerateConfiguration otherwise.
RigidTransform refine_procrustes(const std::vector<PointMatch>& matches);

}  // namespace cyclereg
