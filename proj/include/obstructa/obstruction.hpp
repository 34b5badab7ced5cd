#ifndef OBSTRUCTA_OBSTRUCTION_HPP
#define OBSTRUCTA_OBSTRUCTION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "obstructa/control_system.hpp"
#include "obstructa/report.hpp"
#include "obstructa/space.hpp"

namespace obstructa {

/// Knobs for the multi-start residual searches. Control bounds are
/// required whenever the system has inputs: the root search needs a
/// compact domain.
struct SearchOptions {
  std::size_t starts = 64;
  std::size_t max_iterations = 120;
  double solver_tol = 1e-8;
  std::uint64_t seed = 0;
  std::vector<Interval> control_bounds;  // one per control input
};

struct TargetResult {
  std::vector<double> target;
  double best_residual;
  std::vector<double> best_state;
  std::vector<double> best_control;
  bool hit;
};

struct BrockettReport {
  bool covered;
  double worst_residual;
  std::vector<TargetResult> results;
};

/// Axis-aligned grid of per_axis^dim targets over [-radius, radius]^dim,
/// filtered to |c| <= radius.
std::vector<std::vector<double>> target_grid(std::size_t dim, double radius,
                                             std::size_t per_axis);

/// Brockett image test: for every target c, search W x control box for
/// (x, u) with |f(x, u) - c| <= solver_tol. Failure to hit is a result
/// (recorded miss with the best residual found), not an error.
BrockettReport brockett_image_test(
    const ControlSystem& sys, const Region& W,
    std::span<const std::vector<double>> targets, const SearchOptions& opts);

/// Adversary intersection test: for each eps, minimize
/// |f(x, u) - X_eps(x)| over W x control box. A positive floor at every
/// eps combined with a nonzero chi of the target set refutes
/// stabilizability; an intersection refutes nothing beyond this family.
ObstructionReport adversary_intersection_test(
    const ControlSystem& sys, const AdversaryFamily& X, const Region& W,
    std::span<const double> eps_list, const SearchOptions& opts,
    std::optional<int> chi);

/// Safety test: region_euler_char(S) composed with the adversary
/// intersection test over S. chi = 0 or unavailable is Inconclusive no
/// matter what the residuals say.
ObstructionReport safety_test(const ControlSystem& sys, const Region& S,
                              const AdversaryFamily& X,
                              std::span<const double> eps_list,
                              const SearchOptions& opts);

/// Span condition for affine systems: where the drift is nonzero it must
/// escape span{Y, g_1..g_N}; where it vanishes, Y must escape
/// span{g_1..g_N}. Ranks via singular values above rank_tol.
bool affine_span_test(const ControlSystem& sys, const VectorField& Y,
                      std::span<const Point> samples, double rank_tol = 1e-8);

/// Assemble sub-test reports into a stabilizability verdict.
/// ObstructionFound requires a nonzero chi plus at least one positive
/// sub-test; NoObstruction is never emitted (these are necessary
/// conditions only).
ObstructionReport stabilizability_verdict(
    std::optional<int> chi, std::span<const ObstructionReport> tests);

/// Sub-report wrappers used when feeding boolean facts into the verdict.
ObstructionReport make_span_report(bool holds, std::size_t samples);
ObstructionReport make_transversality_report(bool holds,
                                             std::size_t samples);

}  // namespace obstructa

#endif
