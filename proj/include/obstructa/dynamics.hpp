#ifndef OBSTRUCTA_DYNAMICS_HPP
#define OBSTRUCTA_DYNAMICS_HPP

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "obstructa/expr.hpp"
#include "obstructa/space.hpp"

namespace obstructa {

/// Autonomous vector field on a flat model manifold: one expression per
/// coordinate, over the coordinate names.
struct VectorField {
  SpacePtr space;
  std::vector<ScalarExpr> components;

  VectorField(SpacePtr s, std::vector<ScalarExpr> comps);

  std::vector<double> eval(std::span<const double> coords) const;
  std::vector<double> eval(const Point& p) const { return eval(p.coords()); }
};

struct Trajectory {
  SpacePtr space;
  std::vector<double> times;
  std::vector<Point> states;

  const Point& final_state() const { return states.back(); }
  double final_time() const { return times.back(); }

  /// CSV with header "t,<coord names>", one row per step.
  std::string to_csv() const;
};

/// Trajectory left the representable range; carries the last finite state.
class BlowupError : public std::runtime_error {
 public:
  BlowupError(double last_time, std::vector<double> last_state)
      : std::runtime_error("trajectory blow-up at t = " +
                           std::to_string(last_time)),
        last_time_(last_time),
        last_state_(std::move(last_state)) {}
  double last_time() const { return last_time_; }
  const std::vector<double>& last_state() const { return last_state_; }

 private:
  double last_time_;
  std::vector<double> last_state_;
};

/// Classical fixed-step RK4; Angle coordinates are wrapped after each
/// full step. The step is rounded so an integral number of uniform steps
/// lands exactly on T (always within h of the request).
Trajectory integrate(const VectorField& F, const Point& x0, double T,
                     double h);

struct AttractorEstimate {
  std::vector<Point> points;
  std::size_t dropped = 0;  // grid points whose trajectory blew up
  double t_max = 0.0;
  double spacing = 0.0;
};

/// Discrete approximation of the maximal asymptotically stable set inside
/// U: grid points whose distance to the forward image of the grid at
/// t_max stays below the grid spacing. The horizon t_max is reported, not
/// hidden; this certifies nothing beyond it.
AttractorEstimate attractor_estimate(const VectorField& F, const Region& U,
                                     std::size_t grid_n, double t_max,
                                     double h);

struct LyapunovCandidate {
  ScalarExpr V;  // V >= 0, with V = 0 defining the candidate attractor
};

struct LyapunovReport {
  double min_decay;  // largest (least negative) Lie derivative off V = 0
  bool pass;
  double min_value;  // smallest V seen; negative values void the check
  std::size_t samples;
};

/// Samples the Lie derivative L_F V over interior points; passes when it
/// is below -1e-12 wherever V > 0.
LyapunovReport lyapunov_check(const LyapunovCandidate& cand,
                              const VectorField& F, const Region& r,
                              std::size_t n, std::uint64_t seed = 0);

struct InvarianceReport {
  bool inward_ok;  // F points strictly inward at all boundary samples
  bool flow_ok;    // boundary points flow to the interior within t_probe
  double worst_inner_product;
  bool pass() const { return inward_ok && flow_ok; }
};

/// Both halves of strict positive invariance, reported separately: the
/// boundary sign condition and a finite-horizon flow probe.
InvarianceReport strict_invariance_check(const VectorField& F,
                                         const Region& S,
                                         std::size_t n_boundary,
                                         double t_probe, double h);

}  // namespace obstructa

#endif
