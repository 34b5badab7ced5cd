#ifndef OBSTRUCTA_CONTROL_SYSTEM_HPP
#define OBSTRUCTA_CONTROL_SYSTEM_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "obstructa/dynamics.hpp"
#include "obstructa/expr.hpp"
#include "obstructa/space.hpp"

namespace obstructa {

/// Optional affine decomposition xdot = F(x) + sum_i g_i(x) u_i. When
/// supplied it must agree with the plain dynamics expressions; agreement
/// is spot-checked numerically at construction.
struct AffineParts {
  VectorField drift;
  std::vector<VectorField> control_fields;
};

/// Control system xdot = f(x, u) on a flat model manifold, given by one
/// expression per state coordinate over the state and control variables.
class ControlSystem {
 public:
  ControlSystem(SpacePtr state_space, std::vector<std::string> control_names,
                std::vector<ScalarExpr> dynamics,
                std::optional<AffineParts> affine = std::nullopt);

  std::size_t state_dim() const { return space_->dimension(); }
  std::size_t control_dim() const { return control_names_.size(); }
  const SpacePtr& space() const { return space_; }
  const std::vector<std::string>& control_names() const {
    return control_names_;
  }
  const std::vector<ScalarExpr>& dynamics() const { return dynamics_; }
  const std::optional<AffineParts>& affine() const { return affine_; }

  std::vector<double> eval(std::span<const double> x,
                           std::span<const double> u) const;

  /// Jacobian of f with respect to (x, u), shape n x (n + m); entries are
  /// exact symbolic derivatives evaluated at the point.
  Eigen::MatrixXd jacobian(std::span<const double> x,
                           std::span<const double> u) const;

  /// The closed-loop vector field obtained by substituting expressions
  /// (over the state variables) for the controls.
  VectorField close_loop(const std::vector<ScalarExpr>& controls) const;

  /// State-only section u = 0 (the field itself for systems without
  /// control).
  VectorField zero_control_section() const;

 private:
  VarAssignment bind(std::span<const double> x,
                     std::span<const double> u) const;

  SpacePtr space_;
  std::vector<std::string> control_names_;
  std::vector<ScalarExpr> dynamics_;
  std::optional<AffineParts> affine_;
  std::vector<std::vector<ScalarExpr>> jac_;  // row-major n x (n+m)
};

/// Family of adversary vector fields X_eps over the state space; the
/// templates are expressions in the state variables plus the parameter
/// "eps" and must vanish uniformly on compacts as eps -> 0.
class AdversaryFamily {
 public:
  AdversaryFamily(SpacePtr space, std::vector<ScalarExpr> components);

  const SpacePtr& space() const { return space_; }
  const std::vector<ScalarExpr>& components() const { return components_; }

  std::vector<double> eval(std::span<const double> x, double eps) const;
  Eigen::MatrixXd state_jacobian(std::span<const double> x,
                                 double eps) const;

  struct VanishingCheck {
    bool ok;
    double scale;  // empirical C with max |X_eps| <= C * eps on the samples
  };
  /// Numeric verification that max |X_eps| over the samples is bounded by
  /// C * eps across the provided eps values.
  VanishingCheck check_vanishing(std::span<const Point> samples,
                                 std::span<const double> eps_list) const;

 private:
  SpacePtr space_;
  std::vector<ScalarExpr> components_;
  std::vector<std::vector<ScalarExpr>> jac_;  // d components / d state
};

}  // namespace obstructa

#endif
