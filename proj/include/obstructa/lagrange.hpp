#ifndef OBSTRUCTA_LAGRANGE_HPP
#define OBSTRUCTA_LAGRANGE_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "obstructa/dynamics.hpp"
#include "obstructa/expr.hpp"
#include "obstructa/space.hpp"

namespace obstructa {

/// Dense matrix of expressions (mass and constraint matrices).
struct ExprMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<ScalarExpr> data;  // row-major

  ExprMatrix() = default;
  ExprMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), data(r * c) {}
  const ScalarExpr& at(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
  ScalarExpr& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }

  Eigen::MatrixXd eval(const VarAssignment& a) const;
};

/// The KKT solve for the constrained accelerations failed.
class KktError : public std::runtime_error {
 public:
  KktError(const std::string& what, double rcond)
      : std::runtime_error(what), rcond_(rcond) {}
  double rcond() const { return rcond_; }

 private:
  double rcond_;
};

class LagrangianSystem;

/// Position plus a velocity satisfying the Pfaffian constraints; the
/// residual |A(q) v| is checked at construction (tolerance 1e-8).
struct ConstrainedState {
  Point q;
  std::vector<double> v;
};

/// Piecewise-constant control schedule: values[i] applies on
/// [switch_times[i], switch_times[i+1]).
struct ControlSchedule {
  std::vector<double> switch_times;           // ascending, starts at 0
  std::vector<std::vector<double>> values;

  static ControlSchedule constant(std::vector<double> u);
  std::span<const double> at(double t) const;
};

/// Mechanical system with kinetic energy (1/2) v' M(q) v, potential U(q),
/// Pfaffian constraints A(q) v = 0, and control forces that are constant
/// covectors. Equations of motion are the Lagrange-d'Alembert equations
/// in multiplier form; the Coriolis/potential terms are derived from M
/// and U symbolically, so all drift is attributable to time
/// discretization.
class LagrangianSystem {
 public:
  LagrangianSystem(SpacePtr config_space, ExprMatrix mass_matrix,
                   ScalarExpr potential, ExprMatrix constraint_matrix,
                   std::vector<std::vector<double>> control_covectors);

  std::size_t dof() const { return space_->dimension(); }
  std::size_t constraint_count() const { return constraints_.rows; }
  std::size_t control_dim() const { return covectors_.size(); }
  const SpacePtr& space() const { return space_; }
  const ExprMatrix& mass_matrix() const { return mass_; }
  const ExprMatrix& constraint_matrix() const { return constraints_; }
  const ScalarExpr& potential() const { return potential_; }
  const std::vector<std::vector<double>>& control_covectors() const {
    return covectors_;
  }

  Eigen::MatrixXd mass_at(std::span<const double> q) const;
  Eigen::MatrixXd constraint_at(std::span<const double> q) const;
  /// Time derivative of A along the motion: (dA)_ij = sum_k dA_ij/dq_k v_k.
  Eigen::MatrixXd constraint_rate_at(std::span<const double> q,
                                     std::span<const double> v) const;
  /// Coriolis/centrifugal plus potential force, right-hand side of
  /// M(q) qdd = b(q, v) + F(u) + A' lambda.
  Eigen::VectorXd bias_at(std::span<const double> q,
                          std::span<const double> v) const;
  Eigen::VectorXd control_force(std::span<const double> u) const;

  double energy(std::span<const double> q, std::span<const double> v) const;

  ConstrainedState make_state(Point q, std::vector<double> v) const;

 private:
  VarAssignment bind(std::span<const double> q) const;

  SpacePtr space_;
  ExprMatrix mass_;
  ScalarExpr potential_;
  ExprMatrix constraints_;
  std::vector<std::vector<double>> covectors_;

  // symbolic derivatives, prepared once
  std::vector<ExprMatrix> mass_grad_;        // dM/dq_k
  std::vector<ExprMatrix> constraint_grad_;  // dA/dq_k
  std::vector<ScalarExpr> potential_grad_;   // dU/dq_i
};

/// True when the mass matrix is positive definite and the constraint
/// matrix has full row rank at every sample (thresholds 1e-10).
bool regularity_check(const LagrangianSystem& sys,
                      std::span<const Point> samples);

struct AccelResult {
  std::vector<double> qdd;
  std::vector<double> lambda;
  double constraint_residual;  // |A qdd + dA v|
  double solve_residual;       // KKT backsubstitution residual
};

/// Solve the multiplier system
///   M qdd = b(q, v) + F(u) + A' lambda,   A qdd = -dA v.
AccelResult constrained_accel(const LagrangianSystem& sys,
                              const ConstrainedState& s,
                              std::span<const double> u);

struct ConstrainedTrajectory {
  SpacePtr space;
  std::vector<double> times;
  std::vector<std::vector<double>> positions;
  std::vector<std::vector<double>> velocities;
  double max_constraint_residual = 0.0;
  double max_energy_mismatch = 0.0;

  /// CSV with header "t,<coords>,d<coords>".
  std::string to_csv() const;
};

/// RK4 on (q, v) with accelerations from the multiplier solve. Reports
/// the worst constraint residual |A(q) v| and the worst energy-balance
/// error |E(t) - E(0) - W(t)| with W the integrated control power.
/// `project_velocity` optionally re-projects v onto ker A(q) after each
/// step; this is a non-physical regularization, off by default.
ConstrainedTrajectory simulate_constrained(const LagrangianSystem& sys,
                                           const ConstrainedState& s0,
                                           const ControlSchedule& schedule,
                                           double T, double h,
                                           bool project_velocity = false);

struct DiskState {
  double x, y, phi, theta;      // angles wrapped into [0, 2*pi)
  double xd, yd, phid, thetad;
};

/// Closed-form reduced dynamics of the vertical rolling disk started from
/// rest at the origin: (I + m R^2) theta_dd = u_theta, J phi_dd = u_phi,
/// with the translation obtained by composite Simpson quadrature of
/// xd = R cos(phi) thetad, yd = R sin(phi) thetad. Independent of the
/// multiplier solve.
DiskState rolling_disk_oracle(double m, double I, double J, double R,
                              double u_theta, double u_phi, double T);

/// Configuration space SE(2) x S^1 with coordinates (x, y, phi, theta),
/// rolling constraints xd = R cos(phi) thetad, yd = R sin(phi) thetad,
/// and torque inputs (u_phi, u_theta).
LagrangianSystem make_rolling_disk(double m, double I, double J, double R);

/// True when Y(q) leaves the constraint distribution at every sample,
/// i.e. some row of A(q) Y(q) exceeds 1e-10 in magnitude. Throws if A
/// loses rank at a sample.
bool transversality_test(const ExprMatrix& constraint_matrix,
                         const VectorField& Y, std::span<const Point> samples);
bool transversality_test(const LagrangianSystem& sys, const VectorField& Y,
                         std::span<const Point> samples);

}  // namespace obstructa

#endif
