#include "obstructa/lagrange.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "obstructa/num.hpp"

namespace obstructa {

Eigen::MatrixXd ExprMatrix::eval(const VarAssignment& a) const {
  Eigen::MatrixXd out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          at(r, c).eval(a);
  return out;
}

ControlSchedule ControlSchedule::constant(std::vector<double> u) {
  ControlSchedule s;
  s.switch_times = {0.0};
  s.values = {std::move(u)};
  return s;
}

std::span<const double> ControlSchedule::at(double t) const {
  if (values.empty()) throw std::invalid_argument("empty control schedule");
  std::size_t i = values.size() - 1;
  while (i > 0 && switch_times[i] > t) --i;
  return values[i];
}

// --- LagrangianSystem ---------------------------------------------------

LagrangianSystem::LagrangianSystem(
    SpacePtr config_space, ExprMatrix mass_matrix, ScalarExpr potential,
    ExprMatrix constraint_matrix,
    std::vector<std::vector<double>> control_covectors)
    : space_(std::move(config_space)),
      mass_(std::move(mass_matrix)),
      potential_(std::move(potential)),
      constraints_(std::move(constraint_matrix)),
      covectors_(std::move(control_covectors)) {
  const std::size_t n = space_->dimension();
  if (mass_.rows != n || mass_.cols != n)
    throw std::invalid_argument("mass matrix must be n x n");
  if (constraints_.rows >= n && constraints_.rows != 0)
    throw std::invalid_argument("constraint rank must be below dof");
  if (constraints_.rows > 0 && constraints_.cols != n)
    throw std::invalid_argument("constraint matrix must be k x n");
  for (const auto& g : covectors_)
    if (g.size() != n)
      throw std::invalid_argument("control covector dimension mismatch");

  mass_grad_.reserve(n);
  constraint_grad_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::string& qk = space_->name(k);
    ExprMatrix dm(mass_.rows, mass_.cols);
    for (std::size_t i = 0; i < mass_.rows; ++i)
      for (std::size_t j = 0; j < mass_.cols; ++j)
        dm.at(i, j) = mass_.at(i, j).derivative(qk);
    mass_grad_.push_back(std::move(dm));

    ExprMatrix da(constraints_.rows, constraints_.cols);
    for (std::size_t i = 0; i < constraints_.rows; ++i)
      for (std::size_t j = 0; j < constraints_.cols; ++j)
        da.at(i, j) = constraints_.at(i, j).derivative(qk);
    constraint_grad_.push_back(std::move(da));

    potential_grad_.push_back(potential_.derivative(qk));
  }
}

VarAssignment LagrangianSystem::bind(std::span<const double> q) const {
  VarAssignment a;
  for (std::size_t i = 0; i < q.size(); ++i) a.set(space_->name(i), q[i]);
  return a;
}

Eigen::MatrixXd LagrangianSystem::mass_at(std::span<const double> q) const {
  return mass_.eval(bind(q));
}

Eigen::MatrixXd LagrangianSystem::constraint_at(
    std::span<const double> q) const {
  return constraints_.eval(bind(q));
}

Eigen::MatrixXd LagrangianSystem::constraint_rate_at(
    std::span<const double> q, std::span<const double> v) const {
  const std::size_t n = dof(), k = constraint_count();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(k, n);
  VarAssignment a = bind(q);
  for (std::size_t d = 0; d < n; ++d) {
    if (v[d] == 0.0) continue;
    out += v[d] * constraint_grad_[d].eval(a);
  }
  return out;
}

Eigen::VectorXd LagrangianSystem::bias_at(std::span<const double> q,
                                          std::span<const double> v) const {
  // b_i = -sum_{j,k} (dM_ij/dq_k - (1/2) dM_jk/dq_i) v_j v_k - dU/dq_i
  const std::size_t n = dof();
  VarAssignment a = bind(q);
  std::vector<Eigen::MatrixXd> dM(n);
  for (std::size_t kk = 0; kk < n; ++kk) dM[kk] = mass_grad_[kk].eval(a);

  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (v[j] == 0.0) continue;
      for (std::size_t kk = 0; kk < n; ++kk) {
        if (v[kk] == 0.0) continue;
        double term = dM[kk](static_cast<Eigen::Index>(i),
                             static_cast<Eigen::Index>(j)) -
                      0.5 * dM[i](static_cast<Eigen::Index>(j),
                                  static_cast<Eigen::Index>(kk));
        acc += term * v[j] * v[kk];
      }
    }
    b(static_cast<Eigen::Index>(i)) = -acc - potential_grad_[i].eval(a);
  }
  return b;
}

Eigen::VectorXd LagrangianSystem::control_force(
    std::span<const double> u) const {
  if (u.size() != covectors_.size())
    throw std::invalid_argument("control vector dimension mismatch");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(dof());
  for (std::size_t j = 0; j < covectors_.size(); ++j)
    for (std::size_t i = 0; i < covectors_[j].size(); ++i)
      f(static_cast<Eigen::Index>(i)) += u[j] * covectors_[j][i];
  return f;
}

double LagrangianSystem::energy(std::span<const double> q,
                                std::span<const double> v) const {
  Eigen::Map<const Eigen::VectorXd> vv(v.data(),
                                       static_cast<Eigen::Index>(v.size()));
  return 0.5 * vv.dot(mass_at(q) * vv) + potential_.eval(bind(q));
}

ConstrainedState LagrangianSystem::make_state(Point q,
                                              std::vector<double> v) const {
  if (v.size() != dof())
    throw std::invalid_argument("velocity dimension mismatch");
  if (constraint_count() > 0) {
    Eigen::Map<const Eigen::VectorXd> vv(
        v.data(), static_cast<Eigen::Index>(v.size()));
    double res = (constraint_at(q.coords()) * vv).norm();
    if (res > 1e-8)
      throw std::invalid_argument("velocity violates constraints: |A v| = " +
                                  std::to_string(res));
  }
  return ConstrainedState{std::move(q), std::move(v)};
}

bool regularity_check(const LagrangianSystem& sys,
                      std::span<const Point> samples) {
  constexpr double kTol = 1e-10;
  for (const auto& p : samples) {
    Eigen::MatrixXd m = sys.mass_at(p.coords());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
    if (eig.info() != Eigen::Success ||
        eig.eigenvalues().minCoeff() <= kTol)
      return false;
    if (sys.constraint_count() > 0) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.constraint_at(p.coords()));
      std::size_t rank = 0;
      for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > kTol) ++rank;
      if (rank != sys.constraint_count()) return false;
    }
  }
  return true;
}

namespace {

struct RawAccel {
  Eigen::VectorXd qdd;
  Eigen::VectorXd lambda;
  double solve_residual;
};

// Accelerations without the constrained-state validation; used both by
// the public entry point and inside RK4 stages.
RawAccel accel_raw(const LagrangianSystem& sys, std::span<const double> q,
                   std::span<const double> v, std::span<const double> u) {
  const std::size_t n = sys.dof(), k = sys.constraint_count();
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  const Eigen::Index ki = static_cast<Eigen::Index>(k);

  Eigen::MatrixXd m = sys.mass_at(q);
  Eigen::VectorXd rhs_top = sys.bias_at(q, v) + sys.control_force(u);

  if (k == 0) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible())
      throw KktError("singular mass matrix", lu.rcond());
    Eigen::VectorXd qdd = lu.solve(rhs_top);
    return {qdd, Eigen::VectorXd::Zero(0), (m * qdd - rhs_top).norm()};
  }

  Eigen::MatrixXd a = sys.constraint_at(q);
  Eigen::MatrixXd adot = sys.constraint_rate_at(q, v);
  Eigen::Map<const Eigen::VectorXd> vv(v.data(), ni);

  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(ni + ki, ni + ki);
  kkt.topLeftCorner(ni, ni) = m;
  kkt.topRightCorner(ni, ki) = -a.transpose();
  kkt.bottomLeftCorner(ki, ni) = a;
  Eigen::VectorXd rhs(ni + ki);
  rhs.head(ni) = rhs_top;
  rhs.tail(ki) = -(adot * vv);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible())
    throw KktError("singular KKT matrix in multiplier solve", lu.rcond());
  Eigen::VectorXd sol = lu.solve(rhs);
  double res = (kkt * sol - rhs).norm();
  return {sol.head(ni), sol.tail(ki), res};
}

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace

AccelResult constrained_accel(const LagrangianSystem& sys,
                              const ConstrainedState& s,
                              std::span<const double> u) {
  RawAccel raw = accel_raw(sys, s.q.coords(), s.v, u);
  const std::size_t n = sys.dof(), k = sys.constraint_count();

  double cres = 0.0;
  if (k > 0) {
    Eigen::MatrixXd a = sys.constraint_at(s.q.coords());
    Eigen::MatrixXd adot = sys.constraint_rate_at(s.q.coords(), s.v);
    Eigen::Map<const Eigen::VectorXd> vv(
        s.v.data(), static_cast<Eigen::Index>(s.v.size()));
    cres = (a * raw.qdd + adot * vv).norm();
    if (cres > 1e-10)
      throw KktError("acceleration violates differentiated constraints",
                     cres);
  }

  AccelResult out;
  out.qdd.assign(raw.qdd.data(), raw.qdd.data() + n);
  out.lambda.assign(raw.lambda.data(), raw.lambda.data() + k);
  out.constraint_residual = cres;
  out.solve_residual = raw.solve_residual;
  return out;
}

std::string ConstrainedTrajectory::to_csv() const {
  std::string out = "t";
  for (const auto& n : space->names()) {
    out += ',';
    out += n;
  }
  for (const auto& n : space->names()) {
    out += ",d";
    out += n;
  }
  out += '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    out += format_double(times[k]);
    for (double c : positions[k]) {
      out += ',';
      out += format_double(c);
    }
    for (double c : velocities[k]) {
      out += ',';
      out += format_double(c);
    }
    out += '\n';
  }
  return out;
}

ConstrainedTrajectory simulate_constrained(const LagrangianSystem& sys,
                                           const ConstrainedState& s0,
                                           const ControlSchedule& schedule,
                                           double T, double h,
                                           bool project_velocity) {
  if (!(T > 0.0) || !(h > 0.0) || h > T)
    throw std::invalid_argument("simulate requires 0 < h <= T");
  const std::size_t n = sys.dof();
  const Eigen::Index ni = static_cast<Eigen::Index>(n);

  // state y = (q, v, W): the control work W rides along in the same
  // stepper so the energy balance is checked at integrator accuracy
  std::vector<double> q(s0.q.coords().begin(), s0.q.coords().end());
  std::vector<double> v = s0.v;
  double work = 0.0;
  const double e0 = sys.energy(q, v);

  ConstrainedTrajectory traj;
  traj.space = sys.space();
  traj.times.push_back(0.0);
  traj.positions.push_back(q);
  traj.velocities.push_back(v);

  // zero-order hold: the control is sampled once per step at the step's
  // start, so schedule switches aligned with step boundaries are exact
  auto deriv = [&](const std::vector<double>& qq,
                   const std::vector<double>& vv,
                   std::span<const double> u, std::vector<double>& dq,
                   std::vector<double>& dv, double& dw) {
    RawAccel acc = accel_raw(sys, qq, vv, u);
    dq = vv;
    dv.assign(acc.qdd.data(), acc.qdd.data() + n);
    Eigen::VectorXd f = sys.control_force(u);
    dw = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      dw += f(static_cast<Eigen::Index>(i)) * vv[i];
  };

  const std::size_t steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / h)));
  const double dt = T / static_cast<double>(steps);
  std::vector<double> k1q, k1v, k2q, k2v, k3q, k3v, k4q, k4v;
  double k1w, k2w, k3w, k4w;
  std::vector<double> tq(n), tv(n);

  for (std::size_t step = 1; step <= steps; ++step) {
    const double t = static_cast<double>(step - 1) * dt;
    auto u = schedule.at(t);
    deriv(q, v, u, k1q, k1v, k1w);
    for (std::size_t i = 0; i < n; ++i) {
      tq[i] = q[i] + 0.5 * dt * k1q[i];
      tv[i] = v[i] + 0.5 * dt * k1v[i];
    }
    deriv(tq, tv, u, k2q, k2v, k2w);
    for (std::size_t i = 0; i < n; ++i) {
      tq[i] = q[i] + 0.5 * dt * k2q[i];
      tv[i] = v[i] + 0.5 * dt * k2v[i];
    }
    deriv(tq, tv, u, k3q, k3v, k3w);
    for (std::size_t i = 0; i < n; ++i) {
      tq[i] = q[i] + dt * k3q[i];
      tv[i] = v[i] + dt * k3v[i];
    }
    deriv(tq, tv, u, k4q, k4v, k4w);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] += dt / 6.0 * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
      v[i] += dt / 6.0 * (k1v[i] + 2.0 * k2v[i] + 2.0 * k3v[i] + k4v[i]);
    }
    work += dt / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);

    for (double c : q)
      if (!std::isfinite(c)) throw BlowupError(traj.times.back(), q);
    for (double c : v)
      if (!std::isfinite(c)) throw BlowupError(traj.times.back(), v);

    q = sys.space()->canonicalize(std::move(q));

    if (project_velocity && sys.constraint_count() > 0) {
      // v <- v - M^-1 A' (A M^-1 A')^-1 A v  (mass-weighted projection)
      Eigen::MatrixXd m = sys.mass_at(q);
      Eigen::MatrixXd a = sys.constraint_at(q);
      Eigen::Map<Eigen::VectorXd> vv(v.data(), ni);
      Eigen::MatrixXd minv_at = m.ldlt().solve(a.transpose());
      Eigen::VectorXd lam =
          (a * minv_at).ldlt().solve(a * vv);
      vv -= minv_at * lam;
    }

    if (sys.constraint_count() > 0) {
      Eigen::MatrixXd a = sys.constraint_at(q);
      Eigen::Map<const Eigen::VectorXd> vv(v.data(), ni);
      traj.max_constraint_residual =
          std::max(traj.max_constraint_residual, (a * vv).norm());
    }
    traj.max_energy_mismatch =
        std::max(traj.max_energy_mismatch,
                 std::fabs(sys.energy(q, v) - e0 - work));

    traj.times.push_back(static_cast<double>(step) * dt);
    traj.positions.push_back(q);
    traj.velocities.push_back(v);
  }
  return traj;
}

DiskState rolling_disk_oracle(double m, double I, double J, double R,
                              double u_theta, double u_phi, double T) {
  if (!(m > 0.0 && I > 0.0 && J > 0.0 && R > 0.0))
    throw std::invalid_argument("disk parameters must be positive");
  const double alpha = u_theta / (I + m * R * R);  // theta_dd
  const double beta = u_phi / J;                   // phi_dd

  // x(T) = int_0^T R cos(beta s^2 / 2) alpha s ds, and likewise y with sin
  auto integrand = [&](double s, bool is_x) {
    double phi = 0.5 * beta * s * s;
    double td = alpha * s;
    return R * (is_x ? std::cos(phi) : std::sin(phi)) * td;
  };
  auto simpson = [&](bool is_x) {
    const std::size_t n = 1u << 15;
    const double dh = T / static_cast<double>(n);
    double acc = integrand(0.0, is_x) + integrand(T, is_x);
    for (std::size_t i = 1; i < n; ++i) {
      double s = dh * static_cast<double>(i);
      acc += integrand(s, is_x) * (i % 2 == 1 ? 4.0 : 2.0);
    }
    return acc * dh / 3.0;
  };

  DiskState out{};
  if (T == 0.0) return out;
  out.theta = wrap_angle(0.5 * alpha * T * T);
  out.phi = wrap_angle(0.5 * beta * T * T);
  out.thetad = alpha * T;
  out.phid = beta * T;
  out.x = simpson(true);
  out.y = simpson(false);
  out.xd = R * std::cos(0.5 * beta * T * T) * out.thetad;
  out.yd = R * std::sin(0.5 * beta * T * T) * out.thetad;
  return out;
}

LagrangianSystem make_rolling_disk(double m, double I, double J, double R) {
  auto space = ModelSpace::make({{"x", FactorKind::Real},
                                 {"y", FactorKind::Real},
                                 {"phi", FactorKind::Angle},
                                 {"theta", FactorKind::Angle}});
  ExprMatrix mass(4, 4);
  mass.at(0, 0) = ScalarExpr::constant(m);
  mass.at(1, 1) = ScalarExpr::constant(m);
  mass.at(2, 2) = ScalarExpr::constant(J);
  mass.at(3, 3) = ScalarExpr::constant(I);

  ExprMatrix a(2, 4);
  a.at(0, 0) = ScalarExpr::constant(1.0);
  a.at(0, 3) = -(ScalarExpr::constant(R) * cos(ScalarExpr::variable("phi")));
  a.at(1, 1) = ScalarExpr::constant(1.0);
  a.at(1, 3) = -(ScalarExpr::constant(R) * sin(ScalarExpr::variable("phi")));

  // torque inputs about the steering and rolling angles
  std::vector<std::vector<double>> covectors = {{0, 0, 1, 0}, {0, 0, 0, 1}};

  return LagrangianSystem(space, std::move(mass), ScalarExpr::constant(0.0),
                          std::move(a), std::move(covectors));
}

bool transversality_test(const ExprMatrix& constraint_matrix,
                         const VectorField& Y,
                         std::span<const Point> samples) {
  constexpr double kTol = 1e-10;
  for (const auto& p : samples) {
    VarAssignment a = p.assignment();
    Eigen::MatrixXd am = constraint_matrix.eval(a);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(am);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > kTol) ++rank;
    if (rank != constraint_matrix.rows)
      throw std::invalid_argument(
          "constraint matrix loses rank at a sample");
    auto y = Y.eval(p);
    Eigen::Map<const Eigen::VectorXd> yv(
        y.data(), static_cast<Eigen::Index>(y.size()));
    if ((am * yv).lpNorm<Eigen::Infinity>() <= kTol) return false;
  }
  return true;
}

bool transversality_test(const LagrangianSystem& sys, const VectorField& Y,
                         std::span<const Point> samples) {
  return transversality_test(sys.constraint_matrix(), Y, samples);
}

}  // namespace obstructa
