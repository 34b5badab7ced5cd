#include "obstructa/control_system.hpp"

#include <algorithm>
#include <cmath>

#include "obstructa/num.hpp"

namespace obstructa {

ControlSystem::ControlSystem(SpacePtr state_space,
                             std::vector<std::string> control_names,
                             std::vector<ScalarExpr> dynamics,
                             std::optional<AffineParts> affine)
    : space_(std::move(state_space)),
      control_names_(std::move(control_names)),
      dynamics_(std::move(dynamics)),
      affine_(std::move(affine)) {
  if (dynamics_.size() != space_->dimension())
    throw std::invalid_argument("dynamics needs one expression per state "
                                "coordinate");
  for (const auto& cn : control_names_) {
    if (std::find(space_->names().begin(), space_->names().end(), cn) !=
        space_->names().end())
      throw std::invalid_argument("control name collides with coordinate: " +
                                  cn);
  }
  for (const auto& d : dynamics_) {
    for (const auto& v : d.free_variables()) {
      bool known =
          std::find(space_->names().begin(), space_->names().end(), v) !=
              space_->names().end() ||
          std::find(control_names_.begin(), control_names_.end(), v) !=
              control_names_.end();
      if (!known)
        throw std::invalid_argument("dynamics uses unknown variable: " + v);
    }
  }

  const std::size_t n = state_dim(), m = control_dim();
  jac_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    jac_[i].reserve(n + m);
    for (std::size_t j = 0; j < n; ++j)
      jac_[i].push_back(dynamics_[i].derivative(space_->name(j)));
    for (std::size_t j = 0; j < m; ++j)
      jac_[i].push_back(dynamics_[i].derivative(control_names_[j]));
  }

  if (affine_) {
    if (affine_->drift.components.size() != n)
      throw std::invalid_argument("affine drift dimension mismatch");
    if (affine_->control_fields.size() != m)
      throw std::invalid_argument("affine parts need one field per control");
    // Spot-check consistency: dynamics = F + sum g_i u_i at random draws.
    SplitMix64 rng(0x0b57ac7aULL);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> x(n), u(m);
      for (auto& v : x) v = rng.uniform(-2.0, 2.0);
      for (auto& v : u) v = rng.uniform(-2.0, 2.0);
      auto f = eval(x, u);
      auto fa = affine_->drift.eval(x);
      for (std::size_t j = 0; j < m; ++j) {
        auto g = affine_->control_fields[j].eval(x);
        for (std::size_t i = 0; i < n; ++i) fa[i] += g[i] * u[j];
      }
      for (std::size_t i = 0; i < n; ++i)
        if (std::fabs(f[i] - fa[i]) > 1e-12)
          throw std::invalid_argument(
              "affine decomposition disagrees with dynamics");
    }
  }
}

VarAssignment ControlSystem::bind(std::span<const double> x,
                                  std::span<const double> u) const {
  VarAssignment a;
  for (std::size_t i = 0; i < x.size(); ++i) a.set(space_->name(i), x[i]);
  for (std::size_t j = 0; j < u.size(); ++j) a.set(control_names_[j], u[j]);
  return a;
}

std::vector<double> ControlSystem::eval(std::span<const double> x,
                                        std::span<const double> u) const {
  VarAssignment a = bind(x, u);
  std::vector<double> out(dynamics_.size());
  for (std::size_t i = 0; i < dynamics_.size(); ++i)
    out[i] = dynamics_[i].eval(a);
  return out;
}

Eigen::MatrixXd ControlSystem::jacobian(std::span<const double> x,
                                        std::span<const double> u) const {
  VarAssignment a = bind(x, u);
  const std::size_t n = state_dim(), m = control_dim();
  Eigen::MatrixXd J(n, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n + m; ++j)
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          jac_[i][j].eval(a);
  return J;
}

VectorField ControlSystem::close_loop(
    const std::vector<ScalarExpr>& controls) const {
  if (controls.size() != control_dim())
    throw std::invalid_argument("need one control expression per input");
  std::map<std::string, ScalarExpr> repl;
  for (std::size_t j = 0; j < controls.size(); ++j) {
    for (const auto& v : controls[j].free_variables())
      if (std::find(space_->names().begin(), space_->names().end(), v) ==
          space_->names().end())
        throw std::invalid_argument(
            "control law must depend on state only, got: " + v);
    repl.emplace(control_names_[j], controls[j]);
  }
  std::vector<ScalarExpr> closed;
  closed.reserve(dynamics_.size());
  for (const auto& d : dynamics_) closed.push_back(d.substitute(repl));
  return VectorField(space_, std::move(closed));
}

VectorField ControlSystem::zero_control_section() const {
  std::vector<ScalarExpr> zeros(control_dim(), ScalarExpr::constant(0.0));
  return close_loop(zeros);
}

// --- AdversaryFamily ----------------------------------------------------

AdversaryFamily::AdversaryFamily(SpacePtr space,
                                 std::vector<ScalarExpr> components)
    : space_(std::move(space)), components_(std::move(components)) {
  if (components_.size() != space_->dimension())
    throw std::invalid_argument("adversary needs one component per "
                                "coordinate");
  for (const auto& c : components_) {
    for (const auto& v : c.free_variables()) {
      if (v == "eps") continue;
      if (std::find(space_->names().begin(), space_->names().end(), v) ==
          space_->names().end())
        throw std::invalid_argument("adversary uses unknown variable: " + v);
    }
  }
  jac_.resize(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i)
    for (const auto& name : space_->names())
      jac_[i].push_back(components_[i].derivative(name));
}

std::vector<double> AdversaryFamily::eval(std::span<const double> x,
                                          double eps) const {
  VarAssignment a;
  for (std::size_t i = 0; i < x.size(); ++i) a.set(space_->name(i), x[i]);
  a.set("eps", eps);
  std::vector<double> out(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i)
    out[i] = components_[i].eval(a);
  return out;
}

Eigen::MatrixXd AdversaryFamily::state_jacobian(std::span<const double> x,
                                                double eps) const {
  VarAssignment a;
  for (std::size_t i = 0; i < x.size(); ++i) a.set(space_->name(i), x[i]);
  a.set("eps", eps);
  const std::size_t n = components_.size();
  Eigen::MatrixXd J(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          jac_[i][j].eval(a);
  return J;
}

AdversaryFamily::VanishingCheck AdversaryFamily::check_vanishing(
    std::span<const Point> samples, std::span<const double> eps_list) const {
  if (eps_list.empty() || samples.empty()) return {false, 0.0};
  auto sup = [&](double eps) {
    double m = 0.0;
    for (const auto& p : samples) {
      auto v = eval(p.coords(), eps);
      double norm2 = 0.0;
      for (double c : v) norm2 += sqr(c);
      m = std::max(m, std::sqrt(norm2));
    }
    return m;
  };
  // Calibrate C at the largest eps, then require max |X_eps| <= 2 C eps
  // for the rest of the sweep.
  double eps0 = *std::max_element(eps_list.begin(), eps_list.end());
  double c = sup(eps0) / eps0;
  for (double eps : eps_list) {
    if (!(eps > 0.0)) return {false, c};
    if (sup(eps) > 2.0 * std::max(c, 1e-300) * eps) return {false, c};
  }
  return {true, c};
}

}  // namespace obstructa
