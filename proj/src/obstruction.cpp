#include "obstructa/obstruction.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "obstructa/num.hpp"
#include "obstructa/topology.hpp"

namespace obstructa {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

// Project the state part back into the region's base shape (box clamp or
// radial clamp). Obstacles and implicit constraints are not projected;
// minimizing over the slightly larger set only lowers the reported floor,
// which is the conservative direction for an obstruction claim. Hits are
// re-checked for containment before they count.
void project_state(const Region& W, std::span<double> x) {
  const auto real_idx = W.space()->real_indices();
  switch (W.base_kind()) {
    case Region::BaseKind::Box: {
      const auto& ivs = *W.box_base();
      for (std::size_t i = 0; i < real_idx.size(); ++i)
        x[real_idx[i]] = std::clamp(x[real_idx[i]], ivs[i].lo, ivs[i].hi);
      break;
    }
    case Region::BaseKind::Ball: {
      const auto& b = *W.ball_base();
      double d2 = 0.0;
      for (std::size_t i = 0; i < real_idx.size(); ++i)
        d2 += sqr(x[real_idx[i]] - b.center[i]);
      double d = std::sqrt(d2);
      if (d > b.radius && d > 0.0) {
        double s = b.radius / d;
        for (std::size_t i = 0; i < real_idx.size(); ++i)
          x[real_idx[i]] = b.center[i] + s * (x[real_idx[i]] - b.center[i]);
      }
      break;
    }
    case Region::BaseKind::Annulus: {
      const auto& a = *W.annulus_base();
      double d2 = 0.0;
      for (std::size_t i = 0; i < 2; ++i)
        d2 += sqr(x[real_idx[i]] - a.center[i]);
      double d = std::sqrt(d2);
      double target = std::clamp(d, a.inner, a.outer);
      if (d > 0.0 && target != d) {
        double s = target / d;
        for (std::size_t i = 0; i < 2; ++i)
          x[real_idx[i]] = a.center[i] + s * (x[real_idx[i]] - a.center[i]);
      }
      break;
    }
  }
  const auto bounds = W.chart_bounds();
  for (auto ai : W.space()->angle_indices())
    x[ai] = std::clamp(wrap_angle(x[ai]), bounds[ai].lo, bounds[ai].hi);
}

struct SearchBest {
  double residual = std::numeric_limits<double>::infinity();
  std::vector<double> x;
  std::vector<double> u;
  bool in_region = false;
};

// Multi-start damped Gauss-Newton (Levenberg-Marquardt) on the squared
// residual over W x control box.
SearchBest minimize_residual(
    const ControlSystem& sys, const Region& W, const SearchOptions& opts,
    const std::function<Eigen::VectorXd(std::span<const double>,
                                        std::span<const double>)>& residual,
    const std::function<Eigen::MatrixXd(std::span<const double>,
                                        std::span<const double>)>& jacobian,
    double early_exit_below) {
  const std::size_t n = sys.state_dim(), m = sys.control_dim();
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  const Eigen::Index mi = static_cast<Eigen::Index>(m);
  if (m > 0 && opts.control_bounds.size() != m)
    throw std::invalid_argument(
        "control bounds are required for systems with inputs");

  auto project = [&](Eigen::VectorXd& xi) {
    std::span<double> xs(xi.data(), n);
    project_state(W, xs);
    for (std::size_t j = 0; j < m; ++j)
      xi(ni + static_cast<Eigen::Index>(j)) =
          std::clamp(xi(ni + static_cast<Eigen::Index>(j)),
                     opts.control_bounds[j].lo, opts.control_bounds[j].hi);
  };

  auto eval_res = [&](const Eigen::VectorXd& xi) {
    return residual(std::span<const double>(xi.data(), n),
                    std::span<const double>(xi.data() + n, m));
  };

  const auto starts = W.sample_interior(opts.starts, opts.seed);
  SearchBest best;

  for (std::size_t s = 0; s < starts.size(); ++s) {
    Eigen::VectorXd xi(ni + mi);
    for (std::size_t i = 0; i < n; ++i)
      xi(static_cast<Eigen::Index>(i)) = starts[s][i];
    for (std::size_t j = 0; j < m; ++j) {
      const auto& cb = opts.control_bounds[j];
      // first start probes u = 0 when admissible, the rest spread out
      double u0 = s == 0 ? std::clamp(0.0, cb.lo, cb.hi)
                         : cb.lo + (cb.hi - cb.lo) *
                                       halton(opts.seed + s + 1,
                                              halton_base(j + 3));
      xi(ni + static_cast<Eigen::Index>(j)) = u0;
    }
    project(xi);

    Eigen::VectorXd r = eval_res(xi);
    double cost = r.norm();
    double mu = 1e-3;
    for (std::size_t it = 0; it < opts.max_iterations; ++it) {
      if (cost <= 1e-14) break;
      Eigen::MatrixXd J = jacobian(std::span<const double>(xi.data(), n),
                                   std::span<const double>(xi.data() + n, m));
      Eigen::MatrixXd H = J.transpose() * J;
      H.diagonal().array() += mu;
      Eigen::VectorXd step = H.ldlt().solve(-J.transpose() * r);
      Eigen::VectorXd trial = xi + step;
      project(trial);
      Eigen::VectorXd rt = eval_res(trial);
      double ct = rt.norm();
      if (ct < cost) {
        xi = trial;
        r = rt;
        cost = ct;
        mu = std::max(mu / 3.0, 1e-12);
      } else {
        mu *= 4.0;
        if (mu > 1e12) break;
      }
    }

    if (cost < best.residual) {
      best.residual = cost;
      best.x.assign(xi.data(), xi.data() + n);
      best.u.assign(xi.data() + n, xi.data() + n + m);
      best.in_region =
          W.contains(Point(W.space(), best.x)) != Location::Exterior;
    }
    if (best.residual <= early_exit_below && best.in_region) break;
  }
  return best;
}

}  // namespace

std::vector<std::vector<double>> target_grid(std::size_t dim, double radius,
                                             std::size_t per_axis) {
  if (per_axis < 2) throw std::invalid_argument("per_axis must be >= 2");
  std::vector<std::vector<double>> out;
  std::vector<std::size_t> index(dim, 0);
  for (;;) {
    std::vector<double> c(dim);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      c[i] = -radius + 2.0 * radius * static_cast<double>(index[i]) /
                           static_cast<double>(per_axis - 1);
      norm2 += sqr(c[i]);
    }
    if (norm2 <= sqr(radius) + 1e-15) out.push_back(std::move(c));
    std::size_t d = 0;
    while (d < dim && ++index[d] == per_axis) index[d++] = 0;
    if (d == dim) break;
  }
  return out;
}

BrockettReport brockett_image_test(
    const ControlSystem& sys, const Region& W,
    std::span<const std::vector<double>> targets, const SearchOptions& opts) {
  BrockettReport rep;
  rep.covered = true;
  rep.worst_residual = 0.0;
  for (const auto& target : targets) {
    if (target.size() != sys.state_dim())
      throw std::invalid_argument("target dimension mismatch");
    Eigen::Map<const Eigen::VectorXd> c(
        target.data(), static_cast<Eigen::Index>(target.size()));
    auto residual = [&](std::span<const double> x,
                        std::span<const double> u) -> Eigen::VectorXd {
      auto f = sys.eval(x, u);
      Eigen::Map<const Eigen::VectorXd> fv(
          f.data(), static_cast<Eigen::Index>(f.size()));
      return fv - c;
    };
    auto jac = [&](std::span<const double> x,
                   std::span<const double> u) -> Eigen::MatrixXd {
      return sys.jacobian(x, u);
    };
    SearchBest best = minimize_residual(sys, W, opts, residual, jac,
                                        opts.solver_tol * 0.1);
    TargetResult tr;
    tr.target = target;
    tr.best_residual = best.residual;
    tr.best_state = best.x;
    tr.best_control = best.u;
    tr.hit = best.residual <= opts.solver_tol && best.in_region;
    if (!tr.hit) rep.covered = false;
    rep.worst_residual = std::max(rep.worst_residual, best.residual);
    rep.results.push_back(std::move(tr));
  }
  return rep;
}

ObstructionReport adversary_intersection_test(
    const ControlSystem& sys, const AdversaryFamily& X, const Region& W,
    std::span<const double> eps_list, const SearchOptions& opts,
    std::optional<int> chi) {
  if (eps_list.empty())
    throw std::invalid_argument("eps_list must not be empty");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]) || !(eps_list[i] > 0.0))
      throw std::invalid_argument("eps_list must be positive and decreasing");

  ObstructionReport rep;
  rep.test = "adversary_intersection_test";
  rep.assumptions.push_back(
      "residual floors are sampled over a finite multi-start search, not "
      "proven; " +
      std::to_string(opts.starts) + " starts per eps");

  auto vanish = X.check_vanishing(W.sample_interior(128, opts.seed),
                                  eps_list);
  rep.evidence["vanishing_scale"] = vanish.scale;
  if (!vanish.ok) {
    rep.verdict = Verdict::Inconclusive;
    rep.assumptions.push_back(
        "adversary family does not vanish uniformly as eps -> 0 on the "
        "sampled region; the theorem does not apply");
    return rep;
  }
  rep.assumptions.push_back(
      "adversary vanishes uniformly on samples: max |X_eps| <= " +
      format_double(vanish.scale) + " * eps");

  bool all_positive = true;
  for (double eps : eps_list) {
    auto residual = [&](std::span<const double> x,
                        std::span<const double> u) -> Eigen::VectorXd {
      auto f = sys.eval(x, u);
      auto xv = X.eval(x, eps);
      Eigen::VectorXd r(static_cast<Eigen::Index>(f.size()));
      for (std::size_t i = 0; i < f.size(); ++i)
        r(static_cast<Eigen::Index>(i)) = f[i] - xv[i];
      return r;
    };
    auto jac = [&](std::span<const double> x,
                   std::span<const double> u) -> Eigen::MatrixXd {
      Eigen::MatrixXd J = sys.jacobian(x, u);
      J.leftCols(static_cast<Eigen::Index>(sys.state_dim())) -=
          X.state_jacobian(x, eps);
      return J;
    };
    SearchBest best = minimize_residual(sys, W, opts, residual, jac,
                                        opts.solver_tol * 0.1);
    rep.evidence["min_residual_eps_" + format_double(eps)] = best.residual;
    if (best.residual <= opts.solver_tol && best.in_region)
      all_positive = false;
  }
  rep.evidence["all_eps_positive"] = all_positive ? 1.0 : 0.0;
  if (chi) rep.evidence["chi"] = static_cast<double>(*chi);

  if (!all_positive) {
    rep.verdict = Verdict::NoObstruction;
    rep.assumptions.push_back(
        "an intersection exists for this family; this certifies nothing "
        "about stabilizability, since the theorem quantifies over all "
        "small continuous adversaries");
  } else if (chi && *chi != 0) {
    rep.verdict = Verdict::ObstructionFound;
    rep.assumptions.push_back(
        "positive residual floor at every eps with nonzero Euler "
        "characteristic contradicts the intersection property required of "
        "a stabilizable set");
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.assumptions.push_back(
        chi ? "Euler characteristic is zero; the theorem gives no "
              "information"
            : "Euler characteristic unavailable; no conclusion drawn");
  }
  return rep;
}

ObstructionReport safety_test(const ControlSystem& sys, const Region& S,
                              const AdversaryFamily& X,
                              std::span<const double> eps_list,
                              const SearchOptions& opts) {
  std::optional<int> chi = region_euler_char(S);

  if (!chi || *chi == 0) {
    ObstructionReport rep;
    rep.test = "safety_test";
    if (chi) rep.evidence["chi"] = static_cast<double>(*chi);
    rep.verdict = Verdict::Inconclusive;
    rep.assumptions.push_back(
        chi ? "chi(S) = 0: the safety theorem's hypothesis fails, so the "
              "residuals carry no information"
            : "chi(S) could not be determined for this region shape");
    return rep;
  }

  ObstructionReport rep =
      adversary_intersection_test(sys, X, S, eps_list, opts, chi);
  rep.test = "safety_test";
  if (rep.verdict == Verdict::ObstructionFound)
    rep.assumptions.push_back(
        "conclusion: S cannot be rendered safe by continuous feedback "
        "with uniquely integrable closed loop");
  return rep;
}

bool affine_span_test(const ControlSystem& sys, const VectorField& Y,
                      std::span<const Point> samples, double rank_tol) {
  if (!sys.affine())
    throw std::invalid_argument("affine_span_test needs affine parts");
  const auto& aff = *sys.affine();
  const std::size_t n = sys.state_dim();
  const Eigen::Index ni = static_cast<Eigen::Index>(n);
  const std::size_t ng = aff.control_fields.size();

  auto rank_of = [&](const Eigen::MatrixXd& mat) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat);
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > rank_tol) ++rank;
    return rank;
  };

  for (const auto& p : samples) {
    auto fv = aff.drift.eval(p);
    auto yv = Y.eval(p);
    Eigen::MatrixXd g(ni, static_cast<Eigen::Index>(ng));
    for (std::size_t j = 0; j < ng; ++j) {
      auto gj = aff.control_fields[j].eval(p);
      for (std::size_t i = 0; i < n; ++i)
        g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
            gj[i];
    }
    Eigen::Map<const Eigen::VectorXd> f(fv.data(), ni);
    Eigen::Map<const Eigen::VectorXd> y(yv.data(), ni);

    Eigen::MatrixXd yg(ni, static_cast<Eigen::Index>(ng) + 1);
    yg.col(0) = y;
    yg.rightCols(static_cast<Eigen::Index>(ng)) = g;

    if (f.norm() > rank_tol) {
      Eigen::MatrixXd fyg(ni, static_cast<Eigen::Index>(ng) + 2);
      fyg.col(0) = f;
      fyg.rightCols(static_cast<Eigen::Index>(ng) + 1) = yg;
      if (rank_of(yg) != rank_of(fyg) - 1) return false;
    } else {
      if (rank_of(g) != rank_of(yg) - 1) return false;
    }
  }
  return true;
}

ObstructionReport make_span_report(bool holds, std::size_t samples) {
  ObstructionReport rep;
  rep.test = "affine_span_test";
  rep.verdict = Verdict::Inconclusive;  // chi is applied at assembly
  rep.evidence["span_condition"] = holds ? 1.0 : 0.0;
  rep.evidence["samples"] = static_cast<double>(samples);
  rep.assumptions.push_back(
      "span/rank conditions checked at sampled points only");
  return rep;
}

ObstructionReport make_transversality_report(bool holds,
                                             std::size_t samples) {
  ObstructionReport rep;
  rep.test = "transversality_test";
  rep.verdict = Verdict::Inconclusive;
  rep.evidence["transversality"] = holds ? 1.0 : 0.0;
  rep.evidence["samples"] = static_cast<double>(samples);
  rep.assumptions.push_back(
      "nowhere-tangency checked at sampled configurations only");
  return rep;
}

ObstructionReport stabilizability_verdict(
    std::optional<int> chi, std::span<const ObstructionReport> tests) {
  ObstructionReport rep;
  rep.test = "stabilizability_verdict";
  if (chi) rep.evidence["chi"] = static_cast<double>(*chi);

  std::vector<std::string> passing;
  for (const auto& t : tests) {
    auto has_flag = [&](const char* key) {
      auto it = t.evidence.find(key);
      return it != t.evidence.end() && it->second == 1.0;
    };
    bool positive = has_flag("all_eps_positive") ||
                    has_flag("span_condition") || has_flag("transversality");
    if (positive) passing.push_back(t.test);
    for (const auto& a : t.assumptions) rep.assumptions.push_back(a);
  }
  rep.evidence["positive_tests"] = static_cast<double>(passing.size());

  if (chi && *chi != 0 && !passing.empty()) {
    rep.verdict = Verdict::ObstructionFound;
    for (const auto& name : passing)
      rep.assumptions.push_back("obstruction established by " + name);
  } else {
    rep.verdict = Verdict::Inconclusive;
    if (!chi)
      rep.assumptions.push_back(
          "Euler characteristic unavailable; no conclusion drawn");
    else if (*chi == 0)
      rep.assumptions.push_back(
          "zero Euler characteristic: the necessary conditions are "
          "silent");
    else
      rep.assumptions.push_back("no sub-test produced an obstruction");
  }
  return rep;
}

}  // namespace obstructa
