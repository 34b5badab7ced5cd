#include "obstructa/dynamics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "obstructa/num.hpp"

namespace obstructa {

VectorField::VectorField(SpacePtr s, std::vector<ScalarExpr> comps)
    : space(std::move(s)), components(std::move(comps)) {
  if (components.size() != space->dimension())
    throw std::invalid_argument("vector field needs one component per "
                                "coordinate");
  for (const auto& c : components) {
    for (const auto& v : c.free_variables()) {
      if (std::find(space->names().begin(), space->names().end(), v) ==
          space->names().end())
        throw std::invalid_argument("field component uses unknown variable: " +
                                    v);
    }
  }
}

std::vector<double> VectorField::eval(std::span<const double> coords) const {
  VarAssignment a;
  for (std::size_t i = 0; i < coords.size(); ++i)
    a.set(space->name(i), coords[i]);
  std::vector<double> out(components.size());
  for (std::size_t i = 0; i < components.size(); ++i)
    out[i] = components[i].eval(a);
  return out;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// One RK4 step on raw coordinates (no wrapping between stages).
std::vector<double> rk4_step(const VectorField& F,
                             const std::vector<double>& x, double h) {
  const std::size_t n = x.size();
  std::vector<double> k1 = F.eval(x);
  std::vector<double> tmp(n);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
  std::vector<double> k2 = F.eval(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
  std::vector<double> k3 = F.eval(tmp);
  for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
  std::vector<double> k4 = F.eval(tmp);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

}  // namespace

std::string Trajectory::to_csv() const {
  std::string out = "t";
  for (const auto& n : space->names()) {
    out += ',';
    out += n;
  }
  out += '\n';
  for (std::size_t k = 0; k < times.size(); ++k) {
    out += format_double(times[k]);
    for (double c : states[k].coords()) {
      out += ',';
      out += format_double(c);
    }
    out += '\n';
  }
  return out;
}

Trajectory integrate(const VectorField& F, const Point& x0, double T,
                     double h) {
  if (!(T > 0.0) || !(h > 0.0) || h > T)
    throw std::invalid_argument("integrate requires 0 < h <= T");
  if (!(*x0.space() == *F.space))
    throw std::invalid_argument("initial state space mismatch");

  // round to an integral number of uniform steps landing exactly on T;
  // the effective step stays within rounding of the requested one
  const std::size_t steps =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / h)));
  const double step = T / static_cast<double>(steps);

  Trajectory traj;
  traj.space = F.space;
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);

  std::vector<double> x(x0.coords().begin(), x0.coords().end());
  traj.times.push_back(0.0);
  traj.states.emplace_back(F.space, x);

  for (std::size_t k = 1; k <= steps; ++k) {
    std::vector<double> next = rk4_step(F, x, step);
    if (!all_finite(next))
      throw BlowupError(traj.times.back(), std::move(x));
    x = F.space->canonicalize(std::move(next));
    traj.times.push_back(static_cast<double>(k) * step);
    traj.states.emplace_back(F.space, x);
  }
  return traj;
}

AttractorEstimate attractor_estimate(const VectorField& F, const Region& U,
                                     std::size_t grid_n, double t_max,
                                     double h) {
  if (grid_n < 2) throw std::invalid_argument("grid_n must be >= 2");
  const auto bounds = U.chart_bounds();
  const std::size_t dim = U.space()->dimension();

  // Axis-aligned grid over the chart bounds, filtered to the interior.
  double spacing = 0.0;
  std::vector<double> step(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    step[i] = (bounds[i].hi - bounds[i].lo) /
              static_cast<double>(grid_n - 1);
    spacing = std::max(spacing, step[i]);
  }

  std::vector<Point> grid;
  std::vector<std::size_t> index(dim, 0);
  for (;;) {
    std::vector<double> coords(dim);
    for (std::size_t i = 0; i < dim; ++i)
      coords[i] = bounds[i].lo + step[i] * static_cast<double>(index[i]);
    Point p(U.space(), std::move(coords));
    if (U.contains(p) != Location::Exterior) grid.push_back(std::move(p));
    std::size_t d = 0;
    while (d < dim && ++index[d] == grid_n) index[d++] = 0;
    if (d == dim) break;
  }

  AttractorEstimate est;
  est.t_max = t_max;
  est.spacing = spacing;

  std::vector<Point> images;
  images.reserve(grid.size());
  for (const auto& p : grid) {
    try {
      images.push_back(integrate(F, p, t_max, h).final_state());
    } catch (const BlowupError&) {
      ++est.dropped;
    }
  }

  for (const auto& p : grid) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : images)
      best = std::min(best,
                      state_distance(*U.space(), p.coords(), q.coords()));
    if (best <= spacing) est.points.push_back(p);
  }
  return est;
}

LyapunovReport lyapunov_check(const LyapunovCandidate& cand,
                              const VectorField& F, const Region& r,
                              std::size_t n, std::uint64_t seed) {
  // L_F V = sum_i dV/dx_i * F_i, with the gradient taken symbolically.
  std::vector<ScalarExpr> grad;
  grad.reserve(F.space->dimension());
  for (const auto& name : F.space->names())
    grad.push_back(cand.V.derivative(name));

  LyapunovReport rep{-std::numeric_limits<double>::infinity(), true,
                     std::numeric_limits<double>::infinity(), 0};
  for (const auto& p : r.sample_interior(n, seed)) {
    VarAssignment a = p.assignment();
    double v = cand.V.eval(a);
    rep.min_value = std::min(rep.min_value, v);
    if (v <= 0.0) continue;  // on (or numerically at) the candidate set
    auto f = F.eval(p);
    double lie = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      lie += grad[i].eval(a) * f[i];
    rep.min_decay = std::max(rep.min_decay, lie);
    ++rep.samples;
  }
  rep.pass = rep.min_value >= -1e-12 && rep.samples > 0 &&
             rep.min_decay < -1e-12;
  return rep;
}

InvarianceReport strict_invariance_check(const VectorField& F,
                                         const Region& S,
                                         std::size_t n_boundary,
                                         double t_probe, double h) {
  InvarianceReport rep{true, true, -std::numeric_limits<double>::infinity()};
  for (const auto& bs : S.sample_boundary(n_boundary)) {
    auto f = F.eval(bs.point);
    double ip = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      ip += f[i] * bs.outward_normal[i];
    rep.worst_inner_product = std::max(rep.worst_inner_product, ip);
    if (!(ip < -1e-10)) rep.inward_ok = false;
    Point probe = integrate(F, bs.point, t_probe, h).final_state();
    if (S.contains(probe) != Location::Interior) rep.flow_ok = false;
  }
  return rep;
}

}  // namespace obstructa
