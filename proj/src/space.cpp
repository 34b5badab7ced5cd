#include "obstructa/space.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "obstructa/num.hpp"

namespace obstructa {

// --- ModelSpace -------------------------------------------------------

ModelSpace::ModelSpace(
    std::vector<std::pair<std::string, FactorKind>> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty())
    throw std::invalid_argument("model space needs at least one factor");
  std::set<std::string> seen;
  for (const auto& f : factors_) {
    if (!seen.insert(f.first).second)
      throw std::invalid_argument("duplicate coordinate name: " + f.first);
    names_.push_back(f.first);
  }
}

SpacePtr ModelSpace::make(
    std::vector<std::pair<std::string, FactorKind>> factors) {
  return std::make_shared<const ModelSpace>(std::move(factors));
}

SpacePtr ModelSpace::euclidean(std::vector<std::string> names) {
  std::vector<std::pair<std::string, FactorKind>> factors;
  for (auto& n : names) factors.emplace_back(std::move(n), FactorKind::Real);
  return make(std::move(factors));
}

std::vector<std::size_t> ModelSpace::real_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].second == FactorKind::Real) out.push_back(i);
  return out;
}

std::vector<std::size_t> ModelSpace::angle_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < factors_.size(); ++i)
    if (factors_[i].second == FactorKind::Angle) out.push_back(i);
  return out;
}

std::vector<double> ModelSpace::canonicalize(
    std::vector<double> coords) const {
  if (coords.size() != factors_.size())
    throw std::invalid_argument("coordinate count does not match space");
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (factors_[i].second == FactorKind::Angle)
      coords[i] = wrap_angle(coords[i]);
  return coords;
}

// --- Point ------------------------------------------------------------

Point::Point(SpacePtr space, std::vector<double> coords)
    : space_(std::move(space)) {
  coords_ = space_->canonicalize(std::move(coords));
}

VarAssignment Point::assignment() const {
  VarAssignment a;
  for (std::size_t i = 0; i < coords_.size(); ++i)
    a.set(space_->name(i), coords_[i]);
  return a;
}

// --- Region -----------------------------------------------------------

Region::Region(SpacePtr space)
    : space_(std::move(space)),
      real_idx_(space_->real_indices()),
      angle_idx_(space_->angle_indices()) {}

Region Region::box(SpacePtr space, std::vector<Interval> intervals) {
  Region r(std::move(space));
  if (intervals.size() != r.real_idx_.size())
    throw std::invalid_argument("box needs one interval per Real factor");
  for (const auto& iv : intervals)
    if (!(iv.lo < iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
      throw std::invalid_argument("box interval must be finite with lo < hi");
  r.base_ = std::move(intervals);
  return r;
}

Region Region::ball(SpacePtr space, std::vector<double> center,
                    double radius) {
  Region r(std::move(space));
  if (center.size() != r.real_idx_.size())
    throw std::invalid_argument("ball center must span the Real factors");
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("ball radius must be positive");
  r.base_ = Ball{std::move(center), radius};
  return r;
}

Region Region::annulus(SpacePtr space, std::vector<double> center,
                       double inner, double outer) {
  Region r(std::move(space));
  if (r.real_idx_.size() != 2)
    throw std::invalid_argument("annulus base requires two Real factors");
  if (center.size() != 2)
    throw std::invalid_argument("annulus center must be planar");
  if (!(0.0 < inner && inner < outer))
    throw std::invalid_argument("annulus requires 0 < inner < outer");
  r.base_ = Annulus{std::move(center), inner, outer};
  return r;
}

Region::BaseKind Region::base_kind() const {
  if (std::holds_alternative<std::vector<Interval>>(base_))
    return BaseKind::Box;
  if (std::holds_alternative<Ball>(base_)) return BaseKind::Ball;
  return BaseKind::Annulus;
}

const std::vector<Interval>* Region::box_base() const {
  return std::get_if<std::vector<Interval>>(&base_);
}
const Ball* Region::ball_base() const { return std::get_if<Ball>(&base_); }
const Region::Annulus* Region::annulus_base() const {
  return std::get_if<Annulus>(&base_);
}

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += sqr(a[i] - b[i]);
  return std::sqrt(s);
}

std::vector<double> real_part(const Point& p,
                              const std::vector<std::size_t>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(p[i]);
  return out;
}

}  // namespace

Region& Region::add_obstacle(std::vector<double> center, double radius) {
  if (center.size() != real_idx_.size())
    throw std::invalid_argument("obstacle center must span the Real factors");
  if (!(radius > 0.0))
    throw std::invalid_argument("obstacle radius must be positive");
  // contained in the interior of the base
  switch (base_kind()) {
    case BaseKind::Box: {
      const auto& ivs = *box_base();
      for (std::size_t i = 0; i < ivs.size(); ++i)
        if (!(center[i] - radius > ivs[i].lo &&
              center[i] + radius < ivs[i].hi))
          throw std::invalid_argument("obstacle not interior to box");
      break;
    }
    case BaseKind::Ball: {
      const auto& b = *ball_base();
      if (!(dist(center, b.center) + radius < b.radius))
        throw std::invalid_argument("obstacle not interior to ball");
      break;
    }
    case BaseKind::Annulus: {
      const auto& a = *annulus_base();
      double d = dist(center, a.center);
      if (!(d - radius > a.inner && d + radius < a.outer))
        throw std::invalid_argument("obstacle not interior to annulus");
      break;
    }
  }
  for (const auto& o : obstacles_)
    if (dist(center, o.center) <= radius + o.radius)
      throw std::invalid_argument("obstacles must be pairwise disjoint");
  obstacles_.push_back(Ball{std::move(center), radius});
  return *this;
}

Region& Region::add_constraint(ScalarExpr g) {
  for (const auto& v : g.free_variables()) {
    if (std::find(space_->names().begin(), space_->names().end(), v) ==
        space_->names().end())
      throw std::invalid_argument("constraint uses unknown coordinate: " + v);
  }
  constraints_.push_back(std::move(g));
  return *this;
}

Region& Region::set_angle_arc(const std::string& coord, double lo,
                              double hi) {
  bool found = false;
  for (auto i : angle_idx_)
    if (space_->name(i) == coord) found = true;
  if (!found)
    throw std::invalid_argument("no Angle coordinate named " + coord);
  if (!(0.0 <= lo && lo < hi && hi <= kTwoPi))
    throw std::invalid_argument("angle arc must satisfy 0 <= lo < hi <= 2pi");
  angle_arcs_[coord] = Interval{lo, hi};
  return *this;
}

Region& Region::set_euler_char(int chi) {
  chi_override_ = chi;
  return *this;
}

Region& Region::set_boundary_tol(double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  tol_ = tol;
  return *this;
}

Location Region::contains(const Point& p) const {
  if (!(*p.space() == *space_))
    throw std::invalid_argument("point space does not match region space");

  bool on_boundary = false;
  const std::vector<double> rp = real_part(p, real_idx_);

  switch (base_kind()) {
    case BaseKind::Box: {
      const auto& ivs = *box_base();
      for (std::size_t i = 0; i < ivs.size(); ++i) {
        if (rp[i] < ivs[i].lo - tol_ || rp[i] > ivs[i].hi + tol_)
          return Location::Exterior;
        if (std::fabs(rp[i] - ivs[i].lo) <= tol_ ||
            std::fabs(rp[i] - ivs[i].hi) <= tol_)
          on_boundary = true;
      }
      break;
    }
    case BaseKind::Ball: {
      const auto& b = *ball_base();
      double d = dist(rp, b.center);
      if (d > b.radius + tol_) return Location::Exterior;
      if (std::fabs(d - b.radius) <= tol_) on_boundary = true;
      break;
    }
    case BaseKind::Annulus: {
      const auto& a = *annulus_base();
      double d = dist(rp, a.center);
      if (d < a.inner - tol_ || d > a.outer + tol_)
        return Location::Exterior;
      if (std::fabs(d - a.inner) <= tol_ || std::fabs(d - a.outer) <= tol_)
        on_boundary = true;
      break;
    }
  }

  for (auto ai : angle_idx_) {
    auto it = angle_arcs_.find(space_->name(ai));
    if (it == angle_arcs_.end()) continue;
    double v = p[ai];
    if (v < it->second.lo - tol_ || v > it->second.hi + tol_)
      return Location::Exterior;
    if (std::fabs(v - it->second.lo) <= tol_ ||
        std::fabs(v - it->second.hi) <= tol_)
      on_boundary = true;
  }

  for (const auto& o : obstacles_) {
    double d = dist(rp, o.center);
    if (d < o.radius - tol_) return Location::Exterior;
    if (std::fabs(d - o.radius) <= tol_) on_boundary = true;
  }

  if (!constraints_.empty()) {
    VarAssignment a = p.assignment();
    for (const auto& g : constraints_) {
      double v = g.eval(a);
      if (v > tol_) return Location::Exterior;
      if (std::fabs(v) <= tol_) on_boundary = true;
    }
  }

  return on_boundary ? Location::Boundary : Location::Interior;
}

std::vector<Interval> Region::chart_bounds() const {
  std::vector<Interval> out(space_->dimension());
  std::size_t r = 0;
  for (std::size_t i = 0; i < space_->dimension(); ++i) {
    if (space_->kind(i) == FactorKind::Real) {
      switch (base_kind()) {
        case BaseKind::Box:
          out[i] = (*box_base())[r];
          break;
        case BaseKind::Ball: {
          const auto& b = *ball_base();
          out[i] = Interval{b.center[r] - b.radius, b.center[r] + b.radius};
          break;
        }
        case BaseKind::Annulus: {
          const auto& a = *annulus_base();
          out[i] = Interval{a.center[r] - a.outer, a.center[r] + a.outer};
          break;
        }
      }
      ++r;
    } else {
      auto it = angle_arcs_.find(space_->name(i));
      out[i] = it != angle_arcs_.end() ? it->second : Interval{0.0, kTwoPi};
    }
  }
  return out;
}

// --- boundary sampling --------------------------------------------------

namespace {

// Assemble a full point from real-part coordinates plus Halton-filled
// angle coordinates (used by components that only constrain the reals).
std::vector<double> assemble_coords(const Region& region,
                                    const std::vector<std::size_t>& real_idx,
                                    const std::vector<std::size_t>& angle_idx,
                                    std::span<const double> rp,
                                    std::uint64_t k) {
  std::vector<double> coords(region.space()->dimension(), 0.0);
  for (std::size_t i = 0; i < real_idx.size(); ++i)
    coords[real_idx[i]] = rp[i];
  const auto bounds = region.chart_bounds();
  for (std::size_t j = 0; j < angle_idx.size(); ++j) {
    const auto& iv = bounds[angle_idx[j]];
    coords[angle_idx[j]] =
        iv.lo + (iv.hi - iv.lo) * halton(k + 1, halton_base(j));
  }
  return coords;
}

}  // namespace

std::vector<BoundarySample> Region::sample_boundary(std::size_t n) const {
  // Component list: outer base boundary, annulus inner circle, obstacles,
  // implicit constraint surfaces, angle-arc end slices.
  struct Component {
    enum Type { Outer, Inner, Obstacle, Constraint, ArcFace } type;
    std::size_t index = 0;  // obstacle / constraint index, arc pair index
  };
  std::vector<Component> components;

  const std::size_t rdim = real_idx_.size();
  bool base_has_boundary = rdim > 0;
  if (base_has_boundary) components.push_back({Component::Outer, 0});
  if (base_kind() == BaseKind::Annulus)
    components.push_back({Component::Inner, 0});
  for (std::size_t i = 0; i < obstacles_.size(); ++i)
    components.push_back({Component::Obstacle, i});
  for (std::size_t i = 0; i < constraints_.size(); ++i)
    components.push_back({Component::Constraint, i});
  std::size_t arc_i = 0;
  for ([[maybe_unused]] const auto& kv : angle_arcs_)
    components.push_back({Component::ArcFace, arc_i++});

  if (components.empty())
    throw std::domain_error("region has empty boundary");

  std::vector<std::size_t> quota(components.size(), n / components.size());
  for (std::size_t i = 0; i < n % components.size(); ++i) ++quota[i];

  std::vector<BoundarySample> out;
  out.reserve(n);

  auto emit = [&](std::vector<double> coords, std::vector<double> normal) {
    double norm = 0.0;
    for (double v : normal) norm += sqr(v);
    norm = std::sqrt(norm);
    if (norm <= 0.0) return false;
    for (double& v : normal) v /= norm;
    Point p(space_, std::move(coords));
    if (contains(p) != Location::Boundary) return false;
    out.push_back(BoundarySample{std::move(p), std::move(normal)});
    return true;
  };

  // Points on a circle of the planar base (annulus circles, 2D ball/obstacle).
  auto emit_circle = [&](std::span<const double> center, double radius,
                         double normal_sign, std::size_t m) {
    for (std::size_t k = 0; k < m; ++k) {
      double ang = kTwoPi * static_cast<double>(k) / static_cast<double>(m);
      std::vector<double> rp = {center[0] + radius * std::cos(ang),
                                center[1] + radius * std::sin(ang)};
      std::vector<double> normal(space_->dimension(), 0.0);
      normal[real_idx_[0]] = normal_sign * std::cos(ang);
      normal[real_idx_[1]] = normal_sign * std::sin(ang);
      emit(assemble_coords(*this, real_idx_, angle_idx_, rp, k),
           std::move(normal));
    }
  };

  auto emit_sphere = [&](std::span<const double> center, double radius,
                         double normal_sign, std::size_t m) {
    const double golden = kTwoPi * (1.0 - 1.0 / 1.6180339887498949);
    for (std::size_t k = 0; k < m; ++k) {
      double z = 1.0 - 2.0 * (static_cast<double>(k) + 0.5) /
                           static_cast<double>(m);
      double rr = std::sqrt(std::max(0.0, 1.0 - z * z));
      double ang = golden * static_cast<double>(k);
      std::vector<double> dir = {rr * std::cos(ang), rr * std::sin(ang), z};
      std::vector<double> rp(3);
      std::vector<double> normal(space_->dimension(), 0.0);
      for (int i = 0; i < 3; ++i) {
        rp[i] = center[i] + radius * dir[i];
        normal[real_idx_[i]] = normal_sign * dir[i];
      }
      emit(assemble_coords(*this, real_idx_, angle_idx_, rp, k),
           std::move(normal));
    }
  };

  auto emit_round = [&](const std::vector<double>& center, double radius,
                        double normal_sign, std::size_t m) {
    if (rdim == 1) {
      for (int s = 0; s < 2; ++s) {
        std::vector<double> rp = {center[0] + (s == 0 ? radius : -radius)};
        std::vector<double> normal(space_->dimension(), 0.0);
        normal[real_idx_[0]] = normal_sign * (s == 0 ? 1.0 : -1.0);
        emit(assemble_coords(*this, real_idx_, angle_idx_, rp,
                             static_cast<std::uint64_t>(s)),
             std::move(normal));
      }
    } else if (rdim == 2) {
      emit_circle(center, radius, normal_sign, m);
    } else if (rdim == 3) {
      emit_sphere(center, radius, normal_sign, m);
    } else {
      throw std::domain_error("boundary sampling supports <= 3 Real factors");
    }
  };

  auto emit_box = [&](const std::vector<Interval>& ivs, std::size_t m) {
    if (rdim == 1) {
      std::vector<double> normal_lo(space_->dimension(), 0.0);
      normal_lo[real_idx_[0]] = -1.0;
      std::vector<double> normal_hi(space_->dimension(), 0.0);
      normal_hi[real_idx_[0]] = 1.0;
      std::vector<double> lo_rp = {ivs[0].lo};
      std::vector<double> hi_rp = {ivs[0].hi};
      emit(assemble_coords(*this, real_idx_, angle_idx_, lo_rp, 0), normal_lo);
      emit(assemble_coords(*this, real_idx_, angle_idx_, hi_rp, 1), normal_hi);
    } else if (rdim == 2) {
      // walk the perimeter at equal arclength
      double w = ivs[0].hi - ivs[0].lo, h = ivs[1].hi - ivs[1].lo;
      double per = 2.0 * (w + h);
      for (std::size_t k = 0; k < m; ++k) {
        double s = per * (static_cast<double>(k) + 0.5) /
                   static_cast<double>(m);
        std::vector<double> rp(2);
        std::vector<double> normal(space_->dimension(), 0.0);
        if (s < w) {
          rp = {ivs[0].lo + s, ivs[1].lo};
          normal[real_idx_[1]] = -1.0;
        } else if (s < w + h) {
          rp = {ivs[0].hi, ivs[1].lo + (s - w)};
          normal[real_idx_[0]] = 1.0;
        } else if (s < 2.0 * w + h) {
          rp = {ivs[0].hi - (s - w - h), ivs[1].hi};
          normal[real_idx_[1]] = 1.0;
        } else {
          rp = {ivs[0].lo, ivs[1].hi - (s - 2.0 * w - h)};
          normal[real_idx_[0]] = -1.0;
        }
        emit(assemble_coords(*this, real_idx_, angle_idx_, rp, k),
             std::move(normal));
      }
    } else if (rdim == 3) {
      // Halton points on the six faces, allocated round-robin.
      for (std::size_t k = 0; k < m; ++k) {
        std::size_t face = k % 6;
        std::size_t axis = face / 2;
        bool high = face % 2 == 1;
        std::vector<double> rp(3);
        std::uint64_t idx = k / 6 + 1;
        std::size_t h2 = 0;
        for (std::size_t i = 0; i < 3; ++i) {
          if (i == axis) {
            rp[i] = high ? ivs[i].hi : ivs[i].lo;
          } else {
            rp[i] = ivs[i].lo +
                    (ivs[i].hi - ivs[i].lo) * halton(idx, halton_base(h2++));
          }
        }
        std::vector<double> normal(space_->dimension(), 0.0);
        normal[real_idx_[axis]] = high ? 1.0 : -1.0;
        emit(assemble_coords(*this, real_idx_, angle_idx_, rp, k),
             std::move(normal));
      }
    } else {
      throw std::domain_error("boundary sampling supports <= 3 Real factors");
    }
  };

  // Project a candidate point onto the zero set of constraint g along its
  // gradient (Newton iteration); returns true when |g| is inside tol.
  auto project_constraint = [&](const ScalarExpr& g,
                                const std::vector<ScalarExpr>& grads,
                                std::vector<double>& coords) {
    for (int it = 0; it < 60; ++it) {
      Point p(space_, coords);
      VarAssignment a = p.assignment();
      double v = g.eval(a);
      if (std::fabs(v) <= tol_ * 0.5) {
        coords = std::vector<double>(p.coords().begin(), p.coords().end());
        return true;
      }
      double g2 = 0.0;
      std::vector<double> gv(space_->dimension());
      for (std::size_t i = 0; i < gv.size(); ++i) {
        gv[i] = grads[i].eval(a);
        g2 += sqr(gv[i]);
      }
      if (g2 < 1e-30) return false;
      for (std::size_t i = 0; i < coords.size(); ++i)
        coords[i] = p[i] - v * gv[i] / g2;
    }
    return false;
  };

  for (std::size_t ci = 0; ci < components.size(); ++ci) {
    const auto& comp = components[ci];
    std::size_t m = quota[ci];
    if (m == 0) continue;
    switch (comp.type) {
      case Component::Outer:
        switch (base_kind()) {
          case BaseKind::Box:
            emit_box(*box_base(), m);
            break;
          case BaseKind::Ball:
            emit_round(ball_base()->center, ball_base()->radius, 1.0, m);
            break;
          case BaseKind::Annulus:
            emit_circle(annulus_base()->center, annulus_base()->outer, 1.0,
                        m);
            break;
        }
        break;
      case Component::Inner:
        emit_circle(annulus_base()->center, annulus_base()->inner, -1.0, m);
        break;
      case Component::Obstacle: {
        // outward normal of the region points into the obstacle
        const auto& o = obstacles_[comp.index];
        emit_round(o.center, o.radius, -1.0, m);
        break;
      }
      case Component::Constraint: {
        const auto& g = constraints_[comp.index];
        std::vector<ScalarExpr> grads;
        for (const auto& name : space_->names())
          grads.push_back(g.derivative(name));
        const auto bounds = chart_bounds();
        std::size_t found = 0;
        for (std::uint64_t k = 1; k <= 400 * m && found < m; ++k) {
          std::vector<double> coords(space_->dimension());
          for (std::size_t i = 0; i < coords.size(); ++i)
            coords[i] = bounds[i].lo + (bounds[i].hi - bounds[i].lo) *
                                           halton(k, halton_base(i));
          if (!project_constraint(g, grads, coords)) continue;
          Point p(space_, coords);
          VarAssignment a = p.assignment();
          std::vector<double> normal(space_->dimension());
          for (std::size_t i = 0; i < normal.size(); ++i)
            normal[i] = grads[i].eval(a);
          if (emit(std::move(coords), std::move(normal))) ++found;
        }
        break;
      }
      case Component::ArcFace: {
        auto it = angle_arcs_.begin();
        std::advance(it, comp.index);
        std::size_t axis = 0;
        for (std::size_t i = 0; i < space_->dimension(); ++i)
          if (space_->name(i) == it->first) axis = i;
        const auto bounds = chart_bounds();
        std::size_t found = 0;
        for (std::uint64_t k = 1; k <= 400 * m && found < m; ++k) {
          std::vector<double> coords(space_->dimension());
          for (std::size_t i = 0; i < coords.size(); ++i)
            coords[i] = bounds[i].lo + (bounds[i].hi - bounds[i].lo) *
                                           halton(k, halton_base(i));
          bool high = (found % 2) == 1;
          coords[axis] = high ? it->second.hi : it->second.lo;
          std::vector<double> normal(space_->dimension(), 0.0);
          normal[axis] = high ? 1.0 : -1.0;
          if (emit(std::move(coords), std::move(normal))) ++found;
        }
        break;
      }
    }
  }
  return out;
}

std::vector<Point> Region::sample_interior(std::size_t n,
                                           std::uint64_t seed) const {
  std::vector<Point> out;
  out.reserve(n);
  const auto bounds = chart_bounds();
  const std::uint64_t offset = 1 + seed * 104729ULL;
  for (std::uint64_t k = 0; out.size() < n && k < 200000ULL * (n + 1); ++k) {
    std::vector<double> coords(space_->dimension());
    for (std::size_t i = 0; i < coords.size(); ++i)
      coords[i] = bounds[i].lo +
                  (bounds[i].hi - bounds[i].lo) *
                      halton(offset + k, halton_base(i));
    Point p(space_, std::move(coords));
    if (contains(p) == Location::Interior) out.push_back(std::move(p));
  }
  if (out.size() < n)
    throw std::runtime_error("could not find interior points; region empty?");
  return out;
}

double state_distance(const ModelSpace& space, std::span<const double> a,
                      std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < space.dimension(); ++i) {
    if (space.kind(i) == FactorKind::Angle)
      s += sqr(angle_distance(a[i], b[i]));
    else
      s += sqr(a[i] - b[i]);
  }
  return std::sqrt(s);
}

}  // namespace obstructa
