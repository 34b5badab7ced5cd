#ifndef OBSTRUCTA_SPACE_HPP
#define OBSTRUCTA_SPACE_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "obstructa/expr.hpp"

namespace obstructa {

enum class FactorKind { Real, Angle };

/// Flat model manifold: an ordered product of real lines and circles, with
/// one named coordinate per factor. Angle coordinates live in [0, 2*pi).
class ModelSpace {
 public:
  ModelSpace(std::vector<std::pair<std::string, FactorKind>> factors);

  static std::shared_ptr<const ModelSpace> make(
      std::vector<std::pair<std::string, FactorKind>> factors);
  /// All-Real shorthand.
  static std::shared_ptr<const ModelSpace> euclidean(
      std::vector<std::string> names);

  std::size_t dimension() const { return factors_.size(); }
  const std::string& name(std::size_t i) const { return factors_[i].first; }
  FactorKind kind(std::size_t i) const { return factors_[i].second; }
  const std::vector<std::string>& names() const { return names_; }
  std::vector<std::size_t> real_indices() const;
  std::vector<std::size_t> angle_indices() const;

  bool operator==(const ModelSpace& other) const {
    return factors_ == other.factors_;
  }

  /// Canonicalize a raw coordinate vector (wraps Angle entries).
  std::vector<double> canonicalize(std::vector<double> coords) const;

 private:
  std::vector<std::pair<std::string, FactorKind>> factors_;
  std::vector<std::string> names_;
};

using SpacePtr = std::shared_ptr<const ModelSpace>;

class Point {
 public:
  Point(SpacePtr space, std::vector<double> coords);

  const SpacePtr& space() const { return space_; }
  std::span<const double> coords() const { return coords_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::size_t dimension() const { return coords_.size(); }

  /// Bindings of the coordinate names to this point's values.
  VarAssignment assignment() const;

 private:
  SpacePtr space_;
  std::vector<double> coords_;
};

struct Interval {
  double lo;
  double hi;
};

/// Round ball over the Real factors (obstacles and ball bases).
struct Ball {
  std::vector<double> center;
  double radius;
};

enum class Location { Interior, Boundary, Exterior };

struct BoundarySample {
  Point point;
  std::vector<double> outward_normal;  // unit vector in chart coordinates
};

/// Compact region of a flat model manifold: a box / ball / annulus base
/// over the Real factors, minus open obstacle balls, optionally cut by
/// implicit inequalities g(x) <= 0, with Angle factors unconstrained or
/// restricted to sub-arcs.
class Region {
 public:
  static Region box(SpacePtr space, std::vector<Interval> intervals);
  static Region ball(SpacePtr space, std::vector<double> center,
                     double radius);
  static Region annulus(SpacePtr space, std::vector<double> center,
                        double inner, double outer);

  Region& add_obstacle(std::vector<double> center, double radius);
  Region& add_constraint(ScalarExpr g);  // g <= 0 inside
  Region& set_angle_arc(const std::string& coord, double lo, double hi);
  Region& set_euler_char(int chi);
  Region& set_boundary_tol(double tol);

  const SpacePtr& space() const { return space_; }
  std::size_t obstacle_count() const { return obstacles_.size(); }
  const std::vector<Ball>& obstacles() const { return obstacles_; }
  const std::vector<ScalarExpr>& constraints() const { return constraints_; }
  const std::map<std::string, Interval>& angle_arcs() const {
    return angle_arcs_;
  }
  std::optional<int> euler_char_override() const { return chi_override_; }
  double boundary_tol() const { return tol_; }

  enum class BaseKind { Box, Ball, Annulus };
  BaseKind base_kind() const;
  const std::vector<Interval>* box_base() const;
  const Ball* ball_base() const;
  struct Annulus {
    std::vector<double> center;
    double inner;
    double outer;
  };
  const Annulus* annulus_base() const;

  Location contains(const Point& p) const;

  /// Deterministic quasi-uniform samples over every boundary component,
  /// each with its outward unit normal. Outward means out of the region,
  /// so normals on obstacle boundaries point into the obstacle.
  std::vector<BoundarySample> sample_boundary(std::size_t n) const;

  /// Deterministic low-discrepancy interior samples; bit-for-bit
  /// reproducible for a fixed (region, n, seed).
  std::vector<Point> sample_interior(std::size_t n, std::uint64_t seed) const;

  /// Axis-aligned bounds of the base in chart coordinates (angle factors
  /// get their arc or the full [0, 2*pi)).
  std::vector<Interval> chart_bounds() const;

 private:
  Region(SpacePtr space);
  void check_invariants() const;

  SpacePtr space_;
  std::variant<std::vector<Interval>, Ball, Annulus> base_;
  std::vector<Ball> obstacles_;
  std::vector<ScalarExpr> constraints_;
  std::map<std::string, Interval> angle_arcs_;
  std::optional<int> chi_override_;
  double tol_ = 1e-9;

  std::vector<std::size_t> real_idx_;
  std::vector<std::size_t> angle_idx_;
};

/// Distance on the model space: Euclidean on Real factors plus shortest
/// arc length on Angle factors.
double state_distance(const ModelSpace& space, std::span<const double> a,
                      std::span<const double> b);

}  // namespace obstructa

#endif
