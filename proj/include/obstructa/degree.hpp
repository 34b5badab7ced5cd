#ifndef OBSTRUCTA_DEGREE_HPP
#define OBSTRUCTA_DEGREE_HPP

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "obstructa/control_system.hpp"
#include "obstructa/expr.hpp"
#include "obstructa/report.hpp"
#include "obstructa/space.hpp"

namespace obstructa {

/// Planar vector field in the variables (x, y).
struct PlanarField {
  ScalarExpr fx, fy;

  std::array<double, 2> eval(double x, double y) const;
  static PlanarField from_field(const VectorField& f);
};

/// Closed curve parametrized over t in [0, 2*pi], counterclockwise.
struct ClosedCurve {
  ScalarExpr cx, cy;  // expressions in t
  std::size_t samples = 256;

  std::array<double, 2> at(double t) const;
};

ClosedCurve circle_curve(double cx, double cy, double radius,
                         std::size_t samples = 256);
/// Same circle traversed clockwise (orientation-reversal tests).
ClosedCurve circle_curve_reversed(double cx, double cy, double radius,
                                  std::size_t samples = 256);

class DegreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Winding number of F along the curve: summed wrapped angle increments
/// over a sample grid, refined by doubling whenever a single increment
/// exceeds pi/2, up to 2^20 samples.
int winding_number(const PlanarField& F, const ClosedCurve& curve);

/// Index of an isolated zero: winding along the circle of the given
/// radius about the center. The field must not vanish on that circle.
int index_of_zero(const PlanarField& F, double cx, double cy, double radius);

struct PoincareHopfReport {
  bool inward;
  int index_sum;
  std::optional<int> chi;
  bool consistent;
  /// Set when the field points inward, chi != 0, and the supplied zero
  /// list is empty: a nonvanishing inward field would contradict chi != 0.
  bool zero_list_violation;
  std::size_t boundary_samples;
};

struct IsolatedZero {
  std::array<double, 2> center;
  double radius;
};

/// Consistency check of the index sum against the region's Euler
/// characteristic for inward-pointing fields. Completeness of the zero
/// list is the caller's claim and is recorded, not proven.
PoincareHopfReport poincare_hopf_check(const PlanarField& F, const Region& r,
                                       const std::vector<IsolatedZero>& zeros,
                                       std::size_t n_boundary = 256);

/// Planar specialization of the weakened Coron condition over the u = 0
/// section: degree d of the state field along a circle; d outside {-1, 1}
/// means the induced map on first homology hits only d-multiples, so the
/// origin is not stabilizable.
ObstructionReport coron_h1_test(const ControlSystem& sys, double eps,
                                double curve_radius);

}  // namespace obstructa

#endif
