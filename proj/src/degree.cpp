#include "obstructa/degree.hpp"

#include <cmath>

#include "obstructa/num.hpp"
#include "obstructa/topology.hpp"

namespace obstructa {

std::array<double, 2> PlanarField::eval(double x, double y) const {
  VarAssignment a{{"x", x}, {"y", y}};
  return {fx.eval(a), fy.eval(a)};
}

PlanarField PlanarField::from_field(const VectorField& f) {
  if (f.space->dimension() != 2)
    throw std::invalid_argument("planar field requires a 2d space");
  // rename coordinates to (x, y)
  std::map<std::string, ScalarExpr> repl{
      {f.space->name(0), ScalarExpr::variable("x")},
      {f.space->name(1), ScalarExpr::variable("y")}};
  return PlanarField{f.components[0].substitute(repl),
                     f.components[1].substitute(repl)};
}

std::array<double, 2> ClosedCurve::at(double t) const {
  VarAssignment a{{"t", t}};
  return {cx.eval(a), cy.eval(a)};
}

ClosedCurve circle_curve(double cx, double cy, double radius,
                         std::size_t samples) {
  auto t = ScalarExpr::variable("t");
  return ClosedCurve{ScalarExpr::constant(cx) +
                         ScalarExpr::constant(radius) * cos(t),
                     ScalarExpr::constant(cy) +
                         ScalarExpr::constant(radius) * sin(t),
                     samples};
}

ClosedCurve circle_curve_reversed(double cx, double cy, double radius,
                                  std::size_t samples) {
  auto t = ScalarExpr::variable("t");
  return ClosedCurve{ScalarExpr::constant(cx) +
                         ScalarExpr::constant(radius) * cos(t),
                     ScalarExpr::constant(cy) -
                         ScalarExpr::constant(radius) * sin(t),
                     samples};
}

int winding_number(const PlanarField& F, const ClosedCurve& curve) {
  constexpr std::size_t kMaxSamples = 1u << 20;
  constexpr double kMinNorm = 1e-12;

  {
    auto p0 = curve.at(0.0);
    auto p1 = curve.at(kTwoPi);
    if (std::hypot(p0[0] - p1[0], p0[1] - p1[1]) > 1e-9)
      throw DegreeError("curve endpoints do not coincide");
  }

  std::size_t n = std::max<std::size_t>(curve.samples, 64);
  for (; n <= kMaxSamples; n *= 2) {
    std::vector<double> increments;
    increments.reserve(n);
    bool too_coarse = false;
    auto p = curve.at(0.0);
    auto f = F.eval(p[0], p[1]);
    if (std::hypot(f[0], f[1]) < kMinNorm)
      throw DegreeError("field vanishes on the curve");
    double prev = std::atan2(f[1], f[0]);
    for (std::size_t k = 1; k <= n; ++k) {
      double t = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
      p = curve.at(t);
      f = F.eval(p[0], p[1]);
      if (std::hypot(f[0], f[1]) < kMinNorm)
        throw DegreeError("field vanishes on the curve");
      double ang = std::atan2(f[1], f[0]);
      double inc = wrap_increment(ang - prev);
      if (std::fabs(inc) > kTwoPi / 4.0) {  // pi/2
        too_coarse = true;
        break;
      }
      increments.push_back(inc);
      prev = ang;
    }
    if (too_coarse) continue;
    double total = pairwise_sum(increments) / kTwoPi;
    long rounded = std::lround(total);
    if (std::fabs(total - static_cast<double>(rounded)) > 0.25)
      throw DegreeError("winding sum does not round cleanly");
    return static_cast<int>(rounded);
  }
  throw DegreeError("winding number did not converge at 2^20 samples");
}

int index_of_zero(const PlanarField& F, double cx, double cy,
                  double radius) {
  return winding_number(F, circle_curve(cx, cy, radius));
}

PoincareHopfReport poincare_hopf_check(const PlanarField& F, const Region& r,
                                       const std::vector<IsolatedZero>& zeros,
                                       std::size_t n_boundary) {
  if (r.space()->dimension() != 2 || r.space()->real_indices().size() != 2)
    throw std::invalid_argument("poincare_hopf_check is planar");

  for (std::size_t i = 0; i < zeros.size(); ++i) {
    Point c(r.space(), {zeros[i].center[0], zeros[i].center[1]});
    if (r.contains(c) != Location::Interior)
      throw std::invalid_argument("zero disk center must be interior");
    for (std::size_t j = i + 1; j < zeros.size(); ++j) {
      double d = std::hypot(zeros[i].center[0] - zeros[j].center[0],
                            zeros[i].center[1] - zeros[j].center[1]);
      if (d <= zeros[i].radius + zeros[j].radius)
        throw std::invalid_argument("zero disks must be pairwise disjoint");
    }
  }

  PoincareHopfReport rep{};
  rep.boundary_samples = n_boundary;
  rep.inward = true;
  for (const auto& bs : r.sample_boundary(n_boundary)) {
    auto f = F.eval(bs.point[0], bs.point[1]);
    double ip = f[0] * bs.outward_normal[0] + f[1] * bs.outward_normal[1];
    if (!(ip < 0.0)) rep.inward = false;
  }

  rep.index_sum = 0;
  for (const auto& z : zeros)
    rep.index_sum += index_of_zero(F, z.center[0], z.center[1], z.radius);

  rep.chi = region_euler_char(r);
  rep.consistent = !rep.inward || (rep.chi && rep.index_sum == *rep.chi);
  rep.zero_list_violation =
      rep.inward && rep.chi && *rep.chi != 0 && zeros.empty();
  return rep;
}

ObstructionReport coron_h1_test(const ControlSystem& sys, double eps,
                                double curve_radius) {
  if (sys.state_dim() != 2)
    throw std::invalid_argument("coron_h1_test is planar");
  if (!(curve_radius > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("radius and eps must be positive");
  if (std::isfinite(eps) && curve_radius >= eps)
    throw std::invalid_argument("curve must lie inside the eps ball");

  // A system is genuinely controlled when its dynamics read some control
  // variable; the u = 0 section then only restricts the image, so the
  // degree of the section cannot refute surjectivity on homology.
  bool controlled = false;
  for (const auto& d : sys.dynamics())
    for (const auto& v : d.free_variables())
      for (const auto& cn : sys.control_names())
        if (v == cn) controlled = true;

  PlanarField f = PlanarField::from_field(sys.zero_control_section());
  int d = winding_number(f, circle_curve(0.0, 0.0, curve_radius));

  ObstructionReport rep;
  rep.test = "coron_h1_test";
  rep.evidence["degree"] = static_cast<double>(d);
  rep.evidence["curve_radius"] = curve_radius;
  rep.evidence["eps"] = eps;
  rep.assumptions.push_back(
      "planar specialization over the u = 0 section; the induced map on "
      "first homology is computed as a circle degree");
  if (controlled) {
    rep.verdict = Verdict::Inconclusive;
    rep.assumptions.push_back(
        "dynamics depend on the controls, so the section degree does not "
        "determine the image of first homology; no conclusion drawn");
  } else if (d != 1 && d != -1) {
    rep.verdict = Verdict::ObstructionFound;
    rep.assumptions.push_back(
        "degree d maps first homology onto d-multiples only, which is a "
        "proper subgroup; the origin is not stabilizable");
  } else {
    rep.verdict = Verdict::Inconclusive;
    rep.assumptions.push_back(
        "degree +/-1 surjects on first homology; no information");
  }
  return rep;
}

}  // namespace obstructa
