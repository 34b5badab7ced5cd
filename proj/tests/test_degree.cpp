#include <doctest.h>

#include <cmath>

#include "obstructa/degree.hpp"
#include "support/oracles.hpp"

using namespace obstructa;
using namespace obstructa::testing;

namespace {
PlanarField field(const char* fx, const char* fy) {
  return PlanarField{parse_expr(fx), parse_expr(fy)};
}
}  // namespace

TEST_CASE("winding numbers of the named fields") {
  CHECK(winding_number(field("x", "y"), circle_curve(0, 0, 1)) == 1);
  CHECK(winding_number(field("x^2 - y^2", "2*x*y"), circle_curve(0, 0, 1)) ==
        2);
  CHECK(winding_number(field("x^2 - y^2", "4*x*y^2"),
                       circle_curve(0, 0, 1)) == 0);
}

TEST_CASE("indices of isolated zeros") {
  CHECK(index_of_zero(field("-x", "-y"), 0, 0, 0.5) == 1);
  CHECK(index_of_zero(field("x^2 - y^2", "4*x*y^2"), 0, 0, 0.5) == 0);
  CHECK(index_of_zero(field("y", "-x"), 0, 0, 1) == 1);
  CHECK(index_of_zero(field("x^2 - y^2", "2*x*y"), 0, 0, 0.5) == 2);
}

TEST_CASE("winding is radius independent away from zeros") {
  auto f = field("x^2 - y^2", "2*x*y");
  for (double r : {0.5, 1.0, 2.0})
    CHECK(winding_number(f, circle_curve(0, 0, r)) == 2);
}

TEST_CASE("winding is scale invariant and orientation reverses sign") {
  auto f3 = field("3*(x^2 - y^2)", "3*(2*x*y)");
  CHECK(winding_number(f3, circle_curve(0, 0, 1)) == 2);
  CHECK(winding_number(field("x^2 - y^2", "2*x*y"),
                       circle_curve_reversed(0, 0, 1)) == -2);
}

TEST_CASE("brute-force oracle agrees on the named examples") {
  struct Case {
    const char *fx, *fy;
    double radius;
    std::size_t samples;
  };
  const Case cases[] = {
      {"x", "y", 1.0, 1000000},
      {"x^2 - y^2", "2*x*y", 1.0, 1000000},
      {"x^2 - y^2", "4*x*y^2", 1.0, 1000000},
      {"-x", "-y", 0.5, 200000},
  };
  for (const auto& c : cases) {
    auto f = field(c.fx, c.fy);
    auto curve = circle_curve(0, 0, c.radius);
    CHECK(winding_number(f, curve) == winding_oracle(f, curve, c.samples));
  }
}

TEST_CASE("index additivity over a pair of zeros") {
  // complex polynomial z^2 - 1: simple zeros at (+-1, 0), each of index 1
  auto f = field("x^2 - y^2 - 1", "2*x*y");
  CHECK(index_of_zero(f, 1, 0, 0.5) == 1);
  CHECK(index_of_zero(f, -1, 0, 0.5) == 1);
  CHECK(winding_number(f, circle_curve(0, 0, 3)) == 2);
}

TEST_CASE("adaptive refinement handles near-boundary zeros") {
  // zero just inside the curve concentrates the angle change
  auto f = field("x - 0.995", "y");
  CHECK(winding_number(f, circle_curve(0, 0, 1)) == 1);
}

TEST_CASE("degree failures") {
  CHECK_THROWS_AS(winding_number(field("x", "y"), circle_curve(1, 0, 1)),
                  DegreeError);  // field vanishes at curve point (0,0)
  ClosedCurve open{parse_expr("t"), parse_expr("0"), 64};
  CHECK_THROWS_AS(winding_number(field("x", "y"), open), DegreeError);
}

TEST_CASE("poincare-hopf: sink on the disk") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  auto disk = Region::ball(plane, {0, 0}, 1);
  auto rep =
      poincare_hopf_check(field("-x", "-y"), disk, {{{0.0, 0.0}, 0.5}});
  CHECK(rep.inward);
  CHECK(rep.index_sum == 1);
  CHECK(rep.chi == 1);
  CHECK(rep.consistent);
  CHECK_FALSE(rep.zero_list_violation);
}

TEST_CASE("poincare-hopf: zero-free inward field on the annulus") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  auto ann = Region::annulus(plane, {0, 0}, 1, 2);
  // radial (1.5 - r) plus unit angular speed: |F|^2 = (1.5 - r)^2 + 1 > 0,
  // and the radial part points into the annulus on both circles
  auto f = field("(1.5 - sqrt(x^2 + y^2))*x/sqrt(x^2 + y^2) "
                 "- y/sqrt(x^2 + y^2)",
                 "(1.5 - sqrt(x^2 + y^2))*y/sqrt(x^2 + y^2) "
                 "+ x/sqrt(x^2 + y^2)");
  auto rep = poincare_hopf_check(f, ann, {});
  CHECK(rep.inward);
  CHECK(rep.index_sum == 0);
  CHECK(rep.chi == 0);
  CHECK(rep.consistent);
  CHECK_FALSE(rep.zero_list_violation);
}

TEST_CASE("poincare-hopf: outward field is vacuously consistent") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  auto disk = Region::ball(plane, {0, 0}, 1);
  auto rep = poincare_hopf_check(field("x", "y"), disk, {{{0.0, 0.0}, 0.5}});
  CHECK_FALSE(rep.inward);
  CHECK(rep.consistent);
}

TEST_CASE("poincare-hopf flags a missing zero list") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  auto disk = Region::ball(plane, {0, 0}, 1);
  auto rep = poincare_hopf_check(field("-x", "-y"), disk, {});
  CHECK(rep.inward);
  CHECK(rep.zero_list_violation);
  CHECK_FALSE(rep.consistent);  // index sum 0 cannot match chi 1
}

TEST_CASE("poincare-hopf rejects bad zero disks") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  auto disk = Region::ball(plane, {0, 0}, 1);
  CHECK_THROWS_AS(
      poincare_hopf_check(field("-x", "-y"), disk,
                          {{{0.0, 0.0}, 0.3}, {{0.2, 0.0}, 0.3}}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      poincare_hopf_check(field("-x", "-y"), disk, {{{2.0, 0.0}, 0.1}}),
      std::invalid_argument);
}

TEST_CASE("coron test on the named planar systems") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  ControlSystem doubling(plane, {},
                         parse_exprs({"x^2 - y^2", "2*x*y"}));
  auto rep = coron_h1_test(doubling, 10.0, 1.0);
  CHECK(rep.verdict == Verdict::ObstructionFound);
  CHECK(rep.evidence.at("degree") == 2.0);

  ControlSystem ex3(plane, {}, parse_exprs({"x^2 - y^2", "4*x*y^2"}));
  auto rep3 = coron_h1_test(ex3, 10.0, 1.0);
  CHECK(rep3.verdict == Verdict::ObstructionFound);
  CHECK(rep3.evidence.at("degree") == 0.0);

  ControlSystem sink(plane, {}, parse_exprs({"-x", "-y"}));
  auto rs = coron_h1_test(sink, 10.0, 1.0);
  CHECK(rs.verdict == Verdict::Inconclusive);
  CHECK(rs.evidence.at("degree") == 1.0);
}

TEST_CASE("coron test stays inconclusive for genuinely controlled systems") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  ControlSystem sys(plane, {"u"}, parse_exprs({"-x + u", "-y"}));
  auto rep = coron_h1_test(sys, 10.0, 1.0);
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("coron test validates its arguments") {
  auto line = ModelSpace::euclidean({"x"});
  ControlSystem sys1(line, {}, parse_exprs({"-x"}));
  CHECK_THROWS_AS(coron_h1_test(sys1, 10.0, 1.0), std::invalid_argument);
  auto plane = ModelSpace::euclidean({"x", "y"});
  ControlSystem sys2(plane, {}, parse_exprs({"-x", "-y"}));
  CHECK_THROWS_AS(coron_h1_test(sys2, 0.5, 1.0), std::invalid_argument);
}
