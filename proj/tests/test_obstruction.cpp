#include <doctest.h>

#include <cmath>

#include "obstructa/config.hpp"
#include "obstructa/num.hpp"
#include "obstructa/obstruction.hpp"
#include "obstructa/topology.hpp"

using namespace obstructa;

namespace {

SystemConfig heisenberg() { return make_builtin("heisenberg"); }

SearchOptions heis_opts() {
  SearchOptions o;
  o.control_bounds = {{-10, 10}, {-10, 10}};
  return o;
}

}  // namespace

TEST_CASE("target grid filters to the ball") {
  auto grid = target_grid(2, 0.1, 5);
  CHECK(grid.size() == 13);  // 25 lattice points, 12 outside |c| <= 0.1
  for (const auto& c : grid)
    CHECK(std::hypot(c[0], c[1]) <= 0.1 + 1e-12);
}

TEST_CASE("heisenberg: the z-direction is not in the image") {
  auto cfg = heisenberg();
  auto sys = cfg.control_system();
  const Region& W = cfg.region("unit_box");
  std::vector<std::vector<double>> targets = {{0.0, 0.0, 0.1}};
  auto rep = brockett_image_test(sys, W, targets, heis_opts());
  CHECK_FALSE(rep.covered);
  CHECK_FALSE(rep.results[0].hit);
  // analytic floor: |(u, v, yu - xv - eps)| >= eps / sqrt(3) on the box
  CHECK(rep.results[0].best_residual >= 0.1 / 20.0);
  CHECK(rep.results[0].best_residual ==
        doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-4));
}

TEST_CASE("single integrator covers every target") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  ControlSystem sys(plane, {"u", "v"}, parse_exprs({"u", "v"}));
  auto W = Region::box(plane, {{-1, 1}, {-1, 1}});
  SearchOptions opts;
  opts.control_bounds = {{-1, 1}, {-1, 1}};
  auto rep = brockett_image_test(sys, W, target_grid(2, 0.5, 3), opts);
  CHECK(rep.covered);
  CHECK(rep.worst_residual <= opts.solver_tol);
}

TEST_CASE("heisenberg adversary sweep finds the obstruction") {
  auto cfg = heisenberg();
  auto sys = cfg.control_system();
  auto X = cfg.adversary("dz");
  std::vector<double> eps = {0.1, 0.01, 0.001};
  auto rep = adversary_intersection_test(sys, X, cfg.region("unit_box"),
                                         eps, heis_opts(), 1);
  CHECK(rep.verdict == Verdict::ObstructionFound);
  CHECK(rep.evidence.at("all_eps_positive") == 1.0);
  double prev = 1e300;
  for (double e : eps) {
    char key[64];
    std::snprintf(key, sizeof(key), "min_residual_eps_%g", e);
    double r = rep.evidence.at(key);
    CHECK(r >= e / 20.0);  // analytic floor with margin
    CHECK(r <= prev);      // nonincreasing in eps
    prev = r;
  }
}

TEST_CASE("zero adversary intersects everywhere") {
  auto cfg = heisenberg();
  AdversaryFamily zero(cfg.space, parse_exprs({"0", "0", "0"}));
  std::vector<double> eps = {0.1, 0.01};
  auto rep = adversary_intersection_test(cfg.control_system(), zero,
                                         cfg.region("unit_box"), eps,
                                         heis_opts(), 1);
  CHECK(rep.verdict == Verdict::NoObstruction);
}

TEST_CASE("the separation pair: image covered yet adversary obstructed") {
  auto cfg = make_builtin("ex3_field");
  auto sys = cfg.control_system();
  const Region& W = cfg.region("window");
  SearchOptions opts;  // no controls

  auto brockett = brockett_image_test(sys, W, target_grid(2, 0.1, 5), opts);
  auto adversary = adversary_intersection_test(
      sys, cfg.adversary("shear"), W,
      std::vector<double>{0.1, 0.01, 0.001}, opts, 1);

  // asserted jointly: this is the strictly-stronger separation
  CHECK(brockett.covered);
  CHECK(adversary.verdict == Verdict::ObstructionFound);
  CHECK(adversary.evidence.at("min_residual_eps_0.001") > 1e-6);
}

TEST_CASE("unicycle lateral adversary stays out of the image") {
  auto cfg = make_builtin("unicycle");
  auto sys = cfg.control_system();
  auto X = cfg.adversary("lateral");
  SearchOptions opts;
  opts.control_bounds = {{-10, 10}, {-10, 10}};
  std::vector<double> eps = {0.1, 0.01};
  auto rep = adversary_intersection_test(sys, X, cfg.region("camera_n1"),
                                         eps, opts, -1);
  CHECK(rep.verdict == Verdict::ObstructionFound);
  // the minimum of |(cos u - eps sin, sin u + eps cos, v)| is exactly eps
  CHECK(rep.evidence.at("min_residual_eps_0.1") ==
        doctest::Approx(0.1).epsilon(1e-6));
  CHECK(rep.evidence.at("min_residual_eps_0.01") ==
        doctest::Approx(0.01).epsilon(1e-4));
}

TEST_CASE("eps list must be positive and decreasing") {
  auto cfg = heisenberg();
  auto X = cfg.adversary("dz");
  std::vector<double> bad = {0.01, 0.1};
  CHECK_THROWS_AS(
      adversary_intersection_test(cfg.control_system(), X,
                                  cfg.region("unit_box"), bad, heis_opts(),
                                  1),
      std::invalid_argument);
}

TEST_CASE("non-vanishing families are rejected as inconclusive") {
  auto cfg = heisenberg();
  // constant family independent of eps: no uniform vanishing
  AdversaryFamily stuck(cfg.space, parse_exprs({"0", "0", "1"}));
  std::vector<double> eps = {0.1, 0.01};
  auto rep = adversary_intersection_test(cfg.control_system(), stuck,
                                         cfg.region("unit_box"), eps,
                                         heis_opts(), 1);
  CHECK(rep.verdict == Verdict::Inconclusive);
}

TEST_CASE("safety: camera scenario with one obstacle") {
  auto cfg = make_builtin("unicycle");
  auto sys = cfg.control_system();
  SearchOptions opts;
  opts.control_bounds = {{-10, 10}, {-10, 10}};
  std::vector<double> eps = {0.1, 0.01};

  auto rep = safety_test(sys, cfg.region("camera_n1"),
                         cfg.adversary("lateral"), eps, opts);
  CHECK(rep.verdict == Verdict::ObstructionFound);
  CHECK(rep.evidence.at("chi") == -1.0);

  // chi = 0 configuration: the plain ring is a genuine product
  auto ring = safety_test(sys, cfg.region("ring"), cfg.adversary("lateral"),
                          eps, opts);
  CHECK(ring.verdict == Verdict::Inconclusive);
  CHECK(ring.evidence.at("chi") == 0.0);
}

TEST_CASE("safety: heisenberg over the unit ball") {
  auto cfg = heisenberg();
  std::vector<double> eps = {0.1, 0.01};
  auto rep = safety_test(cfg.control_system(), cfg.region("unit_ball"),
                         cfg.adversary("dz"), eps, heis_opts());
  CHECK(rep.verdict == Verdict::ObstructionFound);
  CHECK(rep.evidence.at("chi") == 1.0);
  CHECK(rep.evidence.at("min_residual_eps_0.01") >= 0.01 / 20.0);
}

TEST_CASE("affine span test on the named systems") {
  auto cfg = heisenberg();
  auto sys = cfg.control_system();
  VectorField Y(cfg.space, parse_exprs({"0", "0", "1"}));
  auto samples = cfg.region("unit_box").sample_interior(200, 5);
  CHECK(affine_span_test(sys, Y, samples));

  // positive rescaling changes nothing
  VectorField Y3(cfg.space, parse_exprs({"0", "0", "3"}));
  CHECK(affine_span_test(sys, Y3, samples));

  auto uni = make_builtin("unicycle");
  auto uni_sys = uni.control_system();
  VectorField lateral(uni.space, parse_exprs({"sin(th)", "-cos(th)", "0"}));
  auto uni_samples = uni.region("ring").sample_interior(200, 5);
  CHECK(affine_span_test(uni_sys, lateral, uni_samples));

  // fully actuated plane: the control fields already span
  auto plane = ModelSpace::euclidean({"x", "y"});
  AffineParts aff{VectorField(plane, parse_exprs({"0", "0"})),
                  {VectorField(plane, parse_exprs({"1", "0"})),
                   VectorField(plane, parse_exprs({"0", "1"}))}};
  ControlSystem full(plane, {"u", "v"}, parse_exprs({"u", "v"}), aff);
  VectorField any(plane, parse_exprs({"1", "2"}));
  auto box = Region::box(plane, {{-1, 1}, {-1, 1}});
  CHECK_FALSE(affine_span_test(full, any, box.sample_interior(50, 0)));
}

TEST_CASE("affine span with a drift term") {
  // drift (1, 0): nonzero everywhere, g = {(0,1)}, Y = (0, 0, ...) no...
  auto plane = ModelSpace::euclidean({"x", "y"});
  AffineParts aff{VectorField(plane, parse_exprs({"1", "0"})),
                  {VectorField(plane, parse_exprs({"0", "1"}))}};
  ControlSystem sys(plane, {"u"}, parse_exprs({"1", "u"}), aff);
  auto box = Region::box(plane, {{-1, 1}, {-1, 1}});
  auto samples = box.sample_interior(50, 0);
  // F = (1,0) escapes span{Y, g} for Y = g-direction
  VectorField Yg(plane, parse_exprs({"0", "1"}));
  CHECK(affine_span_test(sys, Yg, samples));
  // but not for Y = drift direction
  VectorField Yf(plane, parse_exprs({"1", "0"}));
  CHECK_FALSE(affine_span_test(sys, Yf, samples));
}

TEST_CASE("verdict assembly respects the chi hypothesis") {
  std::vector<ObstructionReport> span_only = {make_span_report(true, 200)};
  CHECK(stabilizability_verdict(1, span_only).verdict ==
        Verdict::ObstructionFound);
  CHECK(stabilizability_verdict(0, span_only).verdict ==
        Verdict::Inconclusive);
  CHECK(stabilizability_verdict(std::nullopt, span_only).verdict ==
        Verdict::Inconclusive);

  std::vector<ObstructionReport> negative = {make_span_report(false, 200)};
  CHECK(stabilizability_verdict(1, negative).verdict ==
        Verdict::Inconclusive);

  std::vector<ObstructionReport> trans = {
      make_transversality_report(true, 500)};
  CHECK(stabilizability_verdict(2, trans).verdict ==
        Verdict::ObstructionFound);

  // NoObstruction is never emitted by assembly
  for (int chi = -2; chi <= 2; ++chi) {
    auto v = stabilizability_verdict(chi, negative);
    CHECK(v.verdict != Verdict::NoObstruction);
  }
}

TEST_CASE("verdict lists every passing sub-test") {
  std::vector<ObstructionReport> subs = {
      make_span_report(true, 100), make_transversality_report(true, 100)};
  auto v = stabilizability_verdict(1, subs);
  CHECK(v.verdict == Verdict::ObstructionFound);
  CHECK(v.evidence.at("positive_tests") == 2.0);
}

TEST_CASE("verdict soundness under random sub-report combinations") {
  // with chi zero or unavailable, no combination of sub-tests may
  // produce ObstructionFound
  SplitMix64 rng(404);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ObstructionReport> subs;
    if (rng.uniform() < 0.7)
      subs.push_back(make_span_report(rng.uniform() < 0.5, 100));
    if (rng.uniform() < 0.7)
      subs.push_back(make_transversality_report(rng.uniform() < 0.5, 100));
    if (rng.uniform() < 0.5) {
      ObstructionReport adv;
      adv.test = "adversary_intersection_test";
      adv.evidence["all_eps_positive"] = rng.uniform() < 0.5 ? 1.0 : 0.0;
      subs.push_back(std::move(adv));
    }
    std::optional<int> chi =
        rng.uniform() < 0.5 ? std::optional<int>(0) : std::nullopt;
    auto v = stabilizability_verdict(chi, subs);
    CHECK(v.verdict != Verdict::ObstructionFound);
    CHECK(v.verdict != Verdict::NoObstruction);
  }
}

TEST_CASE("span test is invariant under rescaling the control fields") {
  // same distribution with rescaled generators and matching dynamics
  auto sp = ModelSpace::euclidean({"x", "y", "z"});
  AffineParts aff{
      VectorField(sp, parse_exprs({"0", "0", "0"})),
      {VectorField(sp, parse_exprs({"2", "0", "2*y"})),
       VectorField(sp, parse_exprs({"0", "3", "-3*x"}))}};
  ControlSystem scaled(sp, {"u", "v"},
                       parse_exprs({"2*u", "3*v", "2*y*u - 3*x*v"}), aff);
  VectorField Y(sp, parse_exprs({"0", "0", "1"}));
  auto W = Region::box(sp, {{-1, 1}, {-1, 1}, {-1, 1}});
  CHECK(affine_span_test(scaled, Y, W.sample_interior(100, 2)));
}

TEST_CASE("affine decomposition consistency is enforced") {
  auto plane = ModelSpace::euclidean({"x", "y"});
  AffineParts wrong{VectorField(plane, parse_exprs({"1", "0"})),
                    {VectorField(plane, parse_exprs({"1", "0"})),
                     VectorField(plane, parse_exprs({"0", "1"}))}};
  CHECK_THROWS_AS(
      ControlSystem(plane, {"u", "v"}, parse_exprs({"u", "v"}), wrong),
      std::invalid_argument);
}

TEST_CASE("report serialization round trips") {
  auto cfg = heisenberg();
  std::vector<double> eps = {0.1};
  auto rep =
      adversary_intersection_test(cfg.control_system(), cfg.adversary("dz"),
                                  cfg.region("unit_box"), eps, heis_opts(),
                                  1);
  auto j = rep.to_json();
  auto back = ObstructionReport::from_json(j);
  CHECK(back.verdict == rep.verdict);
  CHECK(back.evidence == rep.evidence);
  CHECK(back.assumptions == rep.assumptions);
  CHECK(j.dump() == back.to_json().dump());
}
