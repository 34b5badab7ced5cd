// Acceptance suite: one criterion per check, one pass/fail line each,
// nonzero exit when anything fails. Tolerances are pinned here, not
// calibrated at runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "obstructa/analysis.hpp"
#include "obstructa/config.hpp"
#include "obstructa/degree.hpp"
#include "obstructa/dynamics.hpp"
#include "obstructa/lagrange.hpp"
#include "obstructa/num.hpp"
#include "obstructa/obstruction.hpp"
#include "obstructa/topology.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace obstructa;
using namespace obstructa::testing;

namespace {

int g_failures = 0;

struct Checker {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

void criterion(int number, const std::string& name, double budget_s,
               const std::function<void(Checker&)>& body) {
  Checker c;
  auto start = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.detail = std::string("exception: ") + e.what();
  }
  double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (elapsed > budget_s)
    c.require(false, "exceeded runtime budget of " +
                         std::to_string(budget_s) + " s");
  if (c.ok) {
    std::printf("PASS  %2d  %s  (%.2f s)\n", number, name.c_str(), elapsed);
  } else {
    std::printf("FAIL  %2d  %s  (%.2f s): %s\n", number, name.c_str(),
                elapsed, c.detail.c_str());
    ++g_failures;
  }
  std::fflush(stdout);
}

PlanarField field(const char* fx, const char* fy) {
  return PlanarField{parse_expr(fx), parse_expr(fy)};
}

}  // namespace

int main() {
  // 1. Planar indices of the two named fields, at both radii.
  criterion(1, "index values of the planar examples", 2.0, [](Checker& c) {
    for (double r : {0.5, 1.0}) {
      auto t0 = std::chrono::steady_clock::now();
      int i3 = index_of_zero(field("x^2 - y^2", "4*x*y^2"), 0, 0, r);
      int i4 = index_of_zero(field("x^2 - y^2", "2*x*y"), 0, 0, r);
      double each = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      c.require(i3 == 0, "expected index 0, got " + std::to_string(i3));
      c.require(i4 == 2, "expected index 2, got " + std::to_string(i4));
      c.require(each < 1.0, "single index computation exceeded 1 s");
    }
  });

  // 2. The separation: image test covered, adversary test obstructed.
  criterion(2, "image coverage vs adversary obstruction", 30.0,
            [](Checker& c) {
    auto cfg = make_builtin("ex3_field");
    auto sys = cfg.control_system();
    const Region& W = cfg.region("window");
    SearchOptions opts;
    opts.solver_tol = 1e-8;

    auto brockett = brockett_image_test(sys, W, target_grid(2, 0.1, 5),
                                        opts);
    c.require(brockett.covered, "image test failed to cover a target");
    c.require(brockett.worst_residual <= 1e-8,
              "a target was hit only to " +
                  std::to_string(brockett.worst_residual));

    opts.solver_tol = 1e-6;
    std::vector<double> eps = {1e-1, 1e-2, 1e-3};
    auto adv = adversary_intersection_test(sys, cfg.adversary("shear"), W,
                                           eps, opts, 1);
    for (double e : eps) {
      char key[64];
      std::snprintf(key, sizeof(key), "min_residual_eps_%g", e);
      c.require(adv.evidence.at(key) > 1e-6,
                std::string(key) + " not above 1e-6");
    }
    c.require(adv.verdict == Verdict::ObstructionFound,
              "combined verdict is not ObstructionFound");
  });

  // 3. Heisenberg: residual floors and the span condition.
  criterion(3, "heisenberg adversary floors and span test", 30.0,
            [](Checker& c) {
    auto cfg = make_builtin("heisenberg");
    auto sys = cfg.control_system();
    const Region& W = cfg.region("unit_box");
    SearchOptions opts;
    opts.control_bounds = {{-10, 10}, {-10, 10}};

    std::vector<double> eps = {1e-1, 1e-2, 1e-3};
    auto adv = adversary_intersection_test(sys, cfg.adversary("dz"), W, eps,
                                           opts, 1);
    for (double e : eps) {
      char key[64];
      std::snprintf(key, sizeof(key), "min_residual_eps_%g", e);
      c.require(adv.evidence.at(key) >= e / 20.0,
                std::string(key) + " below the analytic floor eps/20");
    }
    c.require(adv.verdict == Verdict::ObstructionFound,
              "verdict is not ObstructionFound");

    VectorField Y(cfg.space, parse_exprs({"0", "0", "1"}));
    auto samples = W.sample_interior(200, 0);
    c.require(affine_span_test(sys, Y, samples),
              "span condition failed at a sample");
  });

  // 4. Euler characteristic machinery.
  criterion(4, "euler characteristic routes and surfaces", 5.0,
            [](Checker& c) {
    SplitMix64 rng(20260808);
    for (int trial = 0; trial < 50; ++trial) {
      RandomComplex rc = random_complex(rng, 3);
      int cells = euler_char_cells(rc.complex);
      int hom = euler_char_homology(rc.complex);
      c.require(cells == hom, "cell and homology routes disagree");
      c.require(cells == rc.expected_chi, "generator chi mismatch");
    }
    c.require(euler_char_cells(CellComplex::point()) == 1, "point chi");
    c.require(euler_char_cells(CellComplex::circle()) == 0, "circle chi");
    c.require(euler_char_cells(CellComplex::torus()) == 0, "torus chi");
    c.require(euler_char_cells(CellComplex::disk()) == 1, "disk chi");
    c.require(euler_char_homology(CellComplex::torus()) == 0,
              "torus homology chi");

    auto plane = ModelSpace::euclidean({"x", "y"});
    for (int n = 1; n <= 3; ++n) {
      auto ann = Region::annulus(plane, {0, 0}, 1, 2);
      for (int k = 0; k < n; ++k) {
        double ang = kTwoPi * k / n;
        ann.add_obstacle({1.5 * std::cos(ang), 1.5 * std::sin(ang)}, 0.1);
      }
      auto chi = region_euler_char(ann);
      c.require(chi.has_value() && *chi == -n,
                "annulus with " + std::to_string(n) + " obstacles");
    }

    std::vector<SurfaceDescriptor> zeros;
    for (int orientable = 0; orientable <= 1; ++orientable)
      for (unsigned g = orientable ? 0 : 1; g <= 3; ++g)
        for (unsigned b = 0; b <= 3; ++b)
          if (classify_surface_euler({orientable != 0, g, b}) == 0)
            zeros.push_back({orientable != 0, g, b});
    c.require(zeros.size() == 4, "expected exactly four zero-chi surfaces");
    auto has = [&](bool o, unsigned g, unsigned b) {
      for (const auto& s : zeros)
        if (s.orientable == o && s.genus == g &&
            s.boundary_components == b)
          return true;
      return false;
    };
    c.require(has(true, 1, 0), "torus missing");
    c.require(has(true, 0, 2), "cylinder missing");
    c.require(has(false, 1, 1), "Moebius band missing");
    c.require(has(false, 2, 0), "Klein bottle missing");
  });

  // 5. Poincare-Hopf consistency on the two model regions.
  criterion(5, "poincare-hopf consistency", 5.0, [](Checker& c) {
    auto plane = ModelSpace::euclidean({"x", "y"});
    auto disk = Region::ball(plane, {0, 0}, 1);
    auto sink = poincare_hopf_check(field("-x", "-y"), disk,
                                    {{{0.0, 0.0}, 0.5}});
    c.require(sink.inward, "sink not inward");
    c.require(sink.index_sum == 1, "sink index sum");
    c.require(sink.chi == 1, "disk chi");
    c.require(sink.consistent, "sink report inconsistent");

    auto ann = Region::annulus(plane, {0, 0}, 1, 2);
    auto swirl = poincare_hopf_check(
        field("(1.5 - sqrt(x^2 + y^2))*x/sqrt(x^2 + y^2) - "
              "y/sqrt(x^2 + y^2)",
              "(1.5 - sqrt(x^2 + y^2))*y/sqrt(x^2 + y^2) + "
              "x/sqrt(x^2 + y^2)"),
        ann, {});
    c.require(swirl.inward, "annulus field not inward");
    c.require(swirl.index_sum == 0, "annulus index sum");
    c.require(swirl.chi == 0, "annulus chi");
    c.require(swirl.consistent, "annulus report inconsistent");
  });

  // 6. Rolling disk dynamics against the closed form and the oracle.
  criterion(6, "rolling disk simulation and oracle agreement", 20.0,
            [](Checker& c) {
    auto disk = make_rolling_disk(1, 1, 1, 1);
    auto s0 = disk.make_state(Point(disk.space(), {0, 0, 0, 0}),
                              {0, 0, 0, 0});
    auto traj = simulate_constrained(disk, s0,
                                     ControlSchedule::constant({0.0, 1.0}),
                                     2.0, 1e-3);
    const auto& q = traj.positions.back();
    c.require(std::fabs(q[0] - 1.0) <= 1e-6, "x(2) != 1");
    c.require(std::fabs(q[1]) <= 1e-6, "y(2) != 0");
    c.require(std::fabs(q[2]) <= 1e-6, "phi(2) != 0");
    c.require(std::fabs(q[3] - 1.0) <= 1e-6, "theta(2) != 1");
    c.require(traj.max_constraint_residual <= 1e-8,
              "constraint residual above 1e-8");
    c.require(traj.max_energy_mismatch <= 1e-6,
              "energy mismatch above 1e-6");

    SplitMix64 rng(606);
    for (int trial = 0; trial < 10; ++trial) {
      double m = rng.uniform(0.5, 2.0), I = rng.uniform(0.5, 2.0);
      double J = rng.uniform(0.5, 2.0), R = rng.uniform(0.5, 2.0);
      double ut = rng.uniform(0.5, 2.0), up = rng.uniform(0.5, 2.0);
      auto d = make_rolling_disk(m, I, J, R);
      auto st = d.make_state(Point(d.space(), {0, 0, 0, 0}), {0, 0, 0, 0});
      auto t = simulate_constrained(d, st,
                                    ControlSchedule::constant({up, ut}),
                                    2.0, 1e-3);
      auto o = rolling_disk_oracle(m, I, J, R, ut, up, 2.0);
      const auto& qq = t.positions.back();
      c.require(std::fabs(qq[0] - o.x) <= 1e-6, "draw x mismatch");
      c.require(std::fabs(qq[1] - o.y) <= 1e-6, "draw y mismatch");
      c.require(angle_distance(qq[2], o.phi) <= 1e-6, "draw phi mismatch");
      c.require(angle_distance(qq[3], o.theta) <= 1e-6,
                "draw theta mismatch");
    }
  });

  // 7. Transversality of the steering normal, and failure of the
  //    distribution generators.
  criterion(7, "transversality on the rolling disk", 2.0, [](Checker& c) {
    auto disk = make_rolling_disk(1, 1, 1, 1);
    SplitMix64 rng(7007);
    std::vector<Point> samples;
    for (int i = 0; i < 500; ++i)
      samples.emplace_back(disk.space(),
                           std::vector<double>{rng.uniform(-5, 5),
                                               rng.uniform(-5, 5),
                                               rng.uniform(0, kTwoPi),
                                               rng.uniform(0, kTwoPi)});
    VectorField lateral(disk.space(),
                        parse_exprs({"sin(phi)", "-cos(phi)", "0", "0"}));
    c.require(transversality_test(disk, lateral, samples),
              "lateral field failed transversality");
    VectorField roll(disk.space(),
                     parse_exprs({"cos(phi)", "sin(phi)", "0", "1"}));
    c.require(!transversality_test(disk, roll, samples),
              "rolling generator passed transversality");
    VectorField steer(disk.space(), parse_exprs({"0", "0", "1", "0"}));
    c.require(!transversality_test(disk, steer, samples),
              "steering generator passed transversality");
  });

  // 8. Unicycle safety: the camera scenario and its chi = 0 variant.
  criterion(8, "unicycle camera safety", 30.0, [](Checker& c) {
    auto cfg = make_builtin("unicycle");
    auto sys = cfg.control_system();
    SearchOptions opts;
    opts.control_bounds = {{-10, 10}, {-10, 10}};
    std::vector<double> eps = {1e-1, 1e-2};

    auto rep = safety_test(sys, cfg.region("camera_n1"),
                           cfg.adversary("lateral"), eps, opts);
    c.require(rep.verdict == Verdict::ObstructionFound,
              "camera scenario not obstructed");
    c.require(rep.evidence.at("chi") == -1.0, "camera chi is not -1");
    for (double e : eps) {
      char key[64];
      std::snprintf(key, sizeof(key), "min_residual_eps_%g", e);
      c.require(rep.evidence.at(key) > 0.0,
                std::string(key) + " not positive");
    }

    auto ring = safety_test(sys, cfg.region("ring"),
                            cfg.adversary("lateral"), eps, opts);
    c.require(ring.verdict == Verdict::Inconclusive,
              "chi = 0 variant not inconclusive");
  });

  // 9. Planar degree test.
  criterion(9, "planar degree verdicts", 2.0, [](Checker& c) {
    auto plane = ModelSpace::euclidean({"x", "y"});
    ControlSystem doubling(plane, {},
                           parse_exprs({"x^2 - y^2", "2*x*y"}));
    auto rep = coron_h1_test(doubling, 10.0, 1.0);
    c.require(rep.evidence.at("degree") == 2.0, "doubling degree != 2");
    c.require(rep.verdict == Verdict::ObstructionFound,
              "doubling not obstructed");

    ControlSystem sink(plane, {}, parse_exprs({"-x", "-y"}));
    auto rs = coron_h1_test(sink, 10.0, 1.0);
    c.require(rs.evidence.at("degree") == 1.0, "sink degree != 1");
    c.require(rs.verdict == Verdict::Inconclusive,
              "sink not inconclusive");
  });

  // 10. Numerics hygiene: integrator order and exact gradients.
  criterion(10, "integrator order and symbolic gradients", 10.0,
            [](Checker& c) {
    auto line = ModelSpace::euclidean({"x"});
    VectorField f(line, parse_exprs({"-x"}));
    auto err = [&](double h) {
      auto traj = integrate(f, Point(line, {1.0}), 1.0, h);
      return std::fabs(traj.final_state()[0] - std::exp(-1.0));
    };
    double factor = err(0.1) / err(0.05);
    c.require(factor >= 12.0 && factor <= 20.0,
              "RK4 order factor " + std::to_string(factor) +
                  " outside [12, 20]");

    SplitMix64 rng(1010);
    std::vector<std::string> vars = {"x", "y", "z"};
    int checked = 0;
    while (checked < 1000) {
      ScalarExpr e = random_expr(rng, vars, 6);
      ScalarExpr de = e.derivative("x");
      VarAssignment a = random_assignment(rng, vars);
      double sym, fd;
      try {
        if (!finite_difference_reliable(e, "x", a)) continue;
        sym = de.eval(a);
        fd = finite_difference(e, "x", a);
      } catch (const EvalError&) {
        continue;
      }
      if (!std::isfinite(sym) || std::fabs(sym) > 1e6) continue;
      c.require(std::fabs(sym - fd) <= 1e-4 * (1.0 + std::fabs(sym)),
                "gradient mismatch beyond 1e-4 relative");
      ++checked;
    }
  });

  if (g_failures == 0)
    std::printf("acceptance: all criteria passed\n");
  else
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
