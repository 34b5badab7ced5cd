#include "obstructa/analysis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "obstructa/degree.hpp"
#include "obstructa/num.hpp"
#include "obstructa/obstruction.hpp"
#include "obstructa/topology.hpp"

namespace obstructa {

namespace {

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

std::optional<int> parse_target_chi(const std::string& target) {
  if (target == "point") return 1;
  if (target == "circle") return 0;
  if (target.rfind("chi:", 0) == 0) {
    int v = 0;
    auto res = std::from_chars(target.data() + 4,
                               target.data() + target.size(), v);
    if (res.ec == std::errc() && res.ptr == target.data() + target.size())
      return v;
  }
  throw ConfigError("target must be point | circle | chi:<int>", "analyze");
}

const Region& pick_search_region(const SystemConfig& cfg,
                                 const AnalyzeOptions& opts) {
  if (opts.search_region) return cfg.region(*opts.search_region);
  if (cfg.regions.empty())
    throw ConfigError("no regions configured", cfg.name);
  for (const char* preferred : {"window", "unit_box"}) {
    auto it = cfg.regions.find(preferred);
    if (it != cfg.regions.end()) return it->second;
  }
  return cfg.regions.begin()->second;
}

SearchOptions search_options(const SystemConfig& cfg,
                             const AnalyzeOptions& opts) {
  SearchOptions s;
  s.starts = cfg.params.starts;
  s.solver_tol = cfg.params.solver_tol;
  s.seed = opts.seed.value_or(cfg.params.seed);
  s.control_bounds = cfg.params.control_bounds;
  return s;
}

/// Sampling box over the configuration space for Lagrangian checks:
/// [-2, 2] on Real factors, full circle on Angle factors.
Region default_sample_box(const SpacePtr& space) {
  std::vector<Interval> ivs(space->real_indices().size(),
                            Interval{-2.0, 2.0});
  return Region::box(space, std::move(ivs));
}

}  // namespace

nlohmann::json run_analyze(const SystemConfig& cfg,
                           const AnalyzeOptions& opts) {
  nlohmann::json out;
  out["system"] = cfg.name;
  const std::uint64_t seed = opts.seed.value_or(cfg.params.seed);
  out["seed"] = seed;

  std::vector<double> eps =
      opts.eps_list.value_or(cfg.params.eps_list);

  auto pick_adversary = [&]() -> std::optional<std::string> {
    if (opts.adversary) return opts.adversary;
    if (!cfg.adversaries.empty()) return cfg.adversaries.begin()->first;
    return std::nullopt;
  };

  if (opts.safe_set) {
    out["analysis"] = "safety";
    auto adv_name = pick_adversary();
    if (!adv_name)
      throw ConfigError("safety analysis needs an adversary family",
                        cfg.name);
    out["adversary"] = *adv_name;
    out["safe_set"] = *opts.safe_set;
    ObstructionReport rep = safety_test(
        cfg.control_system(), cfg.region(*opts.safe_set),
        cfg.adversary(*adv_name), eps, search_options(cfg, opts));
    out["verdict"] = std::string(verdict_name(rep.verdict));
    out["evidence"] = rep.evidence;
    out["assumptions"] = rep.assumptions;
    out["subtests"] = nlohmann::json::array({rep.to_json()});
    return out;
  }

  out["analysis"] = "stabilizability";
  out["target"] = opts.target;
  std::optional<int> chi = parse_target_chi(opts.target);
  if (chi) out["chi"] = *chi;

  std::vector<ObstructionReport> subs;
  nlohmann::json subtests = nlohmann::json::array();

  if (opts.brockett) {
    const Region& W = pick_search_region(cfg, opts);
    auto targets = target_grid(cfg.space->dimension(),
                               cfg.params.target_radius, cfg.params.grid_n);
    BrockettReport br = brockett_image_test(cfg.control_system(), W, targets,
                                            search_options(cfg, opts));
    nlohmann::json bj;
    bj["test"] = "brockett_image_test";
    bj["covered"] = br.covered;
    bj["targets"] = br.results.size();
    bj["worst_residual"] = br.worst_residual;
    nlohmann::json misses = nlohmann::json::array();
    for (const auto& t : br.results)
      if (!t.hit)
        misses.push_back(
            {{"target", t.target}, {"best_residual", t.best_residual}});
    bj["misses"] = std::move(misses);
    subtests.push_back(std::move(bj));
    out["brockett_covered"] = br.covered;
  }

  if (auto adv_name = pick_adversary(); adv_name && !cfg.dynamics.empty()) {
    const Region& W = pick_search_region(cfg, opts);
    ObstructionReport rep = adversary_intersection_test(
        cfg.control_system(), cfg.adversary(*adv_name), W, eps,
        search_options(cfg, opts), chi);
    out["adversary"] = *adv_name;
    subtests.push_back(rep.to_json());
    subs.push_back(std::move(rep));
  }

  if (cfg.affine && cfg.transverse_field && !cfg.dynamics.empty()) {
    const Region& W = pick_search_region(cfg, opts);
    auto samples = W.sample_interior(200, seed);
    bool holds =
        affine_span_test(cfg.control_system(), *cfg.transverse_field,
                         samples);
    ObstructionReport rep = make_span_report(holds, samples.size());
    subtests.push_back(rep.to_json());
    subs.push_back(std::move(rep));
  }

  if (cfg.lagrangian && cfg.transverse_field) {
    LagrangianSystem sys = cfg.lagrangian_system();
    Region box = default_sample_box(cfg.space);
    auto samples = box.sample_interior(500, seed);
    bool regular = regularity_check(sys, samples);
    bool transversal =
        regular && transversality_test(sys, *cfg.transverse_field, samples);
    ObstructionReport rep =
        make_transversality_report(transversal, samples.size());
    rep.evidence["regular"] = regular ? 1.0 : 0.0;
    subtests.push_back(rep.to_json());
    subs.push_back(std::move(rep));
  }

  // planar point targets additionally get the first-homology degree test;
  // it carries its own verdict rather than feeding the chi assembly
  bool coron_obstruction = false;
  if (opts.target == "point" && cfg.space->dimension() == 2 &&
      !cfg.dynamics.empty()) {
    try {
      ObstructionReport rep =
          coron_h1_test(cfg.control_system(),
                        std::numeric_limits<double>::infinity(), 1.0);
      coron_obstruction = rep.verdict == Verdict::ObstructionFound;
      subtests.push_back(rep.to_json());
    } catch (const DegreeError&) {
      // field vanishes on the probe circle; skip quietly
    }
  }

  ObstructionReport verdict = stabilizability_verdict(chi, subs);
  out["subtests"] = std::move(subtests);
  Verdict final_verdict = coron_obstruction ? Verdict::ObstructionFound
                                            : verdict.verdict;
  out["verdict"] = std::string(verdict_name(final_verdict));
  out["evidence"] = verdict.evidence;
  if (coron_obstruction)
    verdict.assumptions.push_back(
        "obstruction established by coron_h1_test");
  out["assumptions"] = verdict.assumptions;
  return out;
}

SimulateResult run_simulate(const SystemConfig& cfg,
                            const SimulateOptions& opts) {
  SimulateResult res;
  const std::size_t n = cfg.space->dimension();
  std::vector<double> x0 = opts.initial_state;
  if (x0.empty()) x0.assign(n, 0.0);
  if (x0.size() != n)
    throw ConfigError("initial state dimension mismatch", cfg.name);

  if (cfg.lagrangian) {
    LagrangianSystem sys = cfg.lagrangian_system();
    std::vector<double> v0 = opts.initial_velocity;
    if (v0.empty()) v0.assign(n, 0.0);
    std::vector<double> u = opts.control;
    if (u.empty()) u.assign(sys.control_dim(), 0.0);
    auto traj = simulate_constrained(
        sys, sys.make_state(Point(cfg.space, x0), v0),
        ControlSchedule::constant(u), opts.duration, opts.step);
    res.csv = traj.to_csv();
    res.report["system"] = cfg.name;
    res.report["kind"] = "lagrangian";
    res.report["max_constraint_residual"] = traj.max_constraint_residual;
    res.report["max_energy_mismatch"] = traj.max_energy_mismatch;
    res.report["final_time"] = traj.times.back();
    res.report["final_position"] = traj.positions.back();
    res.report["final_velocity"] = traj.velocities.back();
    return res;
  }

  ControlSystem sys = cfg.control_system();
  std::vector<double> u = opts.control;
  if (u.empty()) u.assign(sys.control_dim(), 0.0);
  if (u.size() != sys.control_dim())
    throw ConfigError("control dimension mismatch", cfg.name);
  std::vector<ScalarExpr> uexpr;
  for (double v : u) uexpr.push_back(ScalarExpr::constant(v));
  VectorField field = sys.close_loop(uexpr);
  auto traj = integrate(field, Point(cfg.space, x0), opts.duration,
                        opts.step);
  res.csv = traj.to_csv();
  res.report["system"] = cfg.name;
  res.report["kind"] = "first_order";
  res.report["final_time"] = traj.final_time();
  res.report["final_state"] = std::vector<double>(
      traj.final_state().coords().begin(), traj.final_state().coords().end());
  return res;
}

// --- phase portrait -------------------------------------------------------

namespace {

struct PolyPoint {
  double x, y, speed;
};

}  // namespace

std::string run_portrait(const SystemConfig& cfg,
                         const PortraitOptions& opts) {
  if (cfg.space->dimension() != 2)
    throw ConfigError("portrait requires a planar system", cfg.name);
  PlanarField field =
      PlanarField::from_field(cfg.control_system().zero_control_section());

  const double xmin = opts.window[0], xmax = opts.window[1];
  const double ymin = opts.window[2], ymax = opts.window[3];
  if (!(xmin < xmax && ymin < ymax))
    throw ConfigError("portrait window is empty", cfg.name);
  const double h = (xmax - xmin) / 400.0;
  const std::size_t max_steps = 500;
  constexpr double kSpeedFloor = 1e-8;

  auto inside = [&](double x, double y) {
    return x >= xmin && x <= xmax && y >= ymin && y <= ymax;
  };

  // normalized-field RK4 step (arclength parametrization); direction
  // +1/-1 traces the streamline forward/backward from the seed
  auto unit = [&](double x, double y, double dir,
                  std::array<double, 2>& out) {
    auto f = field.eval(x, y);
    double n = std::hypot(f[0], f[1]);
    if (n < kSpeedFloor) return false;
    out = {dir * f[0] / n, dir * f[1] / n};
    return true;
  };
  auto step = [&](double& x, double& y, double dir) {
    std::array<double, 2> k1, k2, k3, k4;
    if (!unit(x, y, dir, k1)) return false;
    if (!unit(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1], dir, k2))
      return false;
    if (!unit(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1], dir, k3))
      return false;
    if (!unit(x + h * k3[0], y + h * k3[1], dir, k4)) return false;
    x += h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    y += h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    return true;
  };

  SplitMix64 rng(opts.seed * 0x9e3779b97f4a7c15ULL + 1);
  std::vector<std::vector<PolyPoint>> lines;
  double max_speed = 0.0;

  const double cw = (xmax - xmin) / static_cast<double>(opts.density);
  const double ch = (ymax - ymin) / static_cast<double>(opts.density);
  for (std::size_t i = 0; i < opts.density; ++i) {
    for (std::size_t j = 0; j < opts.density; ++j) {
      double sx = xmin + (static_cast<double>(i) + 0.5) * cw +
                  0.2 * cw * (rng.uniform() - 0.5);
      double sy = ymin + (static_cast<double>(j) + 0.5) * ch +
                  0.2 * ch * (rng.uniform() - 0.5);
      auto f0 = field.eval(sx, sy);
      if (std::hypot(f0[0], f0[1]) < kSpeedFloor) continue;

      // trace backward then forward, joining at the seed
      std::vector<PolyPoint> line;
      for (double dir : {-1.0, 1.0}) {
        std::vector<PolyPoint> half;
        double x = sx, y = sy;
        for (std::size_t k = 0; k < max_steps / 2; ++k) {
          if (!step(x, y, dir) || !inside(x, y)) break;
          auto f = field.eval(x, y);
          half.push_back({x, y, std::hypot(f[0], f[1])});
        }
        if (dir < 0.0) {
          std::reverse(half.begin(), half.end());
          line = std::move(half);
          auto fs = field.eval(sx, sy);
          line.push_back({sx, sy, std::hypot(fs[0], fs[1])});
        } else {
          line.insert(line.end(), half.begin(), half.end());
        }
      }
      if (line.size() < 4) continue;
      for (const auto& p : line) max_speed = std::max(max_speed, p.speed);
      lines.push_back(std::move(line));
    }
  }

  // SVG document; world coordinates are mapped linearly with the y axis
  // flipped, chunked polylines carry a width proportional to local speed
  const double size = opts.size_px;
  auto tx = [&](double x) { return (x - xmin) / (xmax - xmin) * size; };
  auto ty = [&](double y) { return (ymax - y) / (ymax - ymin) * size; };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         format_double(size) + "\" height=\"" + format_double(size) +
         "\" viewBox=\"0 0 " + format_double(size) + " " +
         format_double(size) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  constexpr std::size_t kChunk = 8;
  for (const auto& line : lines) {
    for (std::size_t start = 0; start + 1 < line.size();
         start += kChunk - 1) {
      std::size_t end = std::min(start + kChunk, line.size());
      double w = max_speed > 0.0
                     ? 0.25 + 2.25 * std::min(line[start].speed / max_speed,
                                              1.0)
                     : 0.25;
      svg += "<polyline fill=\"none\" stroke=\"#1a1a60\" stroke-opacity=\""
             "0.85\" stroke-width=\"" +
             format_double(w) + "\" points=\"";
      for (std::size_t k = start; k < end; ++k) {
        if (k > start) svg += ' ';
        svg += format_double(tx(line[k].x)) + "," +
               format_double(ty(line[k].y));
      }
      svg += "\"/>\n";
    }
  }
  svg += "</svg>\n";
  return svg;
}

int run_index(const SystemConfig& cfg, double cx, double cy, double radius) {
  PlanarField field =
      PlanarField::from_field(cfg.control_system().zero_control_section());
  return index_of_zero(field, cx, cy, radius);
}

}  // namespace obstructa
