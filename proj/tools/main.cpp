// obstructa command line: analyze | simulate | portrait | euler | index.
// Talks to the library exclusively through the C API in obstructa.h.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "obstructa.h"

namespace {

// exit-code contract: 0 completed, 2 config error, 3 blow-up, 4 degree
// failure, 1 anything else
int exit_code_for(obx_status status) {
  switch (status) {
    case OBX_OK:
      return 0;
    case OBX_ERR_PARSE:
    case OBX_ERR_INVALID_ARGUMENT:
    case OBX_ERR_UNSUPPORTED:
      return 2;
    case OBX_ERR_BLOWUP:
      return 3;
    case OBX_ERR_DEGREE:
      return 4;
    default:
      return 1;
  }
}

[[noreturn]] void die(obx_status status) {
  std::cerr << "error: " << obx_status_name(status) << ": "
            << obx_last_error() << "\n";
  std::exit(exit_code_for(status));
}

struct SystemHandle {
  obx_system* sys = nullptr;
  ~SystemHandle() { obx_system_free(sys); }
};

struct OwnedString {
  char* s = nullptr;
  ~OwnedString() { obx_string_free(s); }
  std::string str() const { return s ? s : ""; }
};

// Load a builtin by name or a JSON config by path.
void load_system(const std::string& name_or_path, SystemHandle& out) {
  if (std::filesystem::exists(name_or_path)) {
    std::ifstream in(name_or_path);
    std::stringstream ss;
    ss << in.rdbuf();
    obx_status st = obx_system_from_json(ss.str().c_str(), &out.sys);
    if (st != OBX_OK) die(st);
    return;
  }
  obx_status st = obx_system_builtin(name_or_path.c_str(), &out.sys);
  if (st != OBX_OK) die(st);
}

// Write through a temp file so consumers never observe partial output.
void write_atomic(const std::string& path, const std::string& content) {
  std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      std::cerr << "error: cannot write " << tmp << "\n";
      std::exit(1);
    }
    out << content;
  }
  std::filesystem::rename(tmp, target);
}

void emit(const std::string& content, const std::string& out_path) {
  if (out_path.empty())
    std::cout << content;
  else
    write_atomic(out_path, content);
}

std::vector<double> parse_csv_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stod(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"obstructa: topological obstruction tests for "
               "continuous-feedback stabilization and safety"};
  app.require_subcommand(1);

  std::string out_path;
  bool json_output = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  app.add_option("--out", out_path, "Write the result to this path")
      ->capture_default_str();
  app.add_flag("--json", json_output, "Print the full JSON report");
  app.add_option("--seed", seed, "Deterministic seed for sampled searches")
      ->each([&](const std::string&) { seed_set = true; });

  // --- analyze ---------------------------------------------------------
  auto* analyze = app.add_subcommand(
      "analyze", "Run the configured obstruction tests on a system");
  analyze->fallthrough();
  std::string a_system, a_target = "point", a_safe_set, a_adversary,
              a_region, a_eps;
  bool a_brockett = false;
  analyze->add_option("system", a_system, "Builtin name or config path")
      ->required();
  analyze->add_option("--target", a_target,
                      "Target set: point | circle | chi:<int>");
  analyze->add_option("--safe-set", a_safe_set,
                      "Region name; switches to the safety analysis");
  analyze->add_flag("--brockett", a_brockett, "Also run the image test");
  analyze->add_option("--adversary", a_adversary, "Adversary family name");
  analyze->add_option("--region", a_region, "Search region name");
  analyze->add_option("--eps", a_eps, "Comma-separated eps sweep");

  // --- simulate --------------------------------------------------------
  auto* simulate = app.add_subcommand(
      "simulate", "Integrate a trajectory and emit CSV");
  simulate->fallthrough();
  std::string s_system, s_state, s_velocity, s_control;
  double s_T = 1.0, s_h = 1e-3;
  simulate->add_option("system", s_system, "Builtin name or config path")
      ->required();
  simulate->add_option("--state", s_state, "Initial state, comma-separated");
  simulate->add_option("--velocity", s_velocity,
                       "Initial velocity (Lagrangian systems)");
  simulate->add_option("--control", s_control,
                       "Constant control vector, comma-separated");
  simulate->add_option("-T,--duration", s_T, "Duration")
      ->capture_default_str();
  simulate->add_option("-s,--step", s_h, "Step size")
      ->capture_default_str();

  // --- portrait --------------------------------------------------------
  auto* portrait = app.add_subcommand(
      "portrait", "Streamline phase portrait of a planar system (SVG)");
  portrait->fallthrough();
  std::string p_system, p_window;
  std::size_t p_density = 12;
  portrait->add_option("system", p_system, "Builtin name or config path")
      ->required();
  portrait->add_option("--window", p_window,
                       "xmin,xmax,ymin,ymax (default -1,1,-1,1)");
  portrait->add_option("--density", p_density, "Seeds per axis")
      ->capture_default_str();

  // --- euler -----------------------------------------------------------
  auto* euler = app.add_subcommand(
      "euler", "Euler characteristic of a complex, surface, or region");
  euler->fallthrough();
  std::string e_complex, e_surface, e_region, e_region_file;
  unsigned e_genus = 0, e_boundary = 0, e_obstacles = 0;
  euler->add_option("--complex", e_complex, "Cell complex JSON file");
  euler->add_option("--surface", e_surface,
                    "orientable | nonorientable (with --genus/--boundary)");
  euler->add_option("--genus", e_genus, "Surface genus");
  euler->add_option("--boundary", e_boundary, "Boundary components");
  euler->add_option("--region", e_region,
                    "Canonical planar region: disk | annulus");
  euler->add_option("--obstacles", e_obstacles, "Number of obstacles");
  euler->add_option("--region-file", e_region_file,
                    "JSON file with {\"space\": ..., \"region\": ...}");

  // --- index -----------------------------------------------------------
  auto* index = app.add_subcommand(
      "index", "Index of an isolated zero of a planar field");
  index->fallthrough();
  std::string i_system, i_center = "0,0";
  double i_radius = 1.0;
  index->add_option("system", i_system, "Builtin name or config path")
      ->required();
  index->add_option("--center", i_center, "Zero location x,y")
      ->capture_default_str();
  index->add_option("--radius", i_radius, "Circle radius")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  if (analyze->parsed()) {
    SystemHandle sys;
    load_system(a_system, sys);
    nlohmann::json opts;
    opts["target"] = a_target;
    if (!a_safe_set.empty()) opts["safe_set"] = a_safe_set;
    if (a_brockett) opts["brockett"] = true;
    if (!a_adversary.empty()) opts["adversary"] = a_adversary;
    if (!a_region.empty()) opts["region"] = a_region;
    if (!a_eps.empty()) opts["eps_list"] = parse_csv_doubles(a_eps);
    if (seed_set) opts["seed"] = seed;
    OwnedString report;
    obx_status st = obx_analyze(sys.sys, opts.dump().c_str(), &report.s);
    if (st != OBX_OK) die(st);
    if (!out_path.empty()) write_atomic(out_path, report.str() + "\n");
    if (json_output || out_path.empty()) {
      std::cout << report.str() << "\n";
    } else {
      auto j = nlohmann::json::parse(report.str());
      std::cout << j["system"].get<std::string>() << ": "
                << j["verdict"].get<std::string>() << "\n";
    }
    return 0;
  }

  if (simulate->parsed()) {
    SystemHandle sys;
    load_system(s_system, sys);
    nlohmann::json opts;
    if (!s_state.empty()) opts["initial_state"] = parse_csv_doubles(s_state);
    if (!s_velocity.empty())
      opts["initial_velocity"] = parse_csv_doubles(s_velocity);
    if (!s_control.empty()) opts["control"] = parse_csv_doubles(s_control);
    opts["duration"] = s_T;
    opts["step"] = s_h;
    OwnedString csv, report;
    obx_status st =
        obx_simulate(sys.sys, opts.dump().c_str(), &csv.s, &report.s);
    if (st != OBX_OK) die(st);
    emit(csv.str(), out_path);
    std::cerr << report.str() << "\n";
    return 0;
  }

  if (portrait->parsed()) {
    SystemHandle sys;
    load_system(p_system, sys);
    nlohmann::json opts;
    if (!p_window.empty()) opts["window"] = parse_csv_doubles(p_window);
    opts["density"] = p_density;
    if (seed_set) opts["seed"] = seed;
    OwnedString svg;
    obx_status st = obx_portrait(sys.sys, opts.dump().c_str(), &svg.s);
    if (st != OBX_OK) die(st);
    emit(svg.str(), out_path);
    return 0;
  }

  if (euler->parsed()) {
    if (!e_complex.empty()) {
      std::ifstream in(e_complex);
      if (!in) {
        std::cerr << "error: cannot read " << e_complex << "\n";
        return 2;
      }
      std::stringstream ss;
      ss << in.rdbuf();
      int chi = 0;
      OwnedString betti;
      obx_status st = obx_euler_complex(ss.str().c_str(), &chi, &betti.s);
      if (st != OBX_OK) die(st);
      std::cout << chi << "\n";
      std::cout << "betti: " << betti.str() << "\n";
      return 0;
    }
    if (!e_surface.empty()) {
      int orientable;
      if (e_surface == "orientable")
        orientable = 1;
      else if (e_surface == "nonorientable")
        orientable = 0;
      else {
        std::cerr << "error: --surface takes orientable | nonorientable\n";
        return 2;
      }
      int chi = 0;
      obx_status st = obx_euler_surface(orientable, e_genus, e_boundary,
                                        &chi);
      if (st != OBX_OK) die(st);
      std::cout << chi << "\n";
      return 0;
    }
    if (!e_region.empty()) {
      // canonical planar shapes with obstacles spread on a middle circle
      nlohmann::json space = {
          {"coordinates",
           {{{"name", "x"}, {"kind", "real"}},
            {{"name", "y"}, {"kind", "real"}}}}};
      nlohmann::json region;
      double ring;
      if (e_region == "disk") {
        region["base"] = {{"kind", "ball"}, {"center", {0, 0}},
                          {"radius", 1}};
        ring = 0.5;
      } else if (e_region == "annulus") {
        region["base"] = {{"kind", "annulus"},
                          {"center", {0, 0}},
                          {"inner", 1},
                          {"outer", 2}};
        ring = 1.5;
      } else {
        std::cerr << "error: --region takes disk | annulus\n";
        return 2;
      }
      if (e_obstacles > 0) {
        nlohmann::json obs = nlohmann::json::array();
        for (unsigned k = 0; k < e_obstacles; ++k) {
          double ang = 6.283185307179586 * k / e_obstacles;
          obs.push_back({{"center",
                          {ring * std::cos(ang), ring * std::sin(ang)}},
                         {"radius", 0.05}});
        }
        region["obstacles"] = std::move(obs);
      }
      int chi = 0;
      obx_status st = obx_euler_region(space.dump().c_str(),
                                       region.dump().c_str(), &chi);
      if (st != OBX_OK) die(st);
      std::cout << chi << "\n";
      return 0;
    }
    if (!e_region_file.empty()) {
      std::ifstream in(e_region_file);
      if (!in) {
        std::cerr << "error: cannot read " << e_region_file << "\n";
        return 2;
      }
      nlohmann::json j;
      try {
        in >> j;
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
      int chi = 0;
      obx_status st = obx_euler_region(j.at("space").dump().c_str(),
                                       j.at("region").dump().c_str(), &chi);
      if (st != OBX_OK) die(st);
      std::cout << chi << "\n";
      return 0;
    }
    std::cerr << "error: euler needs --complex, --surface, --region, or "
                 "--region-file\n";
    return 2;
  }

  if (index->parsed()) {
    SystemHandle sys;
    load_system(i_system, sys);
    auto center = parse_csv_doubles(i_center);
    if (center.size() != 2) {
      std::cerr << "error: --center takes x,y\n";
      return 2;
    }
    int result = 0;
    obx_status st =
        obx_index(sys.sys, center[0], center[1], i_radius, &result);
    if (st != OBX_OK) die(st);
    std::cout << result << "\n";
    return 0;
  }

  return 0;
}
