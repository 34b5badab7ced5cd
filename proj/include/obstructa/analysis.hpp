#ifndef OBSTRUCTA_ANALYSIS_HPP
#define OBSTRUCTA_ANALYSIS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "obstructa/config.hpp"

namespace obstructa {

struct AnalyzeOptions {
  /// Target set descriptor: "point" (chi 1), "circle" (chi 0), or
  /// "chi:<integer>".
  std::string target = "point";
  /// When set, run the safety analysis over this region instead of the
  /// stabilizability analysis.
  std::optional<std::string> safe_set;
  bool brockett = false;
  std::optional<std::string> adversary;      // default: first configured
  std::optional<std::string> search_region;  // default: window-ish region
  std::optional<std::vector<double>> eps_list;
  std::optional<std::uint64_t> seed;
};

nlohmann::json run_analyze(const SystemConfig& cfg,
                           const AnalyzeOptions& opts);

struct SimulateOptions {
  std::vector<double> initial_state;     // defaults to the origin
  std::vector<double> initial_velocity;  // Lagrangian systems only
  std::vector<double> control;           // constant control vector
  double duration = 1.0;
  double step = 1e-3;
};

struct SimulateResult {
  std::string csv;
  nlohmann::json report;
};

SimulateResult run_simulate(const SystemConfig& cfg,
                            const SimulateOptions& opts);

struct PortraitOptions {
  std::array<double, 4> window{-1.0, 1.0, -1.0, 1.0};  // xmin xmax ymin ymax
  std::size_t density = 12;  // streamline seeds per axis
  std::uint64_t seed = 0;
  double size_px = 640.0;
};

/// Streamline phase portrait of the planar u = 0 section as a standalone
/// SVG document; stroke width is proportional to the local speed.
std::string run_portrait(const SystemConfig& cfg,
                         const PortraitOptions& opts);

int run_index(const SystemConfig& cfg, double cx, double cy, double radius);

}  // namespace obstructa

#endif
