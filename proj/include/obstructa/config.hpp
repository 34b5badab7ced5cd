#ifndef OBSTRUCTA_CONFIG_HPP
#define OBSTRUCTA_CONFIG_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "obstructa/control_system.hpp"
#include "obstructa/lagrange.hpp"
#include "obstructa/space.hpp"

namespace obstructa {

/// Configuration error with a JSON-path-ish location for diagnostics.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string where)
      : std::runtime_error(where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct LagrangianBlock {
  ExprMatrix mass;
  ScalarExpr potential;
  ExprMatrix constraints;
  std::vector<std::vector<double>> control_covectors;
};

struct TestParams {
  std::vector<double> eps_list{0.1, 0.01, 0.001};
  std::vector<Interval> control_bounds;
  std::size_t starts = 64;
  std::size_t grid_n = 5;
  double solver_tol = 1e-8;
  double target_radius = 0.1;
  std::uint64_t seed = 0;
};

/// A declared system: spaces, dynamics, optional affine split, optional
/// Lagrangian block, named regions and adversary families, and search
/// parameters. This is the unit the CLI and the C API load and analyze.
struct SystemConfig {
  std::string name;
  SpacePtr space;
  std::vector<std::string> controls;
  std::vector<ScalarExpr> dynamics;  // empty for purely Lagrangian systems
  std::optional<AffineParts> affine;
  std::optional<LagrangianBlock> lagrangian;
  std::optional<VectorField> transverse_field;
  std::map<std::string, Region> regions;
  std::map<std::string, std::vector<ScalarExpr>> adversaries;
  TestParams params;

  ControlSystem control_system() const;
  LagrangianSystem lagrangian_system() const;
  AdversaryFamily adversary(const std::string& name) const;
  const Region& region(const std::string& name) const;
};

SystemConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SystemConfig& cfg);

/// Region (de)serialization, shared with the euler CLI subcommand.
Region region_from_json(SpacePtr space, const nlohmann::json& j,
                        const std::string& where);
nlohmann::json region_to_json(const Region& r);

std::vector<std::string> builtin_names();
SystemConfig make_builtin(const std::string& name);

}  // namespace obstructa

#endif
