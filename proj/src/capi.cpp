#include "obstructa.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "obstructa/analysis.hpp"
#include "obstructa/config.hpp"
#include "obstructa/degree.hpp"
#include "obstructa/topology.hpp"

namespace {

thread_local std::string g_last_error = "no error";

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) return nullptr;
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

obx_status fail(obx_status code, const std::string& message) {
  g_last_error = message;
  return code;
}

/// Run `fn`, translating exceptions into status codes.
template <typename Fn>
obx_status guarded(Fn&& fn) {
  using namespace obstructa;
  try {
    return fn();
  } catch (const ParseError& e) {
    return fail(OBX_ERR_PARSE, std::string(e.what()) + " (offset " +
                                   std::to_string(e.position()) + ")");
  } catch (const ConfigError& e) {
    return fail(OBX_ERR_PARSE, e.what());
  } catch (const nlohmann::json::parse_error& e) {
    return fail(OBX_ERR_PARSE, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(OBX_ERR_PARSE, e.what());
  } catch (const EvalError& e) {
    return fail(OBX_ERR_DOMAIN, e.what());
  } catch (const BlowupError& e) {
    return fail(OBX_ERR_BLOWUP, e.what());
  } catch (const DegreeError& e) {
    return fail(OBX_ERR_DEGREE, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(OBX_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(OBX_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(OBX_ERR_INTERNAL, "unknown error");
  }
}

obstructa::AnalyzeOptions analyze_options_from_json(const char* json) {
  obstructa::AnalyzeOptions opts;
  if (!json || std::string_view(json).empty()) return opts;
  nlohmann::json j = nlohmann::json::parse(json);
  if (j.contains("target")) opts.target = j.at("target").get<std::string>();
  if (j.contains("safe_set"))
    opts.safe_set = j.at("safe_set").get<std::string>();
  if (j.contains("brockett")) opts.brockett = j.at("brockett").get<bool>();
  if (j.contains("adversary"))
    opts.adversary = j.at("adversary").get<std::string>();
  if (j.contains("region"))
    opts.search_region = j.at("region").get<std::string>();
  if (j.contains("eps_list"))
    opts.eps_list = j.at("eps_list").get<std::vector<double>>();
  if (j.contains("seed")) opts.seed = j.at("seed").get<std::uint64_t>();
  return opts;
}

obstructa::SimulateOptions simulate_options_from_json(const char* json) {
  obstructa::SimulateOptions opts;
  if (!json || std::string_view(json).empty()) return opts;
  nlohmann::json j = nlohmann::json::parse(json);
  if (j.contains("initial_state"))
    opts.initial_state = j.at("initial_state").get<std::vector<double>>();
  if (j.contains("initial_velocity"))
    opts.initial_velocity =
        j.at("initial_velocity").get<std::vector<double>>();
  if (j.contains("control"))
    opts.control = j.at("control").get<std::vector<double>>();
  if (j.contains("duration"))
    opts.duration = j.at("duration").get<double>();
  if (j.contains("step")) opts.step = j.at("step").get<double>();
  return opts;
}

obstructa::PortraitOptions portrait_options_from_json(const char* json) {
  obstructa::PortraitOptions opts;
  if (!json || std::string_view(json).empty()) return opts;
  nlohmann::json j = nlohmann::json::parse(json);
  if (j.contains("window")) {
    auto w = j.at("window").get<std::vector<double>>();
    if (w.size() != 4)
      throw std::invalid_argument("window must be [xmin, xmax, ymin, ymax]");
    opts.window = {w[0], w[1], w[2], w[3]};
  }
  if (j.contains("density"))
    opts.density = j.at("density").get<std::size_t>();
  if (j.contains("seed")) opts.seed = j.at("seed").get<std::uint64_t>();
  return opts;
}

}  // namespace

struct obx_expr {
  obstructa::ScalarExpr value;
};

struct obx_system {
  obstructa::SystemConfig cfg;
};

extern "C" {

const char* obx_version(void) { return "0.1.0"; }

const char* obx_status_name(obx_status status) {
  switch (status) {
    case OBX_OK:
      return "ok";
    case OBX_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case OBX_ERR_PARSE:
      return "parse error";
    case OBX_ERR_DOMAIN:
      return "domain error";
    case OBX_ERR_BLOWUP:
      return "trajectory blow-up";
    case OBX_ERR_DEGREE:
      return "degree computation failure";
    case OBX_ERR_UNSUPPORTED:
      return "unsupported input";
    case OBX_ERR_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

const char* obx_last_error(void) { return g_last_error.c_str(); }

void obx_string_free(char* s) { std::free(s); }

obx_status obx_expr_parse(const char* text, obx_expr** out) {
  if (!text || !out)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new obx_expr{obstructa::parse_expr(text)};
    return OBX_OK;
  });
}

void obx_expr_free(obx_expr* e) { delete e; }

obx_status obx_expr_eval(const obx_expr* e, const char* const* names,
                         const double* values, size_t count, double* out) {
  if (!e || !out || (count > 0 && (!names || !values)))
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    obstructa::VarAssignment a;
    for (size_t i = 0; i < count; ++i) {
      if (!names[i])
        throw std::invalid_argument("null variable name");
      a.set(names[i], values[i]);
    }
    *out = e->value.eval(a);
    return OBX_OK;
  });
}

obx_status obx_expr_derivative(const obx_expr* e, const char* var,
                               obx_expr** out) {
  if (!e || !var || !out)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new obx_expr{e->value.derivative(var)};
    return OBX_OK;
  });
}

obx_status obx_expr_to_string(const obx_expr* e, char** out) {
  if (!e || !out) return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(e->value.str());
    return *out ? OBX_OK : fail(OBX_ERR_INTERNAL, "allocation failed");
  });
}

obx_status obx_system_builtin(const char* name, obx_system** out) {
  if (!name || !out)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new obx_system{obstructa::make_builtin(name)};
    return OBX_OK;
  });
}

obx_status obx_system_from_json(const char* config_json, obx_system** out) {
  if (!config_json || !out)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new obx_system{
        obstructa::config_from_json(nlohmann::json::parse(config_json))};
    return OBX_OK;
  });
}

obx_status obx_system_to_json(const obx_system* sys, char** out) {
  if (!sys || !out) return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *out = dup_string(obstructa::config_to_json(sys->cfg).dump(2));
    return *out ? OBX_OK : fail(OBX_ERR_INTERNAL, "allocation failed");
  });
}

void obx_system_free(obx_system* sys) { delete sys; }

obx_status obx_analyze(const obx_system* sys, const char* options_json,
                       char** report_json) {
  if (!sys || !report_json)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto report =
        obstructa::run_analyze(sys->cfg, analyze_options_from_json(options_json));
    *report_json = dup_string(report.dump(2));
    return *report_json ? OBX_OK
                        : fail(OBX_ERR_INTERNAL, "allocation failed");
  });
}

obx_status obx_simulate(const obx_system* sys, const char* options_json,
                        char** csv, char** report_json) {
  if (!sys || !csv || !report_json)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto res = obstructa::run_simulate(sys->cfg,
                                       simulate_options_from_json(options_json));
    *csv = dup_string(res.csv);
    *report_json = dup_string(res.report.dump(2));
    if (!*csv || !*report_json)
      return fail(OBX_ERR_INTERNAL, "allocation failed");
    return OBX_OK;
  });
}

obx_status obx_portrait(const obx_system* sys, const char* options_json,
                        char** svg) {
  if (!sys || !svg) return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *svg = dup_string(
        obstructa::run_portrait(sys->cfg, portrait_options_from_json(options_json)));
    return *svg ? OBX_OK : fail(OBX_ERR_INTERNAL, "allocation failed");
  });
}

obx_status obx_index(const obx_system* sys, double cx, double cy,
                     double radius, int* index) {
  if (!sys || !index)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *index = obstructa::run_index(sys->cfg, cx, cy, radius);
    return OBX_OK;
  });
}

obx_status obx_euler_complex(const char* complex_json, int* chi,
                             char** betti_json) {
  if (!complex_json || !chi)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    auto complex = obstructa::CellComplex::from_json(
        nlohmann::json::parse(complex_json));
    int by_cells = obstructa::euler_char_cells(complex);
    int by_homology = obstructa::euler_char_homology(complex);
    if (by_cells != by_homology)
      return fail(OBX_ERR_INTERNAL,
                  "cell-count and homology routes disagree");
    *chi = by_cells;
    if (betti_json) {
      nlohmann::json b = obstructa::betti_numbers(complex);
      *betti_json = dup_string(b.dump());
      if (!*betti_json) return fail(OBX_ERR_INTERNAL, "allocation failed");
    }
    return OBX_OK;
  });
}

obx_status obx_euler_surface(int orientable, unsigned genus,
                             unsigned boundary_components, int* chi) {
  if (!chi) return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    *chi = obstructa::classify_surface_euler(
        {orientable != 0, genus, boundary_components});
    return OBX_OK;
  });
}

obx_status obx_euler_region(const char* space_json, const char* region_json,
                            int* chi) {
  if (!space_json || !region_json || !chi)
    return fail(OBX_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    nlohmann::json sj = nlohmann::json::parse(space_json);
    std::vector<std::pair<std::string, obstructa::FactorKind>> factors;
    for (const auto& c : sj.at("coordinates")) {
      std::string kind = c.value("kind", "real");
      factors.emplace_back(c.at("name").get<std::string>(),
                           kind == "angle" ? obstructa::FactorKind::Angle
                                           : obstructa::FactorKind::Real);
    }
    auto space = obstructa::ModelSpace::make(std::move(factors));
    auto region = obstructa::region_from_json(
        space, nlohmann::json::parse(region_json), "region");
    auto result = obstructa::region_euler_char(region);
    if (!result)
      return fail(OBX_ERR_UNSUPPORTED,
                  "Euler characteristic not determined for this region "
                  "shape");
    *chi = *result;
    return OBX_OK;
  });
}

}  // extern "C"
