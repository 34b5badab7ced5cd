#include "obstructa/config.hpp"

#include <algorithm>

#include "obstructa/num.hpp"

namespace obstructa {

namespace {

void reject_unknown_keys(const nlohmann::json& j,
                         std::initializer_list<const char*> allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok) throw ConfigError("unknown key '" + it.key() + "'", where);
  }
}

ScalarExpr parse_checked(const std::string& text, const std::string& where) {
  try {
    return parse_expr(text);
  } catch (const ParseError& e) {
    throw ConfigError("bad expression '" + text + "' (" + e.what() +
                          " at offset " + std::to_string(e.position()) + ")",
                      where);
  }
}

std::vector<ScalarExpr> parse_expr_array(const nlohmann::json& j,
                                         const std::string& where) {
  if (!j.is_array()) throw ConfigError("expected an array", where);
  std::vector<ScalarExpr> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string())
      throw ConfigError("expected a string expression",
                        where + "[" + std::to_string(i) + "]");
    out.push_back(
        parse_checked(j[i].get<std::string>(),
                      where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

ExprMatrix parse_expr_matrix(const nlohmann::json& j,
                             const std::string& where) {
  if (!j.is_array() || j.empty())
    throw ConfigError("expected a nonempty array of rows", where);
  std::size_t cols = 0;
  std::vector<std::vector<ScalarExpr>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    auto row = parse_expr_array(j[r], where + "[" + std::to_string(r) + "]");
    if (r == 0)
      cols = row.size();
    else if (row.size() != cols)
      throw ConfigError("ragged matrix rows", where);
    rows.push_back(std::move(row));
  }
  ExprMatrix m(rows.size(), cols);
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = rows[r][c];
  return m;
}

std::vector<std::string> expr_strings(const std::vector<ScalarExpr>& es) {
  std::vector<std::string> out;
  out.reserve(es.size());
  for (const auto& e : es) out.push_back(e.str());
  return out;
}

}  // namespace

ControlSystem SystemConfig::control_system() const {
  if (dynamics.empty())
    throw ConfigError("system has no first-order dynamics", name);
  return ControlSystem(space, controls, dynamics, affine);
}

LagrangianSystem SystemConfig::lagrangian_system() const {
  if (!lagrangian)
    throw ConfigError("system has no Lagrangian block", name);
  return LagrangianSystem(space, lagrangian->mass, lagrangian->potential,
                          lagrangian->constraints,
                          lagrangian->control_covectors);
}

AdversaryFamily SystemConfig::adversary(const std::string& adv) const {
  auto it = adversaries.find(adv);
  if (it == adversaries.end())
    throw ConfigError("unknown adversary '" + adv + "'", name);
  return AdversaryFamily(space, it->second);
}

const Region& SystemConfig::region(const std::string& rname) const {
  auto it = regions.find(rname);
  if (it == regions.end())
    throw ConfigError("unknown region '" + rname + "'", name);
  return it->second;
}

// --- regions ------------------------------------------------------------

Region region_from_json(SpacePtr space, const nlohmann::json& j,
                        const std::string& where) {
  reject_unknown_keys(j,
                      {"base", "obstacles", "constraints", "angle_arcs",
                       "euler_char", "boundary_tol"},
                      where);
  if (!j.contains("base")) throw ConfigError("region needs 'base'", where);
  const auto& base = j.at("base");
  reject_unknown_keys(base,
                      {"kind", "intervals", "center", "radius", "inner",
                       "outer"},
                      where + ".base");
  std::string kind = base.value("kind", "");
  Region r = [&]() {
    try {
      if (kind == "box") {
        std::vector<Interval> ivs;
        for (const auto& e : base.at("intervals"))
          ivs.push_back(Interval{e.at(0).get<double>(),
                                 e.at(1).get<double>()});
        return Region::box(space, std::move(ivs));
      }
      if (kind == "ball")
        return Region::ball(space,
                            base.at("center").get<std::vector<double>>(),
                            base.at("radius").get<double>());
      if (kind == "annulus")
        return Region::annulus(space,
                               base.at("center").get<std::vector<double>>(),
                               base.at("inner").get<double>(),
                               base.at("outer").get<double>());
      throw ConfigError("base kind must be box | ball | annulus",
                        where + ".base");
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(e.what(), where + ".base");
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), where + ".base");
    }
  }();

  try {
    if (j.contains("obstacles"))
      for (const auto& o : j.at("obstacles"))
        r.add_obstacle(o.at("center").get<std::vector<double>>(),
                       o.at("radius").get<double>());
    if (j.contains("constraints"))
      for (const auto& g :
           parse_expr_array(j.at("constraints"), where + ".constraints"))
        r.add_constraint(g);
    if (j.contains("angle_arcs"))
      for (auto it = j.at("angle_arcs").begin();
           it != j.at("angle_arcs").end(); ++it)
        r.set_angle_arc(it.key(), it.value().at(0).get<double>(),
                        it.value().at(1).get<double>());
    if (j.contains("euler_char"))
      r.set_euler_char(j.at("euler_char").get<int>());
    if (j.contains("boundary_tol"))
      r.set_boundary_tol(j.at("boundary_tol").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what(), where);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), where);
  }
  return r;
}

nlohmann::json region_to_json(const Region& r) {
  nlohmann::json j;
  switch (r.base_kind()) {
    case Region::BaseKind::Box: {
      nlohmann::json ivs = nlohmann::json::array();
      for (const auto& iv : *r.box_base()) ivs.push_back({iv.lo, iv.hi});
      j["base"] = {{"kind", "box"}, {"intervals", std::move(ivs)}};
      break;
    }
    case Region::BaseKind::Ball:
      j["base"] = {{"kind", "ball"},
                   {"center", r.ball_base()->center},
                   {"radius", r.ball_base()->radius}};
      break;
    case Region::BaseKind::Annulus:
      j["base"] = {{"kind", "annulus"},
                   {"center", r.annulus_base()->center},
                   {"inner", r.annulus_base()->inner},
                   {"outer", r.annulus_base()->outer}};
      break;
  }
  if (!r.obstacles().empty()) {
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& o : r.obstacles())
      obs.push_back({{"center", o.center}, {"radius", o.radius}});
    j["obstacles"] = std::move(obs);
  }
  if (!r.constraints().empty()) {
    nlohmann::json cs = nlohmann::json::array();
    for (const auto& g : r.constraints()) cs.push_back(g.str());
    j["constraints"] = std::move(cs);
  }
  if (!r.angle_arcs().empty()) {
    nlohmann::json arcs;
    for (const auto& [k, iv] : r.angle_arcs()) arcs[k] = {iv.lo, iv.hi};
    j["angle_arcs"] = std::move(arcs);
  }
  if (r.euler_char_override()) j["euler_char"] = *r.euler_char_override();
  return j;
}

// --- SystemConfig -------------------------------------------------------

SystemConfig config_from_json(const nlohmann::json& j) {
  reject_unknown_keys(j,
                      {"name", "space", "controls", "dynamics", "affine",
                       "lagrangian", "transverse_field", "regions",
                       "adversaries", "parameters"},
                      "config");
  SystemConfig cfg;
  try {
    cfg.name = j.value("name", "unnamed");

    if (!j.contains("space"))
      throw ConfigError("missing 'space'", "config");
    reject_unknown_keys(j.at("space"), {"coordinates"}, "config.space");
    std::vector<std::pair<std::string, FactorKind>> factors;
    for (const auto& c : j.at("space").at("coordinates")) {
      reject_unknown_keys(c, {"name", "kind"}, "config.space.coordinates");
      std::string kind = c.value("kind", "real");
      if (kind != "real" && kind != "angle")
        throw ConfigError("coordinate kind must be real | angle",
                          "config.space.coordinates");
      factors.emplace_back(c.at("name").get<std::string>(),
                           kind == "angle" ? FactorKind::Angle
                                           : FactorKind::Real);
    }
    cfg.space = ModelSpace::make(std::move(factors));

    if (j.contains("controls"))
      cfg.controls = j.at("controls").get<std::vector<std::string>>();

    if (j.contains("dynamics"))
      cfg.dynamics = parse_expr_array(j.at("dynamics"), "config.dynamics");

    if (j.contains("affine")) {
      reject_unknown_keys(j.at("affine"), {"drift", "fields"},
                          "config.affine");
      AffineParts aff{
          VectorField(cfg.space, parse_expr_array(j.at("affine").at("drift"),
                                                  "config.affine.drift")),
          {}};
      for (const auto& f : j.at("affine").at("fields"))
        aff.control_fields.emplace_back(
            cfg.space, parse_expr_array(f, "config.affine.fields"));
      cfg.affine = std::move(aff);
    }

    if (j.contains("lagrangian")) {
      const auto& lj = j.at("lagrangian");
      reject_unknown_keys(
          lj, {"mass", "potential", "constraints", "control_covectors"},
          "config.lagrangian");
      LagrangianBlock lb;
      lb.mass = parse_expr_matrix(lj.at("mass"), "config.lagrangian.mass");
      lb.potential = lj.contains("potential")
                         ? parse_checked(lj.at("potential").get<std::string>(),
                                         "config.lagrangian.potential")
                         : ScalarExpr::constant(0.0);
      if (lj.contains("constraints"))
        lb.constraints = parse_expr_matrix(lj.at("constraints"),
                                           "config.lagrangian.constraints");
      if (lj.contains("control_covectors"))
        lb.control_covectors =
            lj.at("control_covectors")
                .get<std::vector<std::vector<double>>>();
      cfg.lagrangian = std::move(lb);
    }

    if (j.contains("transverse_field"))
      cfg.transverse_field =
          VectorField(cfg.space, parse_expr_array(j.at("transverse_field"),
                                                  "config.transverse_field"));

    if (j.contains("regions"))
      for (auto it = j.at("regions").begin(); it != j.at("regions").end();
           ++it)
        cfg.regions.emplace(
            it.key(), region_from_json(cfg.space, it.value(),
                                       "config.regions." + it.key()));

    if (j.contains("adversaries"))
      for (auto it = j.at("adversaries").begin();
           it != j.at("adversaries").end(); ++it)
        cfg.adversaries.emplace(
            it.key(), parse_expr_array(it.value(),
                                       "config.adversaries." + it.key()));

    if (j.contains("parameters")) {
      const auto& pj = j.at("parameters");
      reject_unknown_keys(pj,
                          {"eps_list", "control_bounds", "starts", "grid_n",
                           "solver_tol", "target_radius", "seed"},
                          "config.parameters");
      if (pj.contains("eps_list"))
        cfg.params.eps_list = pj.at("eps_list").get<std::vector<double>>();
      if (pj.contains("control_bounds"))
        for (const auto& b : pj.at("control_bounds"))
          cfg.params.control_bounds.push_back(
              Interval{b.at(0).get<double>(), b.at(1).get<double>()});
      if (pj.contains("starts"))
        cfg.params.starts = pj.at("starts").get<std::size_t>();
      if (pj.contains("grid_n"))
        cfg.params.grid_n = pj.at("grid_n").get<std::size_t>();
      if (pj.contains("solver_tol"))
        cfg.params.solver_tol = pj.at("solver_tol").get<double>();
      if (pj.contains("target_radius"))
        cfg.params.target_radius = pj.at("target_radius").get<double>();
      if (pj.contains("seed"))
        cfg.params.seed = pj.at("seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what(), "config");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "config");
  }

  // cross-validation: instantiating the module objects surfaces dimension
  // and variable errors up front
  try {
    if (!cfg.dynamics.empty()) cfg.control_system();
    if (cfg.lagrangian) cfg.lagrangian_system();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what(), "config");
  }
  for (const auto& [aname, comps] : cfg.adversaries) {
    try {
      AdversaryFamily(cfg.space, comps);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), "config.adversaries." + aname);
    }
  }
  return cfg;
}

nlohmann::json config_to_json(const SystemConfig& cfg) {
  nlohmann::json j;
  j["name"] = cfg.name;
  nlohmann::json coords = nlohmann::json::array();
  for (std::size_t i = 0; i < cfg.space->dimension(); ++i)
    coords.push_back(
        {{"name", cfg.space->name(i)},
         {"kind",
          cfg.space->kind(i) == FactorKind::Angle ? "angle" : "real"}});
  j["space"] = {{"coordinates", std::move(coords)}};
  if (!cfg.controls.empty()) j["controls"] = cfg.controls;
  if (!cfg.dynamics.empty()) j["dynamics"] = expr_strings(cfg.dynamics);
  if (cfg.affine) {
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& f : cfg.affine->control_fields)
      fields.push_back(expr_strings(f.components));
    j["affine"] = {{"drift", expr_strings(cfg.affine->drift.components)},
                   {"fields", std::move(fields)}};
  }
  if (cfg.lagrangian) {
    nlohmann::json mass = nlohmann::json::array();
    for (std::size_t r = 0; r < cfg.lagrangian->mass.rows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < cfg.lagrangian->mass.cols; ++c)
        row.push_back(cfg.lagrangian->mass.at(r, c).str());
      mass.push_back(std::move(row));
    }
    nlohmann::json cons = nlohmann::json::array();
    for (std::size_t r = 0; r < cfg.lagrangian->constraints.rows; ++r) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t c = 0; c < cfg.lagrangian->constraints.cols; ++c)
        row.push_back(cfg.lagrangian->constraints.at(r, c).str());
      cons.push_back(std::move(row));
    }
    j["lagrangian"] = {
        {"mass", std::move(mass)},
        {"potential", cfg.lagrangian->potential.str()},
        {"constraints", std::move(cons)},
        {"control_covectors", cfg.lagrangian->control_covectors}};
  }
  if (cfg.transverse_field)
    j["transverse_field"] = expr_strings(cfg.transverse_field->components);
  if (!cfg.regions.empty()) {
    nlohmann::json regions;
    for (const auto& [k, r] : cfg.regions) regions[k] = region_to_json(r);
    j["regions"] = std::move(regions);
  }
  if (!cfg.adversaries.empty()) {
    nlohmann::json advs;
    for (const auto& [k, a] : cfg.adversaries) advs[k] = expr_strings(a);
    j["adversaries"] = std::move(advs);
  }
  nlohmann::json params;
  params["eps_list"] = cfg.params.eps_list;
  if (!cfg.params.control_bounds.empty()) {
    nlohmann::json cb = nlohmann::json::array();
    for (const auto& b : cfg.params.control_bounds)
      cb.push_back({b.lo, b.hi});
    params["control_bounds"] = std::move(cb);
  }
  params["starts"] = cfg.params.starts;
  params["grid_n"] = cfg.params.grid_n;
  params["solver_tol"] = cfg.params.solver_tol;
  params["target_radius"] = cfg.params.target_radius;
  params["seed"] = cfg.params.seed;
  j["parameters"] = std::move(params);
  return j;
}

// --- builtin registry ----------------------------------------------------

std::vector<std::string> builtin_names() {
  return {"heisenberg", "unicycle", "ex3_field", "ex4_field",
          "vertical_disk"};
}

SystemConfig make_builtin(const std::string& name) {
  nlohmann::json j;
  if (name == "heisenberg") {
    j = {
        {"name", "heisenberg"},
        {"space",
         {{"coordinates",
           {{{"name", "x"}, {"kind", "real"}},
            {{"name", "y"}, {"kind", "real"}},
            {{"name", "z"}, {"kind", "real"}}}}}},
        {"controls", {"u", "v"}},
        {"dynamics", {"u", "v", "y*u - x*v"}},
        {"affine",
         {{"drift", {"0", "0", "0"}},
          {"fields", {{"1", "0", "y"}, {"0", "1", "-x"}}}}},
        {"transverse_field", {"0", "0", "1"}},
        {"regions",
         {{"unit_box",
           {{"base",
             {{"kind", "box"},
              {"intervals", {{-1, 1}, {-1, 1}, {-1, 1}}}}}}},
          {"unit_ball",
           {{"base",
             {{"kind", "ball"}, {"center", {0, 0, 0}}, {"radius", 1}}}}}}},
        {"adversaries", {{"dz", {"0", "0", "eps"}}}},
        {"parameters",
         {{"control_bounds", {{-10, 10}, {-10, 10}}},
          {"eps_list", {0.1, 0.01, 0.001}}}}};
  } else if (name == "unicycle") {
    j = {
        {"name", "unicycle"},
        {"space",
         {{"coordinates",
           {{{"name", "x"}, {"kind", "real"}},
            {{"name", "y"}, {"kind", "real"}},
            {{"name", "th"}, {"kind", "angle"}}}}}},
        {"controls", {"u", "v"}},
        {"dynamics", {"cos(th)*u", "sin(th)*u", "v"}},
        {"affine",
         {{"drift", {"0", "0", "0"}},
          {"fields", {{"cos(th)", "sin(th)", "0"}, {"0", "0", "1"}}}}},
        {"transverse_field", {"sin(th)", "-cos(th)", "0"}},
        {"regions",
         {// camera scenario: stay in the ring, avoid the obstacle, and
          // keep the origin within the field of view
          {"camera_n1",
           {{"base",
             {{"kind", "annulus"},
              {"center", {0, 0}},
              {"inner", 1},
              {"outer", 2}}},
            {"obstacles", {{{"center", {1.5, 0}}, {"radius", 0.2}}}},
            {"constraints", {"x*cos(th) + y*sin(th)"}}}},
          // ring x S^1 with nothing else: a genuine product, chi = 0
          {"ring",
           {{"base",
             {{"kind", "annulus"},
              {"center", {0, 0}},
              {"inner", 1},
              {"outer", 2}}}}}}},
        {"adversaries",
         {{"lateral", {"eps*sin(th)", "-eps*cos(th)", "0"}}}},
        {"parameters",
         {{"control_bounds", {{-10, 10}, {-10, 10}}},
          {"eps_list", {0.1, 0.01}}}}};
  } else if (name == "ex3_field") {
    j = {{"name", "ex3_field"},
         {"space",
          {{"coordinates",
            {{{"name", "x"}, {"kind", "real"}},
             {{"name", "y"}, {"kind", "real"}}}}}},
         {"dynamics", {"x^2 - y^2", "4*x*y^2"}},
         {"regions",
          {{"window",
            {{"base", {{"kind", "box"}, {"intervals", {{-2, 2}, {-2, 2}}}}}}}}},
         {"adversaries", {{"shear", {"eps", "-eps*x"}}}},
         {"parameters",
          {{"eps_list", {0.1, 0.01, 0.001}}, {"target_radius", 0.1}}}};
  } else if (name == "ex4_field") {
    j = {{"name", "ex4_field"},
         {"space",
          {{"coordinates",
            {{{"name", "x"}, {"kind", "real"}},
             {{"name", "y"}, {"kind", "real"}}}}}},
         {"dynamics", {"x^2 - y^2", "2*x*y"}},
         {"regions",
          {{"window",
            {{"base",
              {{"kind", "box"}, {"intervals", {{-1, 1}, {-1, 1}}}}}}}}},
         {"parameters", {{"eps_list", {0.1, 0.01}}}}};
  } else if (name == "vertical_disk") {
    j = {{"name", "vertical_disk"},
         {"space",
          {{"coordinates",
            {{{"name", "x"}, {"kind", "real"}},
             {{"name", "y"}, {"kind", "real"}},
             {{"name", "phi"}, {"kind", "angle"}},
             {{"name", "theta"}, {"kind", "angle"}}}}}},
         {"lagrangian",
          {{"mass",
            {{"1", "0", "0", "0"},
             {"0", "1", "0", "0"},
             {"0", "0", "1", "0"},
             {"0", "0", "0", "1"}}},
           {"potential", "0"},
           {"constraints",
            {{"1", "0", "0", "-cos(phi)"}, {"0", "1", "0", "-sin(phi)"}}},
           {"control_covectors", {{0, 0, 1, 0}, {0, 0, 0, 1}}}}},
         {"transverse_field", {"sin(phi)", "-cos(phi)", "0", "0"}},
         {"parameters", {{"control_bounds", {{-1, 1}, {-1, 1}}}}}};
  } else {
    throw ConfigError("unknown builtin '" + name + "'", "builtin");
  }
  return config_from_json(j);
}

}  // namespace obstructa
