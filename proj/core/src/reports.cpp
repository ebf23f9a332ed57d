#include "logsp/reports.hpp"

#include <cmath>
#include <sstream>

#include "format.hpp"
#include "logsp/config.hpp"

namespace logsp {

using nlohmann::json;

const char* to_string(ReportKind kind) noexcept {
  switch (kind) {
    case ReportKind::Solve:
      return "solve";
    case ReportKind::Regime:
      return "regime";
    case ReportKind::GNConstant:
      return "gn_constant";
    case ReportKind::FiberScan:
      return "fiber_scan";
    case ReportKind::Identity:
      return "identity";
    case ReportKind::Config:
      return "config";
  }
  return "?";
}

namespace {

json opt(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

json params_json(const ModelParams& p) {
  return {{"p", p.p}, {"mu1", p.mu1}, {"mu2", p.mu2}, {"beta", p.beta}, {"c1", p.c1}, {"c2", p.c2}};
}

json grid_json(const GridSpec& g) { return {{"n", g.n}, {"L", g.L}}; }

json breakdown_json(const FunctionalBreakdown& b) {
  return {{"Q_u", b.Q_u}, {"Q_v", b.Q_v}, {"P_u", b.P_u}, {"P_v", b.P_v}, {"P0", b.P0},
          {"R", b.R},     {"W0", b.W0},   {"W1", b.W1},   {"W2", b.W2},   {"norm0_u", b.norm0_u},
          {"norm0_v", b.norm0_v}, {"I", b.I}};
}

json regime_body(const Regime& r) {
  return {{"kind", to_string(r.kind)}, {"mu0", r.mu0}, {"threshold", opt(r.threshold)}, {"slack", r.slack},
          {"reason", r.reason}};
}

json roots_json(const FiberProfile& pr) {
  json j;
  const FiberRootSet roots = fiber_roots(pr);
  if (const auto* two = std::get_if<FiberRoots>(&roots)) {
    j["structure"] = "two_roots";
    j["t_plus"] = two->t_plus;
    j["t_bar"] = two->t_bar;
    j["t_minus"] = two->t_minus;
  } else if (const auto* one = std::get_if<SingleRoot>(&roots)) {
    j["structure"] = "single_root";
    j["t"] = one->t;
  } else {
    j["structure"] = "no_roots";
  }
  return j;
}

// Schema helpers.
json type(const char* t) { return {{"type", t}}; }
json nullable(const char* t) { return {{"type", json::array({t, "null"})}}; }
json object(std::initializer_list<std::pair<const char*, json>> props, bool closed = true) {
  json p = json::object();
  json req = json::array();
  for (const auto& [k, v] : props) {
    p[k] = v;
    req.push_back(k);
  }
  json o = {{"type", "object"}, {"properties", p}, {"required", req}};
  if (closed) o["additionalProperties"] = false;
  return o;
}

json params_schema() {
  return object({{"p", type("number")},
                 {"mu1", type("number")},
                 {"mu2", type("number")},
                 {"beta", type("number")},
                 {"c1", type("number")},
                 {"c2", type("number")}});
}

json grid_schema() { return object({{"n", type("integer")}, {"L", type("number")}}); }

json breakdown_schema() {
  return object({{"Q_u", nullable("number")},
                 {"Q_v", nullable("number")},
                 {"P_u", nullable("number")},
                 {"P_v", nullable("number")},
                 {"P0", nullable("number")},
                 {"R", nullable("number")},
                 {"W0", nullable("number")},
                 {"W1", nullable("number")},
                 {"W2", nullable("number")},
                 {"norm0_u", nullable("number")},
                 {"norm0_v", nullable("number")},
                 {"I", nullable("number")}});
}

json regime_schema() {
  json kind = type("string");
  kind["enum"] = json::array({"Thm1_i", "Thm1_ii", "Thm1_iii", "Thm2", "Unclassified"});
  return object({{"kind", kind},
                 {"mu0", type("number")},
                 {"threshold", nullable("number")},
                 {"slack", type("number")},
                 {"reason", type("string")}});
}

json schema_for(ReportKind kind) {
  switch (kind) {
    case ReportKind::Solve: {
      json branch = type("string");
      branch["enum"] = json::array({"Ground", "Excited"});
      json omega = nullable("string");
      omega["enum"] = json::array({"OmegaPlus", "OmegaMinus", "OffManifold", nullptr});
      return object({{"branch", branch},
                     {"converged", type("boolean")},
                     {"message", type("string")},
                     {"iterations", type("integer")},
                     {"newton_steps", nullable("integer")},
                     {"energy", nullable("number")},
                     {"lambda1", nullable("number")},
                     {"lambda2", nullable("number")},
                     {"residuals", object({{"projected_grad", nullable("number")},
                                           {"M_value", nullable("number")},
                                           {"M_scale", nullable("number")},
                                           {"pohozaev", nullable("number")},
                                           {"nehari", nullable("number")}})},
                     {"separation_slack", nullable("number")},
                     {"omega", omega},
                     {"regime", regime_schema()},
                     {"breakdown", breakdown_schema()},
                     {"energy_trace_length", type("integer")},
                     {"params", params_schema()},
                     {"grid", grid_schema()}});
    }
    case ReportKind::Regime:
      return object({{"regime", regime_schema()},
                     {"K4", nullable("number")},
                     {"K2p", nullable("number")},
                     {"params", params_schema()}});
    case ReportKind::GNConstant:
      return object({{"q", type("number")},
                     {"K", type("number")},
                     {"method", type("string")},
                     {"residual", type("number")},
                     {"K_ascent", type("number")},
                     {"K_shooting", type("number")},
                     {"ground_mass", type("number")},
                     {"relative_gap", type("number")},
                     {"iterations", type("integer")},
                     {"grid", grid_schema()},
                     {"cached", type("boolean")}});
    case ReportKind::FiberScan: {
      json structure = type("string");
      structure["enum"] = json::array({"two_roots", "single_root", "no_roots"});
      json roots = object({{"structure", structure}}, false);
      roots["properties"]["t_plus"] = type("number");
      roots["properties"]["t_bar"] = type("number");
      roots["properties"]["t_minus"] = type("number");
      roots["properties"]["t"] = type("number");
      roots["additionalProperties"] = false;
      return object({{"profile", object({{"A", type("number")},
                                         {"B", type("number")},
                                         {"C", type("number")},
                                         {"q", type("number")},
                                         {"W", type("number")}})},
                     {"condition_lhs", nullable("number")},
                     {"condition_rhs", type("number")},
                     {"condition_holds", nullable("boolean")},
                     {"roots", roots}});
    }
    case ReportKind::Identity: {
      json te = object({{"t", type("number")},
                        {"Q", nullable("number")},
                        {"P_u", nullable("number")},
                        {"P_v", nullable("number")},
                        {"P0", nullable("number")},
                        {"R", nullable("number")},
                        {"W0", nullable("number")}});
      json arr = type("array");
      arr["items"] = te;
      return object({{"pohozaev_residual", nullable("number")},
                     {"nehari_residual", nullable("number")},
                     {"M_value", nullable("number")},
                     {"M_scale", nullable("number")},
                     {"lambda1", nullable("number")},
                     {"lambda2", nullable("number")},
                     {"split_error", nullable("number")},
                     {"hls_ok", type("boolean")},
                     {"kernel_bounds", object({{"W2", nullable("number")}, {"riesz", nullable("number")}})},
                     {"transform_errors", arr},
                     {"breakdown", breakdown_schema()},
                     {"params", params_schema()},
                     {"grid", grid_schema()}});
    }
    case ReportKind::Config: {
      json props = json::object();
      for (const ConfigKey& k : config_keys()) {
        if (k.type == "list") {
          props[std::string(k.name)] = {{"type", "array"}, {"items", type("number")}};
        } else {
          props[std::string(k.name)] = type(std::string(k.type).c_str());
        }
      }
      return {{"type", "object"}, {"properties", props}, {"additionalProperties", false}};
    }
  }
  return json::object();
}

bool has_type(const json& v, const std::string& t) {
  if (t == "null") return v.is_null();
  if (t == "boolean") return v.is_boolean();
  if (t == "string") return v.is_string();
  if (t == "integer") return v.is_number_integer();
  if (t == "number") return v.is_number();
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  return false;
}

void check(const json& schema, const json& v, const std::string& path, std::vector<std::string>& errors) {
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = has_type(v, t.get<std::string>());
    } else {
      for (const json& alt : t) ok = ok || has_type(v, alt.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected " + t.dump() + ", got " + std::string(v.type_name()));
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const json& e : schema["enum"]) found = found || e == v;
    if (!found) errors.push_back(path + ": value " + v.dump() + " not in " + schema["enum"].dump());
  }
  if (v.is_object()) {
    const json props = schema.value("properties", json::object());
    if (schema.contains("required")) {
      for (const json& k : schema["required"]) {
        if (!v.contains(k.get<std::string>())) errors.push_back(path + ": missing '" + k.get<std::string>() + "'");
      }
    }
    for (auto it = v.begin(); it != v.end(); ++it) {
      if (props.contains(it.key())) {
        check(props[it.key()], it.value(), path + "." + it.key(), errors);
      } else if (schema.value("additionalProperties", true) == false) {
        errors.push_back(path + ": unexpected key '" + it.key() + "'");
      }
    }
  }
  if (v.is_array() && schema.contains("items")) {
    for (std::size_t i = 0; i < v.size(); ++i) check(schema["items"], v[i], path + "[" + std::to_string(i) + "]", errors);
  }
}

}  // namespace

std::string solve_report_json(const SolveReport& r, const GridSpec& grid) {
  json j;
  j["branch"] = to_string(r.branch);
  j["converged"] = r.converged;
  j["message"] = r.message;
  j["iterations"] = r.iterations;
  j["newton_steps"] = r.newton_steps ? json(*r.newton_steps) : json(nullptr);
  j["energy"] = r.energy;
  j["lambda1"] = r.lambda1;
  j["lambda2"] = r.lambda2;
  j["residuals"] = {{"projected_grad", r.residuals.projected_grad},
                    {"M_value", r.residuals.M_value},
                    {"M_scale", r.residuals.M_scale},
                    {"pohozaev", r.residuals.pohozaev},
                    {"nehari", r.residuals.nehari}};
  j["separation_slack"] = opt(r.separation_slack);
  j["omega"] = r.omega ? json(to_string(*r.omega)) : json(nullptr);
  j["regime"] = regime_body(r.regime);
  j["breakdown"] = breakdown_json(r.breakdown);
  j["energy_trace_length"] = r.energy_trace.size();
  j["params"] = params_json(r.state.params());
  j["grid"] = grid_json(grid);
  return detail::write_json(j);
}

std::string regime_json(const Regime& r, const ModelParams& params, std::optional<double> K4,
                        std::optional<double> K2p) {
  json j;
  j["regime"] = regime_body(r);
  j["K4"] = opt(K4);
  j["K2p"] = opt(K2p);
  j["params"] = params_json(params);
  return detail::write_json(j);
}

std::string gn_constant_json(const GNConstant& k, const GridSpec& grid, bool cached) {
  json j = {{"q", k.q},
            {"K", k.K},
            {"method", k.method},
            {"residual", k.residual},
            {"K_ascent", k.K_ascent},
            {"K_shooting", k.K_shooting},
            {"ground_mass", k.ground_mass},
            {"relative_gap", k.relative_gap},
            {"iterations", k.iterations},
            {"grid", grid_json(grid)},
            {"cached", cached}};
  return detail::write_json(j);
}

std::string fiber_scan_json(const FiberProfile& pr) {
  json j;
  j["profile"] = {{"A", pr.A}, {"B", pr.B}, {"C", pr.C}, {"q", pr.q}, {"W", pr.W}};
  j["condition_rhs"] = pr.C / 2.0;
  if (pr.q > 1.0 && pr.A > 0.0 && pr.B > 0.0) {
    j["condition_lhs"] = two_root_lhs(pr);
    j["condition_holds"] = two_root_condition(pr);
  } else {
    j["condition_lhs"] = nullptr;
    j["condition_holds"] = nullptr;
  }
  j["roots"] = roots_json(pr);
  return detail::write_json(j);
}

std::string identity_report_json(const IdentityReport& r, const FunctionalBreakdown& bd, const KernelBounds& kb,
                                 const ModelParams& params, const GridSpec& grid) {
  json j;
  j["pohozaev_residual"] = r.pohozaev_residual;
  j["nehari_residual"] = r.nehari_residual;
  j["M_value"] = r.M_value;
  j["M_scale"] = r.M_scale;
  j["lambda1"] = r.lambda1;
  j["lambda2"] = r.lambda2;
  j["split_error"] = r.split_error;
  j["hls_ok"] = r.hls_ok;
  j["kernel_bounds"] = {{"W2", kb.W2}, {"riesz", kb.riesz}};
  json te = json::array();
  for (const TransformErrors& e : r.transform_errors) {
    te.push_back({{"t", e.t}, {"Q", e.Q}, {"P_u", e.P_u}, {"P_v", e.P_v}, {"P0", e.P0}, {"R", e.R}, {"W0", e.W0}});
  }
  j["transform_errors"] = te;
  j["breakdown"] = breakdown_json(bd);
  j["params"] = params_json(params);
  j["grid"] = grid_json(grid);
  return detail::write_json(j);
}

std::string report_schema(ReportKind kind) { return detail::write_json(schema_for(kind)); }

std::vector<std::string> schema_errors(ReportKind kind, std::string_view json_text) {
  json v;
  try {
    v = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    return {std::string("not valid JSON: ") + e.what()};
  }
  std::vector<std::string> errors;
  check(schema_for(kind), v, "$", errors);
  return errors;
}

std::string energy_trace_csv(const std::vector<double>& trace) {
  std::ostringstream out;
  out << "iteration,value\n";
  for (std::size_t k = 0; k < trace.size(); ++k) out << k << ',' << detail::format_double(trace[k]) << '\n';
  return out.str();
}

std::string fiber_scan_csv(const FiberProfile& pr, double t_min, double t_max, std::size_t points) {
  if (!(t_min > 0.0) || !(t_max > t_min) || points < 2) {
    throw std::invalid_argument("fiber_scan_csv: need 0 < t_min < t_max and at least two points");
  }
  std::ostringstream out;
  out << "t,F,f,g\n";
  const double step = std::log(t_max / t_min) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    const double t = k + 1 == points ? t_max : t_min * std::exp(step * static_cast<double>(k));
    out << detail::format_double(t) << ',' << detail::format_double(pr.F(t)) << ','
        << detail::format_double(pr.f(t)) << ',' << detail::format_double(pr.g(t)) << '\n';
  }
  return out.str();
}

}  // namespace logsp
