#include "logsp/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "format.hpp"
#include "json.hpp"

namespace logsp {

using nlohmann::json;

namespace {

enum class Kind { Real, Int, UInt, Bool, String, RealList };

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::Real:
      return "number";
    case Kind::Int:
      return "integer";
    case Kind::UInt:
      return "nonnegative integer";
    case Kind::Bool:
      return "boolean";
    case Kind::String:
      return "string";
    case Kind::RealList:
      return "list of numbers";
  }
  return "?";
}

// Partially assembled config; the six model parameters are collected first.
struct Builder {
  RunConfig cfg;
  ModelParams params;
  std::set<std::string> param_keys;
  std::optional<double> A, B, C;
};

struct Setter {
  Kind kind;
  std::function<void(Builder&, const json&)> apply;
};

double as_real(const json& v) { return v.get<double>(); }

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto param = [&](const char* key, double ModelParams::*member) {
      t[key] = {Kind::Real, [key, member](Builder& b, const json& v) {
                  b.params.*member = as_real(v);
                  b.param_keys.insert(key);
                }};
    };
    param("p", &ModelParams::p);
    param("mu1", &ModelParams::mu1);
    param("mu2", &ModelParams::mu2);
    param("beta", &ModelParams::beta);
    param("c1", &ModelParams::c1);
    param("c2", &ModelParams::c2);
    t["n"] = {Kind::UInt, [](Builder& b, const json& v) { b.cfg.n = v.get<std::size_t>(); }};
    t["L"] = {Kind::Real, [](Builder& b, const json& v) { b.cfg.L = as_real(v); }};
    t["max_iters"] = {Kind::Int, [](Builder& b, const json& v) { b.cfg.opts.max_iters = v.get<int>(); }};
    auto opt = [&](const char* key, double SolveOptions::*member) {
      t[key] = {Kind::Real, [member](Builder& b, const json& v) { b.cfg.opts.*member = as_real(v); }};
    };
    opt("grad_tol", &SolveOptions::grad_tol);
    opt("manifold_tol", &SolveOptions::manifold_tol);
    opt("step0", &SolveOptions::step0);
    opt("armijo_shrink", &SolveOptions::armijo_shrink);
    opt("armijo_c", &SolveOptions::armijo_c);
    opt("perturbation", &SolveOptions::perturbation);
    opt("initial_width", &SolveOptions::initial_width);
    opt("initial_offset", &SolveOptions::initial_offset);
    opt("recenter_threshold", &SolveOptions::recenter_threshold);
    opt("polish_switch", &SolveOptions::polish_switch);
    t["polish"] = {Kind::Bool, [](Builder& b, const json& v) { b.cfg.opts.polish = v.get<bool>(); }};
    t["seed"] = {Kind::UInt, [](Builder& b, const json& v) { b.cfg.opts.seed = v.get<std::uint64_t>(); }};
    t["t_list"] = {Kind::RealList, [](Builder& b, const json& v) { b.cfg.t_list = v.get<std::vector<double>>(); }};
    t["q"] = {Kind::Real, [](Builder& b, const json& v) { b.cfg.q = as_real(v); }};
    t["A"] = {Kind::Real, [](Builder& b, const json& v) { b.A = as_real(v); }};
    t["B"] = {Kind::Real, [](Builder& b, const json& v) { b.B = as_real(v); }};
    t["C"] = {Kind::Real, [](Builder& b, const json& v) { b.C = as_real(v); }};
    t["u_field"] = {Kind::String, [](Builder& b, const json& v) { b.cfg.u_field = v.get<std::string>(); }};
    t["v_field"] = {Kind::String, [](Builder& b, const json& v) { b.cfg.v_field = v.get<std::string>(); }};
    t["scan_t_min"] = {Kind::Real, [](Builder& b, const json& v) { b.cfg.scan_t_min = as_real(v); }};
    t["scan_t_max"] = {Kind::Real, [](Builder& b, const json& v) { b.cfg.scan_t_max = as_real(v); }};
    t["scan_points"] = {Kind::UInt, [](Builder& b, const json& v) { b.cfg.scan_points = v.get<std::size_t>(); }};
    t["gn_cache"] = {Kind::String, [](Builder& b, const json& v) { b.cfg.gn_cache = v.get<std::string>(); }};
    t["output_dir"] = {Kind::String, [](Builder& b, const json& v) { b.cfg.output_dir = v.get<std::string>(); }};
    return t;
  }();
  return table;
}

bool matches(Kind k, const json& v) {
  switch (k) {
    case Kind::Real:
      return v.is_number();
    case Kind::Int:
      return v.is_number_integer();
    case Kind::UInt:
      return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    case Kind::Bool:
      return v.is_boolean();
    case Kind::String:
      return v.is_string();
    case Kind::RealList:
      if (!v.is_array()) return false;
      for (const json& e : v) {
        if (!e.is_number()) return false;
      }
      return true;
  }
  return false;
}

void assign(Builder& b, const std::string& key, json value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw ConfigError("unknown key '" + key + "'");
  const Setter& s = it->second;
  if (s.kind == Kind::RealList && value.is_number()) value = json::array({value});
  if (!matches(s.kind, value)) {
    throw ConfigError("key '" + key + "' expects a " + kind_name(s.kind) + ", got " + value.dump());
  }
  s.apply(b, value);
}

std::string trim(std::string_view s) {
  std::size_t a = 0, e = s.size();
  while (a < e && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (e > a && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(a, e - a));
}

std::optional<json> parse_number(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s.find_first_of(".eEnN") == std::string::npos) {
    std::int64_t i = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), i);
    if (ec == std::errc() && p == s.data() + s.size()) {
      return i >= 0 ? json(static_cast<std::uint64_t>(i)) : json(i);
    }
  }
  double d = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), d);
  if (ec == std::errc() && p == s.data() + s.size()) return json(d);
  return std::nullopt;
}

json parse_scalar(const std::string& raw) {
  if (raw == "true") return true;
  if (raw == "false") return false;
  if (auto num = parse_number(raw)) return *num;
  if (raw.size() >= 2 && raw.front() == '"' && raw.back() == '"') return raw.substr(1, raw.size() - 2);
  return raw;
}

json parse_value(const std::string& raw) {
  if (raw.find(',') == std::string::npos) return parse_scalar(raw);
  json arr = json::array();
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) arr.push_back(parse_scalar(trim(item)));
  return arr;
}

void parse_lines(std::string_view text, Builder& b) {
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string value = trim(std::string_view(t).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!seen.insert(key).second) throw ConfigError("duplicate key '" + key + "'");
    assign(b, key, parse_value(value));
  }
}

void parse_json(std::string_view text, Builder& b) {
  // nlohmann keeps the last of repeated keys, so duplicates are caught while parsing.
  std::vector<std::set<std::string>> keys;
  std::string duplicate;
  json::parser_callback_t cb = [&](int, json::parse_event_t ev, json& parsed) {
    switch (ev) {
      case json::parse_event_t::object_start:
        keys.emplace_back();
        break;
      case json::parse_event_t::object_end:
        keys.pop_back();
        break;
      case json::parse_event_t::key:
        if (!keys.back().insert(parsed.get<std::string>()).second && duplicate.empty()) {
          duplicate = parsed.get<std::string>();
        }
        break;
      default:
        break;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), cb);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON config: ") + e.what());
  }
  if (!duplicate.empty()) throw ConfigError("duplicate key '" + duplicate + "'");
  if (!doc.is_object()) throw ConfigError("JSON config must be an object");
  for (auto& [key, value] : doc.items()) assign(b, key, value);
}

RunConfig finish(Builder b) {
  RunConfig& c = b.cfg;
  if (!b.param_keys.empty()) {
    for (const char* k : {"p", "mu1", "mu2", "beta", "c1", "c2"}) {
      if (!b.param_keys.count(k)) throw ConfigError(std::string("model parameter '") + k + "' is missing");
    }
    try {
      b.params.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    c.params = b.params;
  }
  const int given = static_cast<int>(b.A.has_value()) + b.B.has_value() + b.C.has_value();
  if (given != 0) {
    if (given != 3 || !c.q) throw ConfigError("an analytic profile needs all of A, B, C and q");
    c.profile = AnalyticProfile{*b.A, *b.B, *b.C, *c.q};
  }
  check_config(c);
  return std::move(c);
}

}  // namespace

void check_config(const RunConfig& c) {
  if (c.n < 2 || (c.n & (c.n - 1)) != 0) throw ConfigError("n must be a power of two");
  if (!(c.L > 0.0)) throw ConfigError("L must be positive");
  try {
    c.opts.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (double t : c.t_list) {
    if (!(t > 0.0)) throw ConfigError("t_list entries must be positive");
  }
  if (!(c.scan_t_min > 0.0) || !(c.scan_t_max > c.scan_t_min)) {
    throw ConfigError("fiber scan needs 0 < scan_t_min < scan_t_max");
  }
  if (c.scan_points < 2) throw ConfigError("scan_points must be at least 2");
  if (c.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"p", "number", "-", "nonlinearity exponent, p > 1"},
      {"mu1", "number", "-", "self-coupling of u"},
      {"mu2", "number", "-", "self-coupling of v"},
      {"beta", "number", "-", "cross coupling"},
      {"c1", "number", "-", "mass of u"},
      {"c2", "number", "-", "mass of v"},
      {"n", "integer", "128", "nodes per axis (power of two)"},
      {"L", "number", "8", "half width of the box [-L, L]^2"},
      {"max_iters", "integer", "3000", "descent iteration cap"},
      {"grad_tol", "number", "1e-6", "projected-gradient tolerance"},
      {"manifold_tol", "number", "1e-4", "tolerance on |M| / (Q + (c1+c2)^2/4)"},
      {"step0", "number", "1", "initial step"},
      {"armijo_shrink", "number", "0.5", "backtracking factor"},
      {"armijo_c", "number", "1e-4", "sufficient-decrease constant"},
      {"seed", "integer", "0", "seed of the start perturbation"},
      {"perturbation", "number", "0", "amplitude of the start perturbation"},
      {"initial_width", "number", "1", "width of the starting Gaussians"},
      {"initial_offset", "number", "0.5", "offset of the starting Gaussians"},
      {"recenter_threshold", "number", "0.1", "excited branch: resample when |log t-| exceeds this"},
      {"polish", "boolean", "true", "excited branch: finish with Newton-Krylov"},
      {"polish_switch", "number", "1e-2", "excited branch: gradient level that starts the polish"},
      {"t_list", "list", "0.5,1,2", "validate: dilation factors"},
      {"q", "number", "-", "gn-constant exponent, or profile exponent with A, B, C"},
      {"A", "number", "-", "fiber-scan analytic profile"},
      {"B", "number", "-", "fiber-scan analytic profile"},
      {"C", "number", "-", "fiber-scan analytic profile"},
      {"u_field", "string", "-", "validate / fiber-scan: dump of u"},
      {"v_field", "string", "-", "validate / fiber-scan: dump of v"},
      {"scan_t_min", "number", "0.01", "fiber-scan: smallest t"},
      {"scan_t_max", "number", "100", "fiber-scan: largest t"},
      {"scan_points", "integer", "401", "fiber-scan: samples on the log grid"},
      {"gn_cache", "string", "<output_dir>/gn_cache.json", "gn-constant cache file"},
      {"output_dir", "string", ".", "directory for artifacts"},
  };
  return keys;
}

RunConfig parse_config(std::string_view text) {
  Builder b;
  std::size_t first = 0;
  while (first < text.size() && std::isspace(static_cast<unsigned char>(text[first]))) ++first;
  if (first < text.size() && text[first] == '{') {
    parse_json(text, b);
  } else {
    parse_lines(text, b);
  }
  return finish(std::move(b));
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& c) {
  json j = json::object();
  if (c.params) {
    j["p"] = c.params->p;
    j["mu1"] = c.params->mu1;
    j["mu2"] = c.params->mu2;
    j["beta"] = c.params->beta;
    j["c1"] = c.params->c1;
    j["c2"] = c.params->c2;
  }
  j["n"] = c.n;
  j["L"] = c.L;
  const SolveOptions& o = c.opts;
  j["max_iters"] = o.max_iters;
  j["grad_tol"] = o.grad_tol;
  j["manifold_tol"] = o.manifold_tol;
  j["step0"] = o.step0;
  j["armijo_shrink"] = o.armijo_shrink;
  j["armijo_c"] = o.armijo_c;
  j["seed"] = o.seed;
  j["perturbation"] = o.perturbation;
  j["initial_width"] = o.initial_width;
  j["initial_offset"] = o.initial_offset;
  j["recenter_threshold"] = o.recenter_threshold;
  j["polish"] = o.polish;
  j["polish_switch"] = o.polish_switch;
  j["t_list"] = c.t_list;
  if (c.q) j["q"] = *c.q;
  if (c.profile) {
    j["A"] = c.profile->A;
    j["B"] = c.profile->B;
    j["C"] = c.profile->C;
  }
  if (!c.u_field.empty()) j["u_field"] = c.u_field;
  if (!c.v_field.empty()) j["v_field"] = c.v_field;
  j["scan_t_min"] = c.scan_t_min;
  j["scan_t_max"] = c.scan_t_max;
  j["scan_points"] = c.scan_points;
  if (!c.gn_cache.empty()) j["gn_cache"] = c.gn_cache;
  j["output_dir"] = c.output_dir;
  return detail::write_json(j);
}

}  // namespace logsp
