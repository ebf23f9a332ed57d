#include "logsp/commands.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "format.hpp"
#include "logsp/field_io.hpp"
#include "logsp/reports.hpp"

namespace logsp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Usage problems detected while running a command.
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

const ModelParams& need_params(const RunConfig& cfg, std::string_view cmd) {
  if (!cfg.params) throw UsageError(std::string(cmd) + " needs the model parameters p, mu1, mu2, beta, c1, c2");
  return *cfg.params;
}

StatePair load_state(const RunConfig& cfg, std::string_view cmd) {
  const ModelParams& prm = need_params(cfg, cmd);
  if (cfg.u_field.empty() || cfg.v_field.empty()) throw UsageError(std::string(cmd) + " needs u_field and v_field");
  for (const std::string& f : {cfg.u_field, cfg.v_field}) {
    if (!fs::is_regular_file(f)) throw UsageError("field dump not found: " + f);
  }
  Field u = read_field(cfg.u_field);
  Field v = read_field(cfg.v_field);
  if (!(u.grid() == v.grid())) throw UsageError("u_field and v_field live on different grids");
  return StatePair::diagnostic(std::move(u), std::move(v), prm);
}

int solve(const RunConfig& cfg, Branch branch, std::ostream& out) {
  const ModelParams& prm = need_params(cfg, to_string(branch));
  const Grid2D grid = make_grid(cfg.n, cfg.L);
  const SolveReport r = branch == Branch::Ground ? solve_ground(prm, grid, cfg.opts) : solve_excited(prm, grid, cfg.opts);
  const fs::path dir(cfg.output_dir);
  const std::string stem = branch == Branch::Ground ? "ground" : "excited";
  const std::string report = solve_report_json(r, {cfg.n, cfg.L});
  write_text(dir / (stem + ".json"), report);
  write_field(dir / (stem + "_u.lspf"), r.state.u());
  write_field(dir / (stem + "_v.lspf"), r.state.v());
  write_text(dir / (stem + "_trace.csv"), energy_trace_csv(r.energy_trace));
  write_radial_profile(dir / (stem + "_u_radial.csv"), r.state.u());
  write_radial_profile(dir / (stem + "_v_radial.csv"), r.state.v());
  out << report;
  return r.converged ? kExitOk : kExitUnconverged;
}

int fiber_scan(const RunConfig& cfg, std::ostream& out) {
  FiberProfile pr;
  if (cfg.profile) {
    pr.A = cfg.profile->A;
    pr.B = cfg.profile->B;
    pr.C = cfg.profile->C;
    pr.q = cfg.profile->q;
    if (!(pr.B > 0.0)) throw UsageError("fiber-scan needs B > 0");
  } else {
    const StatePair s = load_state(cfg, "fiber-scan");
    pr = fiber_profile(s, LogKernelTable(s.grid()));
  }
  const fs::path dir(cfg.output_dir);
  write_text(dir / "fiber_scan.csv", fiber_scan_csv(pr, cfg.scan_t_min, cfg.scan_t_max, cfg.scan_points));
  const std::string report = fiber_scan_json(pr);
  write_text(dir / "fiber_roots.json", report);
  out << report;
  return kExitOk;
}

std::string cache_key(double q, std::size_t n, double L) {
  return "q=" + detail::format_double(q) + ",n=" + std::to_string(n) + ",L=" + detail::format_double(L);
}

int gn(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.q) throw UsageError("gn-constant needs q");
  const double q = *cfg.q;
  if (!(q > 2.0)) throw UsageError("gn-constant needs q > 2");
  const fs::path dir(cfg.output_dir);
  const fs::path cache_path = cfg.gn_cache.empty() ? dir / "gn_cache.json" : fs::path(cfg.gn_cache);
  json cache = json::object();
  if (fs::exists(cache_path)) {
    std::ifstream in(cache_path);
    try {
      cache = json::parse(in);
    } catch (const json::parse_error&) {
      cache = json::object();
    }
    if (!cache.is_object()) cache = json::object();
  }
  const std::string key = cache_key(q, cfg.n, cfg.L);
  GNConstant k;
  bool cached = false;
  if (cache.contains(key)) {
    const json& e = cache[key];
    k.q = e.at("q").get<double>();
    k.K = e.at("K").get<double>();
    k.method = e.at("method").get<std::string>();
    k.residual = e.at("residual").get<double>();
    k.K_ascent = e.at("K_ascent").get<double>();
    k.K_shooting = e.at("K_shooting").get<double>();
    k.ground_mass = e.at("ground_mass").get<double>();
    k.relative_gap = e.at("relative_gap").get<double>();
    k.iterations = e.at("iterations").get<int>();
    cached = true;
  } else {
    k = gn_constant(q, make_grid(cfg.n, cfg.L));
    cache[key] = json::parse(gn_constant_json(k, {cfg.n, cfg.L}, false));
    if (cache_path.has_parent_path()) fs::create_directories(cache_path.parent_path());
    write_text(cache_path, detail::write_json(cache));
  }
  const std::string report = gn_constant_json(k, {cfg.n, cfg.L}, cached);
  write_text(dir / "gn_constant.json", report);
  out << report;
  return kExitOk;
}

int regime(const RunConfig& cfg, std::ostream& out) {
  const ModelParams& prm = need_params(cfg, "regime");
  std::optional<double> K4, K2p;
  if (prm.p == 2.0) K4 = gn_constant(4.0).K;
  if (prm.p > 2.0 && prm.mu1 > 0.0 && prm.mu2 > 0.0 && prm.beta > 0.0) K2p = gn_constant(2.0 * prm.p).K;
  const Regime r = classify_regime(prm, K4, K2p);
  const std::string report = regime_json(r, prm, K4, K2p);
  write_text(fs::path(cfg.output_dir) / "regime.json", report);
  out << report;
  return kExitOk;
}

int validate(const RunConfig& cfg, std::ostream& out) {
  const StatePair s = load_state(cfg, "validate");
  const LogKernelTable table(s.grid());
  const IdentityReport r = validate_state(s, table, cfg.t_list);
  const std::string report = identity_report_json(r, eval_breakdown(s, table), kernel_bounds(s, table), s.params(),
                                                  {s.grid().n(), s.grid().half_width()});
  write_text(fs::path(cfg.output_dir) / "identity.json", report);
  out << report;
  return kExitOk;
}

}  // namespace

const std::vector<std::string_view>& command_names() {
  static const std::vector<std::string_view> names = {"ground", "excited", "fiber-scan",
                                                      "gn-constant", "regime", "validate"};
  return names;
}

int run_command(std::string_view name, const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    fs::create_directories(cfg.output_dir);
    if (name == "ground") return solve(cfg, Branch::Ground, out);
    if (name == "excited") return solve(cfg, Branch::Excited, out);
    if (name == "fiber-scan") return fiber_scan(cfg, out);
    if (name == "gn-constant") return gn(cfg, out);
    if (name == "regime") return regime(cfg, out);
    if (name == "validate") return validate(cfg, out);
    err << "error: unknown command '" << name << "'\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    // Unclassified parameters, missing keys and grid mismatches are input errors.
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUnconverged;
  }
}

}  // namespace logsp
