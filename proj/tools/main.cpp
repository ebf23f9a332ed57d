#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "logsp/commands.hpp"
#include "logsp/config.hpp"
#include "logsp/reports.hpp"

namespace {

std::string key_table() {
  std::ostringstream out;
  out << "Config keys (key = value lines or one JSON object):\n";
  for (const logsp::ConfigKey& k : logsp::config_keys()) {
    out << "  " << k.name << std::string(k.name.size() < 20 ? 20 - k.name.size() : 1, ' ') << k.type
        << " [" << k.default_value << "]  " << k.help << '\n';
  }
  out << "\nExit status: 0 success, 2 unconverged or numerical failure, 1 usage error.\n"
      << "LOGSP_THREADS caps the FFT thread count.\n";
  return out.str();
}

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n;
  std::optional<double> L;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "config file")->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory (overrides output_dir)");
  sub->add_option("--seed", o.seed, "seed (overrides seed)");
  sub->add_option("--n", o.n, "nodes per axis (overrides n)");
  sub->add_option("--L", o.L, "half width (overrides L)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Normalized solutions of the planar Schrodinger-Poisson system with logarithmic convolution"};
  app.footer(key_table());
  app.require_subcommand(1);

  Overrides o;
  for (std::string_view name : logsp::command_names()) {
    CLI::App* sub = app.add_subcommand(std::string(name));
    add_common(sub, o);
  }
  std::string schema_kind;
  CLI::App* schema = app.add_subcommand("schema", "print the JSON schema of a report");
  schema->add_option("kind", schema_kind, "solve, regime, gn_constant, fiber_scan, identity or config")->required();
  app.get_subcommand("ground")->description("ground state");
  app.get_subcommand("excited")->description("excited state (Thm2 regime)");
  app.get_subcommand("fiber-scan")->description("F, f, g on a log grid and the fiber roots");
  app.get_subcommand("gn-constant")->description("Gagliardo-Nirenberg constant K_q, cached on disk");
  app.get_subcommand("regime")->description("classify the parameters");
  app.get_subcommand("validate")->description("identity checks on a pair of field dumps");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : logsp::kExitUsage;
  }

  if (schema->parsed()) {
    for (auto kind : {logsp::ReportKind::Solve, logsp::ReportKind::Regime, logsp::ReportKind::GNConstant,
                      logsp::ReportKind::FiberScan, logsp::ReportKind::Identity, logsp::ReportKind::Config}) {
      if (schema_kind == logsp::to_string(kind)) {
        std::cout << logsp::report_schema(kind);
        return logsp::kExitOk;
      }
    }
    std::cerr << "error: unknown report kind '" << schema_kind << "'\n";
    return logsp::kExitUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  logsp::RunConfig cfg;
  try {
    cfg = o.config.empty() ? logsp::parse_config("") : logsp::load_config(o.config);
    if (o.out) cfg.output_dir = *o.out;
    if (o.seed) cfg.opts.seed = *o.seed;
    if (o.n) cfg.n = *o.n;
    if (o.L) cfg.L = *o.L;
    logsp::check_config(cfg);
  } catch (const logsp::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return logsp::kExitUsage;
  }
  return logsp::run_command(command, cfg, std::cout, std::cerr);
}
