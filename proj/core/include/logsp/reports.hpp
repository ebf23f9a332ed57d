#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "logsp/fiber.hpp"
#include "logsp/regimes.hpp"
#include "logsp/solver.hpp"
#include "logsp/validate.hpp"

namespace logsp {

/// JSON documents written by the command-line tool. All floating-point values
/// carry 17 significant digits; non-finite values are written as null.
enum class ReportKind { Solve, Regime, GNConstant, FiberScan, Identity, Config };

const char* to_string(ReportKind kind) noexcept;

struct GridSpec {
  std::size_t n = 0;
  double L = 0.0;
};

std::string solve_report_json(const SolveReport& r, const GridSpec& grid);
std::string regime_json(const Regime& r, const ModelParams& params, std::optional<double> K4,
                        std::optional<double> K2p);
std::string gn_constant_json(const GNConstant& k, const GridSpec& grid, bool cached);
std::string fiber_scan_json(const FiberProfile& pr);
std::string identity_report_json(const IdentityReport& r, const FunctionalBreakdown& bd, const KernelBounds& kb,
                                 const ModelParams& params, const GridSpec& grid);

/// The schema each report kind follows, as a JSON Schema subset (type, properties,
/// required, items, additionalProperties).
std::string report_schema(ReportKind kind);

/// Violations of the schema of `kind` found in `json_text`; empty when valid.
std::vector<std::string> schema_errors(ReportKind kind, std::string_view json_text);

/// CSV "iteration,value".
std::string energy_trace_csv(const std::vector<double>& trace);
/// CSV "t,F,f,g" on a geometric grid of `points` values from t_min to t_max.
std::string fiber_scan_csv(const FiberProfile& pr, double t_min, double t_max, std::size_t points);

}  // namespace logsp
