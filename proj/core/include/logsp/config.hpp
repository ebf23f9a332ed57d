#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "logsp/functionals.hpp"
#include "logsp/solver.hpp"

namespace logsp {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A fiber profile given by its coefficients instead of a state.
struct AnalyticProfile {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double q = 0.0;
};

struct RunConfig {
  /// Present when any of p, mu1, mu2, beta, c1, c2 is given; then all six are required.
  std::optional<ModelParams> params;
  std::size_t n = 128;
  double L = 8.0;
  SolveOptions opts;
  /// Dilation factors for `validate`.
  std::vector<double> t_list{0.5, 1.0, 2.0};
  /// Exponent for `gn-constant`; for `fiber-scan` with A, B, C it is the profile exponent.
  std::optional<double> q;
  /// A, B, C (with q) for `fiber-scan`.
  std::optional<AnalyticProfile> profile;
  /// Field dumps read by `validate` and `fiber-scan`.
  std::string u_field;
  std::string v_field;
  /// fiber-scan log grid.
  double scan_t_min = 1e-2;
  double scan_t_max = 1e2;
  std::size_t scan_points = 401;
  /// On-disk GN cache; empty means <output_dir>/gn_cache.json.
  std::string gn_cache;
  std::string output_dir = ".";
};

struct ConfigKey {
  std::string_view name;
  std::string_view type;
  std::string_view default_value;
  std::string_view help;
};

/// Every accepted key, in the order --help lists them.
const std::vector<ConfigKey>& config_keys();

/// Accepts a single JSON object or key = value lines ('#' starts a comment,
/// lists are comma separated). Throws ConfigError on unknown or duplicate keys,
/// type mismatches and violated invariants.
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::string& path);

/// The checks parse_config applies after reading the keys; use after editing a
/// RunConfig by hand.
void check_config(const RunConfig& cfg);

/// Lossless JSON form of a config; parse_config(config_to_json(c)) == c.
std::string config_to_json(const RunConfig& cfg);

}  // namespace logsp
