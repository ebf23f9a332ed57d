#pragma once

#include <string>

#include "json.hpp"

namespace logsp::detail {

/// %.17g; non-finite values print as nan, inf, -inf.
std::string format_double(double x);

/// Serialises like json::dump(2) except that floating-point numbers use 17
/// significant digits. Non-finite numbers become null.
std::string write_json(const nlohmann::json& j);

}  // namespace logsp::detail
