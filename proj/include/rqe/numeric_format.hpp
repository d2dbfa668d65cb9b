#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace rqe {

/// Shortest decimal form that round-trips to the same double.
std::string format_double(double v);

/// Strict parse of a whole string as a double (no trailing garbage).
std::optional<double> parse_double(std::string_view s);

/// Strict parse of a whole string as a signed integer.
std::optional<long long> parse_int(std::string_view s);

}  // namespace rqe
