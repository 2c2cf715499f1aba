#pragma once

#include <string_view>

#include "pickplace/json_io.hpp"

namespace pickplace {

// Reads the TOML subset used by pipeline configs into JSON: [table] and
// [a.b] headers, bare or quoted keys, dotted keys, strings, integers, floats,
// booleans, (nested) arrays, inline tables and # comments. Multi-line strings,
// dates and arrays of tables are rejected with ParseError.
Json parse_toml(std::string_view text);

}  // namespace pickplace
