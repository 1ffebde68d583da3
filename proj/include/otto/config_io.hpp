#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "otto/engine.hpp"

namespace otto {

using Json = nlohmann::json;

// Names accepted as CycleConfig keys. "lambda" is a write-only alias that
// sets lambda_h and lambda_c together.
const std::vector<std::string>& config_fields();
bool is_config_field(std::string_view name);

void set_config_field(CycleConfig& config, std::string_view name, double value);
double get_config_field(const CycleConfig& config, std::string_view name);

// Unknown keys and non-numeric values raise ConfigError.
CycleConfig config_from_json(const Json& j, CycleConfig base = {});
Json to_json(const CycleConfig& config);

// Sorted-key dump with every field spelled out; the sweep cache key.
std::string canonical_config(const CycleConfig& config);

// printf("%.17g") with "inf", "-inf" and "nan" spelled out.
std::string format_double(double v);

// JSON text with floats at 17 significant digits; non-finite floats become
// the strings "inf", "-inf", "nan".
std::string dump_json(const Json& j, int indent = 2);

Json read_json_file(const std::string& path);

// Parses "key=value" into its two halves.
std::pair<std::string, std::string> split_override(std::string_view text);

}  // namespace otto
