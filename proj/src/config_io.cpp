#include "otto/config_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace otto {

namespace {

struct Field {
  const char* name;
  double CycleConfig::*real;
  int CycleConfig::*integer;
};

const Field kFields[] = {
    {"d", nullptr, &CycleConfig::d},
    {"omega_h", &CycleConfig::omega_h, nullptr},
    {"omega_c", &CycleConfig::omega_c, nullptr},
    {"T_h", &CycleConfig::T_h, nullptr},
    {"T_c", &CycleConfig::T_c, nullptr},
    {"g", &CycleConfig::g, nullptr},
    {"t_k", &CycleConfig::t_k, nullptr},
    {"t_e", &CycleConfig::t_e, nullptr},
    {"lambda_h", &CycleConfig::lambda_h, nullptr},
    {"lambda_c", &CycleConfig::lambda_c, nullptr},
    {"propagator_steps", nullptr, &CycleConfig::propagator_steps},
    {"propagator_tol", &CycleConfig::propagator_tol, nullptr},
    {"fixed_point_tol", &CycleConfig::fixed_point_tol, nullptr},
    {"grouping_tol", &CycleConfig::grouping_tol, nullptr},
    {"merge_tol", &CycleConfig::merge_tol, nullptr},
    {"regime_tol", &CycleConfig::regime_tol, nullptr},
};

const Field* find_field(std::string_view name) {
  for (const auto& f : kFields)
    if (name == f.name) return &f;
  return nullptr;
}

}  // namespace

const std::vector<std::string>& config_fields() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : kFields) out.emplace_back(f.name);
    out.emplace_back("lambda");
    return out;
  }();
  return names;
}

bool is_config_field(std::string_view name) { return name == "lambda" || find_field(name) != nullptr; }

void set_config_field(CycleConfig& config, std::string_view name, double value) {
  if (name == "lambda") {
    config.lambda_h = config.lambda_c = value;
    return;
  }
  const Field* f = find_field(name);
  if (!f) throw ConfigError(std::string(name), "unknown configuration key");
  if (f->integer) {
    if (!std::isfinite(value) || value != std::floor(value) || std::abs(value) > 1e9)
      throw ConfigError(f->name, "must be an integer");
    config.*(f->integer) = static_cast<int>(value);
  } else {
    config.*(f->real) = value;
  }
}

double get_config_field(const CycleConfig& config, std::string_view name) {
  if (name == "lambda") {
    if (config.lambda_h != config.lambda_c) throw ConfigError("lambda", "lambda_h and lambda_c differ");
    return config.lambda_h;
  }
  const Field* f = find_field(name);
  if (!f) throw ConfigError(std::string(name), "unknown configuration key");
  return f->integer ? static_cast<double>(config.*(f->integer)) : config.*(f->real);
}

CycleConfig config_from_json(const Json& j, CycleConfig base) {
  if (!j.is_object()) throw ConfigError("base", "configuration must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!is_config_field(key)) throw ConfigError(key, "unknown configuration key");
    if (!value.is_number()) throw ConfigError(key, "must be a number");
    set_config_field(base, key, value.get<double>());
  }
  return base;
}

Json to_json(const CycleConfig& config) {
  Json j = Json::object();
  for (const auto& f : kFields) {
    if (f.integer)
      j[f.name] = config.*(f.integer);
    else
      j[f.name] = config.*(f.real);
  }
  return j;
}

std::string canonical_config(const CycleConfig& config) {
  std::string out = "{";
  bool first = true;
  // Json objects iterate in sorted key order.
  const Json j = to_json(config);
  for (const auto& [key, value] : j.items()) {
    if (!first) out += ',';
    first = false;
    out += '"' + key + "\":";
    out += value.is_number_integer() ? std::to_string(value.get<long long>()) : format_double(value.get<double>());
  }
  return out + "}";
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

void dump_into(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string close = indent > 0 ? "\n" + std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  if (j.is_number_float()) {
    const double v = j.get<double>();
    out += std::isfinite(v) ? format_double(v) : '"' + format_double(v) + '"';
  } else if (j.is_object()) {
    if (j.empty()) {
      out += "{}";
      return;
    }
    out += '{';
    bool first = true;
    for (const auto& [key, value] : j.items()) {
      out += (first ? "" : ",") + pad + Json(key).dump() + (indent > 0 ? ": " : ":");
      dump_into(out, value, indent, depth + 1);
      first = false;
    }
    out += close + '}';
  } else if (j.is_array()) {
    if (j.empty()) {
      out += "[]";
      return;
    }
    out += '[';
    bool first = true;
    for (const auto& value : j) {
      out += (first ? "" : ",") + pad;
      dump_into(out, value, indent, depth + 1);
      first = false;
    }
    out += close + ']';
  } else {
    out += j.dump();
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  dump_into(out, j, indent, 0);
  return out + (indent > 0 ? "\n" : "");
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error("invalid JSON in " + path + ": " + e.what());
  }
}

std::pair<std::string, std::string> split_override(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0) throw ConfigError(std::string(text), "override must be key=value");
  return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

}  // namespace otto
