#include "otto/sweep.hpp"

#include "otto/parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace otto {

CycleAnalysis analyze_cycle(const CycleConfig& config) { return analyze_cycle(config, build_cycle(config)); }

CycleAnalysis analyze_cycle(const CycleConfig& config, const CycleOperators& ops) {
  Corners corners = limit_cycle(ops, config);
  const Thermo thermo = unmeasured_thermo(corners, ops);
  auto dists = [&](Scheme s) {
    return scheme_distributions(marginals(outcome_joint(s, corners, ops)), config.merge_tol);
  };
  SchemeDistributions tpm_d = dists(Scheme::TPM);
  SchemeDistributions dbn_d = dists(Scheme::DBN);
  SchemeReport tpm = closed_form_report(Scheme::TPM, corners, ops, tpm_d);
  SchemeReport dbn = closed_form_report(Scheme::DBN, corners, ops, dbn_d);
  const double td_tpm = trace_distance(avg_post_measurement_state(Scheme::TPM, corners, ops), corners.rho1);
  const double td_dbn = trace_distance(avg_post_measurement_state(Scheme::DBN, corners, ops), corners.rho1);
  const double c1 = rel_entropy_coherence(corners.rho1, ops.H_e_end);
  const double c3 = rel_entropy_coherence(corners.rho3, ops.H_k_end);
  const double kl = kl_divergence(dbn_d.work, tpm_d.work);
  const double tol = config.regime_tol;
  return CycleAnalysis{config,
                       std::move(corners),
                       thermo,
                       classify_regime(thermo.W, thermo.Q_h, thermo.Q_c, tol),
                       std::move(tpm_d),
                       std::move(dbn_d),
                       tpm,
                       dbn,
                       classify_regime(tpm.mean_w, tpm.mean_qh, tpm.mean_qc, tol),
                       classify_regime(dbn.mean_w, dbn.mean_qh, dbn.mean_qc, tol),
                       kl,
                       c1,
                       c3,
                       td_tpm,
                       td_dbn,
                       fluctuation_ratio(tpm, config),
                       fluctuation_ratio(dbn, config),
                       check_equivalence_conditions(ops)};
}

Json to_json(const SchemeReport& r) {
  return {{"scheme", std::string(to_string(r.scheme))},
          {"mean_w", r.mean_w},
          {"var_w", r.var_w},
          {"mean_qh", r.mean_qh},
          {"var_qh", r.var_qh},
          {"mean_qc", r.mean_qc},
          {"var_qc", r.var_qc},
          {"closed_form_mean_w", r.closed_form_mean_w},
          {"closed_form_var_w", r.closed_form_var_w},
          {"closed_form_mean_qh", r.closed_form_mean_qh},
          {"closed_form_var_qh", r.closed_form_var_qh},
          {"closed_form_mean_qc", r.closed_form_mean_qc},
          {"closed_form_var_qc", r.closed_form_var_qc},
          {"first_law_residual", r.first_law_residual},
          {"max_closed_form_gap", r.max_closed_form_gap()},
          {"expanded_var_w", r.expanded_var_w},
          {"expanded_var_w_mismatch", r.expanded_var_w_mismatch()}};
}

namespace {

Json eta_json(const FluctuationRatio& f) {
  if (f.undefined()) return {{"eta2", nullptr}, {"ratio", nullptr}, {"violated", nullptr}, {"status", "eta2-undefined"}};
  return {{"eta2", *f.eta2}, {"ratio", *f.ratio()}, {"violated", f.violated}, {"status", "ok"}};
}

}  // namespace

Json summary_json(const CycleAnalysis& a) {
  return {{"config", to_json(a.config)},
          {"limit_cycle", {{"iterations", a.corners.iterations}, {"residual", a.corners.residual}}},
          {"W", a.thermo.W},
          {"Q_h", a.thermo.Q_h},
          {"Q_c", a.thermo.Q_c},
          {"regime_unmeasured", std::string(to_string(a.regime_unmeasured))},
          {"regime_tpm", std::string(to_string(a.regime_tpm))},
          {"regime_dbn", std::string(to_string(a.regime_dbn))},
          {"tpm", to_json(a.tpm)},
          {"dbn", to_json(a.dbn)},
          {"kl", is_kl_infinite(a.kl) ? Json(nullptr) : Json(a.kl)},
          {"kl_status", is_kl_infinite(a.kl) ? "kl-infinite" : "ok"},
          {"coherence_rho1", a.coherence_rho1},
          {"coherence_rho3", a.coherence_rho3},
          {"trace_distance_tpm", a.trace_distance_tpm},
          {"trace_distance_dbn", a.trace_distance_dbn},
          {"bound", a.eta_tpm.bound},
          {"eta2_tpm", eta_json(a.eta_tpm)},
          {"eta2_dbn", eta_json(a.eta_dbn)},
          {"equivalence_conditions",
           {{"satisfied", a.equivalence.satisfied}, {"worst_residual", a.equivalence.worst_residual}}}};
}

namespace {

std::array<double, 6> report_moments(const SchemeReport& r) {
  return {r.mean_w, r.var_w, r.mean_qh, r.var_qh, r.mean_qc, r.var_qc};
}

Regime regime_from_string(const std::string& s) {
  for (Regime r : {Regime::Engine, Regime::Accelerator, Regime::Heater, Regime::Other})
    if (s == to_string(r)) return r;
  throw Error("unknown regime: " + s);
}

Json optional_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }
std::optional<double> optional_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

const char* const kMomentNames[6] = {"mean_w", "var_w", "mean_qh", "var_qh", "mean_qc", "var_qc"};

}  // namespace

PointMetrics point_metrics(const CycleAnalysis& a) {
  PointMetrics m;
  m.W = a.thermo.W;
  m.Q_h = a.thermo.Q_h;
  m.Q_c = a.thermo.Q_c;
  m.regime_unmeasured = a.regime_unmeasured;
  m.regime_tpm = a.regime_tpm;
  m.regime_dbn = a.regime_dbn;
  m.kl = a.kl;
  m.coherence_rho1 = a.coherence_rho1;
  m.coherence_rho3 = a.coherence_rho3;
  m.trace_distance_tpm = a.trace_distance_tpm;
  m.trace_distance_dbn = a.trace_distance_dbn;
  m.eta2_tpm = a.eta_tpm.eta2;
  m.eta2_dbn = a.eta_dbn.eta2;
  m.bound = a.eta_tpm.bound;
  m.moments_tpm = report_moments(a.tpm);
  m.moments_dbn = report_moments(a.dbn);
  return m;
}

Json to_json(const PointMetrics& m) {
  Json j = {{"W", m.W},
            {"Q_h", m.Q_h},
            {"Q_c", m.Q_c},
            {"regime_unmeasured", std::string(to_string(m.regime_unmeasured))},
            {"regime_tpm", std::string(to_string(m.regime_tpm))},
            {"regime_dbn", std::string(to_string(m.regime_dbn))},
            {"kl", is_kl_infinite(m.kl) ? Json("inf") : Json(m.kl)},
            {"coherence_rho1", m.coherence_rho1},
            {"coherence_rho3", m.coherence_rho3},
            {"trace_distance_tpm", m.trace_distance_tpm},
            {"trace_distance_dbn", m.trace_distance_dbn},
            {"eta2_tpm", optional_json(m.eta2_tpm)},
            {"eta2_dbn", optional_json(m.eta2_dbn)},
            {"bound", m.bound}};
  for (int i = 0; i < 6; ++i) {
    j[std::string(kMomentNames[i]) + "_tpm"] = m.moments_tpm[i];
    j[std::string(kMomentNames[i]) + "_dbn"] = m.moments_dbn[i];
  }
  return j;
}

PointMetrics point_metrics_from_json(const Json& j) {
  PointMetrics m;
  m.W = j.at("W").get<double>();
  m.Q_h = j.at("Q_h").get<double>();
  m.Q_c = j.at("Q_c").get<double>();
  m.regime_unmeasured = regime_from_string(j.at("regime_unmeasured").get<std::string>());
  m.regime_tpm = regime_from_string(j.at("regime_tpm").get<std::string>());
  m.regime_dbn = regime_from_string(j.at("regime_dbn").get<std::string>());
  const Json& kl = j.at("kl");
  m.kl = kl.is_string() ? std::numeric_limits<double>::infinity() : kl.get<double>();
  m.coherence_rho1 = j.at("coherence_rho1").get<double>();
  m.coherence_rho3 = j.at("coherence_rho3").get<double>();
  m.trace_distance_tpm = j.at("trace_distance_tpm").get<double>();
  m.trace_distance_dbn = j.at("trace_distance_dbn").get<double>();
  m.eta2_tpm = optional_from(j.at("eta2_tpm"));
  m.eta2_dbn = optional_from(j.at("eta2_dbn"));
  m.bound = j.at("bound").get<double>();
  for (int i = 0; i < 6; ++i) {
    m.moments_tpm[i] = j.at(std::string(kMomentNames[i]) + "_tpm").get<double>();
    m.moments_dbn[i] = j.at(std::string(kMomentNames[i]) + "_dbn").get<double>();
  }
  return m;
}

const std::vector<std::string>& known_outputs() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out = {"kl",          "coherence_rho1",    "coherence_rho3", "trace_distance_tpm",
                                    "trace_distance_dbn", "regime_tpm", "regime_dbn",     "regime_unmeasured",
                                    "eta2_tpm",    "eta2_dbn",          "bound",          "ratio_tpm",
                                    "ratio_dbn",   "W",                 "Q_h",            "Q_c"};
    for (const char* suffix : {"_tpm", "_dbn"})
      for (const char* m : kMomentNames) out.push_back(std::string(m) + suffix);
    return out;
  }();
  return names;
}

Cell output_cell(const PointMetrics& m, const std::string& name, std::vector<std::string>& flags) {
  auto flag = [&](const char* f) {
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.emplace_back(f);
  };
  auto eta = [&](const std::optional<double>& e, bool ratio) -> Cell {
    if (!e) {
      flag("eta2-undefined");
      return std::monostate{};
    }
    return ratio ? *e / m.bound : *e;
  };
  if (name == "kl") {
    if (is_kl_infinite(m.kl)) {
      flag("kl-infinite");
      return std::monostate{};
    }
    return m.kl;
  }
  if (name == "coherence_rho1") return m.coherence_rho1;
  if (name == "coherence_rho3") return m.coherence_rho3;
  if (name == "trace_distance_tpm") return m.trace_distance_tpm;
  if (name == "trace_distance_dbn") return m.trace_distance_dbn;
  if (name == "regime_tpm") return std::string(to_string(m.regime_tpm));
  if (name == "regime_dbn") return std::string(to_string(m.regime_dbn));
  if (name == "regime_unmeasured") return std::string(to_string(m.regime_unmeasured));
  if (name == "eta2_tpm") return eta(m.eta2_tpm, false);
  if (name == "eta2_dbn") return eta(m.eta2_dbn, false);
  if (name == "ratio_tpm") return eta(m.eta2_tpm, true);
  if (name == "ratio_dbn") return eta(m.eta2_dbn, true);
  if (name == "bound") return m.bound;
  if (name == "W") return m.W;
  if (name == "Q_h") return m.Q_h;
  if (name == "Q_c") return m.Q_c;
  for (int i = 0; i < 6; ++i) {
    if (name == std::string(kMomentNames[i]) + "_tpm") return m.moments_tpm[i];
    if (name == std::string(kMomentNames[i]) + "_dbn") return m.moments_dbn[i];
  }
  throw ConfigError("outputs", "unknown output: " + name);
}

// ---- spec -------------------------------------------------------------------

std::size_t SweepSpec::size() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= a.values.size();
  return n;
}

CycleConfig SweepSpec::config_at(const std::vector<std::size_t>& index) const {
  CycleConfig c = base;
  for (std::size_t k = 0; k < axes.size(); ++k) set_config_field(c, axes[k].param, axes[k].values.at(index[k]));
  return c;
}

namespace {

std::vector<std::vector<std::size_t>> grid_indices(const SweepSpec& spec) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  const std::size_t n = spec.size();
  for (std::size_t p = 0; p < n; ++p) {
    out.push_back(idx);
    for (std::size_t k = spec.axes.size(); k-- > 0;) {
      if (++idx[k] < spec.axes[k].values.size()) break;
      idx[k] = 0;
    }
  }
  return out;
}

}  // namespace

void SweepSpec::validate() const {
  std::set<std::string> seen;
  for (const auto& a : axes) {
    if (!is_config_field(a.param)) throw ConfigError("axes", "unknown parameter: " + a.param);
    const bool alias_clash = (a.param == "lambda" && (seen.count("lambda_h") || seen.count("lambda_c"))) ||
                             ((a.param == "lambda_h" || a.param == "lambda_c") && seen.count("lambda"));
    if (!seen.insert(a.param).second || alias_clash) throw ConfigError("axes", "parameter set twice: " + a.param);
    if (a.values.empty()) throw ConfigError("axes", "axis " + a.param + " has no values");
    std::vector<double> sorted = a.values;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ConfigError("axes", "axis " + a.param + " repeats a value");
  }
  if (outputs.empty()) throw ConfigError("outputs", "no outputs requested");
  for (const auto& o : outputs)
    if (std::find(known_outputs().begin(), known_outputs().end(), o) == known_outputs().end())
      throw ConfigError("outputs", "unknown output: " + o);
  base.validate();
  for (const auto& idx : grid_indices(*this)) config_at(idx).validate();
}

SweepSpec sweep_spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("sweep", "sweep file must be a JSON object");
  SweepSpec spec;
  for (const auto& [key, value] : j.items()) {
    if (key == "base") {
      spec.base = config_from_json(value);
    } else if (key == "axes") {
      if (!value.is_array()) throw ConfigError("axes", "must be an array");
      for (const auto& a : value) {
        if (!a.is_object() || !a.contains("param") || !a.contains("values") || a.size() != 2)
          throw ConfigError("axes", "each axis needs exactly param and values");
        Axis axis;
        axis.param = a.at("param").get<std::string>();
        for (const auto& v : a.at("values")) {
          if (!v.is_number()) throw ConfigError("axes", "values must be numbers");
          axis.values.push_back(v.get<double>());
        }
        spec.axes.push_back(std::move(axis));
      }
    } else if (key == "outputs") {
      if (!value.is_array()) throw ConfigError("outputs", "must be an array");
      for (const auto& o : value) spec.outputs.push_back(o.get<std::string>());
    } else {
      throw ConfigError(key, "unknown sweep key");
    }
  }
  return spec;
}

Json to_json(const SweepSpec& spec) {
  Json axes = Json::array();
  for (const auto& a : spec.axes) axes.push_back({{"param", a.param}, {"values", a.values}});
  return {{"base", to_json(spec.base)}, {"axes", axes}, {"outputs", spec.outputs}};
}

namespace {

double parse_number(std::string_view key, std::string_view text) {
  try {
    const Json v = Json::parse(text);
    if (v.is_number()) return v.get<double>();
  } catch (const Json::exception&) {
  }
  throw ConfigError(std::string(key), "not a number: " + std::string(text));
}

std::vector<std::string> split_list(std::string_view text) {
  std::string s(text);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') s = s.substr(1, s.size() - 2);
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t\""));
    item.erase(item.find_last_not_of(" \t\"") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

void apply_override(CycleConfig& config, std::string_view key, std::string_view value) {
  std::string_view field = key;
  if (field.rfind("base.", 0) == 0) field.remove_prefix(5);
  if (!is_config_field(field)) throw ConfigError(std::string(key), "unknown configuration key");
  set_config_field(config, field, parse_number(key, value));
}

void apply_override(SweepSpec& spec, std::string_view key, std::string_view value) {
  if (key == "outputs") {
    spec.outputs = split_list(value);
    return;
  }
  if (key.rfind("axes.", 0) == 0) {
    const std::string param(key.substr(5));
    if (!is_config_field(param)) throw ConfigError(std::string(key), "unknown parameter");
    Axis axis{param, {}};
    for (const auto& v : split_list(value)) axis.values.push_back(parse_number(key, v));
    auto it = std::find_if(spec.axes.begin(), spec.axes.end(), [&](const Axis& a) { return a.param == param; });
    if (it != spec.axes.end())
      *it = std::move(axis);
    else
      spec.axes.push_back(std::move(axis));
    return;
  }
  apply_override(spec.base, key, value);
}

// ---- execution --------------------------------------------------------------

namespace {

constexpr const char* kCacheVersion = "otto-point-v1";

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::filesystem::path cache_file(const std::filesystem::path& dir, const std::string& key) {
  char name[32];
  std::snprintf(name, sizeof name, "%016llx.json", static_cast<unsigned long long>(fnv1a(key)));
  return dir / name;
}

std::optional<PointMetrics> cache_load(const std::filesystem::path& dir, const std::string& key) {
  std::ifstream in(cache_file(dir, key));
  if (!in) return std::nullopt;
  try {
    const Json j = Json::parse(in);
    if (j.at("key").get<std::string>() != key) return std::nullopt;
    return point_metrics_from_json(j.at("metrics"));
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed and overwritten
  }
}

void cache_store(const std::filesystem::path& dir, const std::string& key, const PointMetrics& m, std::size_t slot) {
  const auto target = cache_file(dir, key);
  auto tmp = target;
  tmp += ".tmp" + std::to_string(slot);
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << Json{{"key", key}, {"metrics", to_json(m)}}.dump();
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) std::filesystem::remove(tmp, ec);
}

std::string stroke_key(const DrivingProtocol& p, const CycleConfig& c) {
  return std::to_string(c.d) + ':' + format_double(p.omega_start) + ':' + format_double(p.omega_end) + ':' +
         format_double(p.g_peak) + ':' + format_double(p.duration) + ':' + std::to_string(c.propagator_steps) + ':' +
         format_double(c.propagator_tol);
}

struct StrokeSlot {
  DrivingProtocol protocol;
  CycleConfig config;
  ComplexMatrix unitary;
  std::optional<std::string> failure;
};

struct PointOutcome {
  std::optional<PointMetrics> metrics;
  std::string failure_status;
};

}  // namespace

std::vector<SweepResult> run_sweep(const SweepSpec& spec, const SweepOptions& options) {
  spec.validate();
  const auto indices = grid_indices(spec);
  const std::size_t n = indices.size();
  std::vector<CycleConfig> configs;
  std::vector<std::string> keys;
  for (const auto& idx : indices) {
    configs.push_back(spec.config_at(idx));
    keys.push_back(std::string(kCacheVersion) + canonical_config(configs.back()));
  }

  std::vector<PointOutcome> outcomes(n);
  if (options.cache_dir) {
    std::filesystem::create_directories(*options.cache_dir);
    for (std::size_t i = 0; i < n; ++i) outcomes[i].metrics = cache_load(*options.cache_dir, keys[i]);
  }

  // Distinct stroke unitaries are computed once and then shared read-only.
  std::map<std::string, std::size_t> stroke_index;
  std::vector<StrokeSlot> strokes;
  std::vector<std::pair<std::size_t, std::size_t>> point_strokes(n);
  auto stroke_of = [&](const DrivingProtocol& p, const CycleConfig& c) {
    auto [it, fresh] = stroke_index.emplace(stroke_key(p, c), strokes.size());
    if (fresh) strokes.push_back({p, c, {}, std::nullopt});
    return it->second;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (outcomes[i].metrics) continue;
    point_strokes[i] = {stroke_of(configs[i].compression(), configs[i]), stroke_of(configs[i].expansion(), configs[i])};
  }
  parallel_for(strokes.size(), options.parallelism, [&](std::size_t s) {
    auto& slot = strokes[s];
    try {
      slot.unitary = spin_propagator(slot.protocol, slot.config.d, slot.config.propagator_steps,
                                     slot.config.propagator_tol)
                         .unitary;
    } catch (const ConvergenceError& e) {
      slot.failure = e.what();
    }
  });

  parallel_for(n, options.parallelism, [&](std::size_t i) {
    auto& out = outcomes[i];
    if (out.metrics) return;
    const auto& [sk, se] = point_strokes[i];
    if (strokes[sk].failure || strokes[se].failure) {
      out.failure_status = "non-converged";
      return;
    }
    try {
      const auto ops = build_cycle(configs[i], strokes[sk].unitary, strokes[se].unitary);
      out.metrics = point_metrics(analyze_cycle(configs[i], ops));
      if (options.cache_dir) cache_store(*options.cache_dir, keys[i], *out.metrics, i);
    } catch (const ConvergenceError&) {
      out.failure_status = "non-converged";
    } catch (const Error&) {
      out.failure_status = "error";
    }
  });

  std::vector<SweepResult> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    SweepResult row;
    row.index = indices[i];
    for (std::size_t k = 0; k < spec.axes.size(); ++k) row.params.push_back(spec.axes[k].values[indices[i][k]]);
    if (!outcomes[i].metrics) {
      row.values.assign(spec.outputs.size(), std::monostate{});
      row.status = outcomes[i].failure_status;
    } else {
      std::vector<std::string> flags;
      for (const auto& o : spec.outputs) row.values.push_back(output_cell(*outcomes[i].metrics, o, flags));
      if (flags.empty()) {
        row.status = "ok";
      } else {
        for (std::size_t f = 0; f < flags.size(); ++f) row.status += (f ? "|" : "") + flags[f];
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---- figures ----------------------------------------------------------------

const std::vector<std::string>& figure_names() {
  static const std::vector<std::string> names = {"fig1",  "fig2",  "fig3a", "fig3b", "fig4",
                                                 "figS2", "figS3", "figS4", "figS5"};
  return names;
}

namespace {

CycleConfig coherent_preset() {
  CycleConfig c;
  c.d = 3;
  c.omega_h = 10.0;
  c.T_h = 14.0;
  c.omega_c = 0.5;
  c.T_c = 0.1;
  c.g = 9.0;
  return c;
}

CycleConfig quasistatic_preset() {
  CycleConfig c;
  c.d = 3;
  c.omega_h = 1.0;
  c.T_h = 1.2;
  c.omega_c = 0.85;
  c.T_c = 1.0;
  c.g = 0.06;
  return c;
}

Axis lambda_axis(int points) {
  if (points < 1) throw ConfigError("lambda_points", "must be >= 1");
  Axis a{"lambda", {}};
  for (int k = 1; k <= points; ++k) a.values.push_back(static_cast<double>(k) / points);
  return a;
}

Axis g_axis(int points) {
  if (points < 2) throw ConfigError("g_points", "must be >= 2");
  Axis a{"g", {}};
  for (int k = 0; k < points; ++k) a.values.push_back(10.0 * k / (points - 1));
  return a;
}

}  // namespace

SweepSpec figure_spec(const std::string& name, int lambda_points, int g_points) {
  SweepSpec s;
  const bool quasistatic = name == "fig4" || name == "figS4" || name == "figS5";
  const bool contour = name == "fig3a" || name == "fig3b" || name.rfind("figS", 0) == 0;
  if (std::find(figure_names().begin(), figure_names().end(), name) == figure_names().end())
    throw ConfigError("figure", "unknown figure: " + name);
  s.base = quasistatic ? quasistatic_preset() : coherent_preset();
  s.axes.push_back(lambda_axis(lambda_points));
  if (contour) s.axes.push_back(g_axis(g_points));
  if (name == "fig1" || name == "figS2") s.outputs = {"kl", "coherence_rho1", "coherence_rho3"};
  if (name == "fig2") s.outputs = {"trace_distance_tpm", "trace_distance_dbn"};
  if (name == "figS3") s.outputs = {"trace_distance_tpm"};
  if (name == "fig3a") s.outputs = {"regime_unmeasured", "regime_dbn"};
  if (name == "fig3b") s.outputs = {"regime_tpm"};
  if (name == "fig4") s.outputs = {"eta2_tpm", "eta2_dbn", "bound"};
  if (name == "figS4") s.outputs = {"ratio_dbn", "ratio_tpm"};
  if (name == "figS5") s.outputs = {"coherence_rho1", "coherence_rho3"};
  return s;
}

std::vector<SweepResult> figure_data(const std::string& name, const SweepOptions& options, int lambda_points,
                                     int g_points) {
  return run_sweep(figure_spec(name, lambda_points, g_points), options);
}

// ---- serialization ----------------------------------------------------------

namespace {

std::string cell_text(const Cell& c, bool json) {
  if (std::holds_alternative<std::monostate>(c)) return json ? "null" : "";
  if (const auto* d = std::get_if<double>(&c)) return format_double(*d);
  const auto& s = std::get<std::string>(c);
  return json ? '"' + s + '"' : s;
}

}  // namespace

void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepResult>& rows) {
  for (const auto& a : spec.axes) out << a.param << ',';
  for (const auto& o : spec.outputs) out << o << ',';
  out << "status\n";
  for (const auto& r : rows) {
    for (double p : r.params) out << format_double(p) << ',';
    for (const auto& v : r.values) out << cell_text(v, false) << ',';
    out << r.status << '\n';
  }
}

void write_json(std::ostream& out, const SweepSpec& spec, const std::vector<SweepResult>& rows) {
  out << "[";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out << (i ? ",\n " : "\n ") << '{';
    for (std::size_t k = 0; k < spec.axes.size(); ++k) out << '"' << spec.axes[k].param << "\":" << format_double(r.params[k]) << ',';
    for (std::size_t k = 0; k < spec.outputs.size(); ++k)
      out << '"' << spec.outputs[k] << "\":" << cell_text(r.values[k], true) << ',';
    out << "\"status\":\"" << r.status << "\"}";
  }
  out << "\n]\n";
}

}  // namespace otto
