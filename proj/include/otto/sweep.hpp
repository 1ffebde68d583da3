#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "otto/config_io.hpp"
#include "otto/measurement.hpp"

namespace otto {

// Everything a single cycle evaluation produces.
struct CycleAnalysis {
  CycleConfig config;
  Corners corners;
  Thermo thermo;
  Regime regime_unmeasured;
  SchemeDistributions tpm_dists, dbn_dists;
  SchemeReport tpm, dbn;
  Regime regime_tpm, regime_dbn;
  double kl;  // KL(P_DBN || P_TPM) of the work distributions; may be +inf
  double coherence_rho1;  // in the H_e eigenbasis
  double coherence_rho3;  // in the H_k eigenbasis
  double trace_distance_tpm, trace_distance_dbn;
  FluctuationRatio eta_tpm, eta_dbn;
  EquivalenceCheck equivalence;
};

CycleAnalysis analyze_cycle(const CycleConfig& config);
CycleAnalysis analyze_cycle(const CycleConfig& config, const CycleOperators& ops);

Json to_json(const SchemeReport& report);
// Everything reported by `otto simulate` in summary.json.
Json summary_json(const CycleAnalysis& a);

// The scalar subset of CycleAnalysis that sweeps report and cache.
struct PointMetrics {
  double W = 0, Q_h = 0, Q_c = 0;
  Regime regime_unmeasured = Regime::Other, regime_tpm = Regime::Other, regime_dbn = Regime::Other;
  double kl = 0;
  double coherence_rho1 = 0, coherence_rho3 = 0;
  double trace_distance_tpm = 0, trace_distance_dbn = 0;
  std::optional<double> eta2_tpm, eta2_dbn;
  double bound = 0;
  std::array<double, 6> moments_tpm{}, moments_dbn{};  // mean/var of w, q_h, q_c
};

PointMetrics point_metrics(const CycleAnalysis& a);
Json to_json(const PointMetrics& m);
PointMetrics point_metrics_from_json(const Json& j);

// Output names a sweep may request.
const std::vector<std::string>& known_outputs();

struct Axis {
  std::string param;
  std::vector<double> values;
};

struct SweepSpec {
  CycleConfig base;
  std::vector<Axis> axes;
  std::vector<std::string> outputs;

  // Checks names and every grid point's config; throws ConfigError.
  void validate() const;
  std::size_t size() const;
  CycleConfig config_at(const std::vector<std::size_t>& index) const;
};

// File schema: {"base": {...}, "axes": [{"param": ..., "values": [...]}], "outputs": [...]}
SweepSpec sweep_spec_from_json(const Json& j);
Json to_json(const SweepSpec& spec);

// Dotted-path override: base.<field>=x (or bare <field>=x), outputs=a,b,c,
// axes.<param>=v1,v2,... which replaces or appends that axis.
void apply_override(SweepSpec& spec, std::string_view key, std::string_view value);
void apply_override(CycleConfig& config, std::string_view key, std::string_view value);

using Cell = std::variant<std::monostate, double, std::string>;

struct SweepResult {
  std::vector<std::size_t> index;
  std::vector<double> params;
  std::vector<Cell> values;  // one per requested output, null when not reportable
  std::string status;        // "ok" or '|'-joined subset of kl-infinite, eta2-undefined; or non-converged
};

struct SweepOptions {
  int parallelism = 1;
  std::optional<std::filesystem::path> cache_dir;  // unset: no cache
};

std::vector<SweepResult> run_sweep(const SweepSpec& spec, const SweepOptions& options = {});

// Cell value of one output; status flags it may raise are added to `flags`.
Cell output_cell(const PointMetrics& m, const std::string& output, std::vector<std::string>& flags);

const std::vector<std::string>& figure_names();
// Built-in parameter presets; lambda_points and g_points set grid resolution.
SweepSpec figure_spec(const std::string& name, int lambda_points = 50, int g_points = 51);
std::vector<SweepResult> figure_data(const std::string& name, const SweepOptions& options = {}, int lambda_points = 50,
                                     int g_points = 51);

void write_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepResult>& rows);
void write_json(std::ostream& out, const SweepSpec& spec, const std::vector<SweepResult>& rows);

}  // namespace otto
