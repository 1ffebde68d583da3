#include "otto/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "otto/sweep.hpp"
#include "otto/validate.hpp"

namespace otto {

namespace fs = std::filesystem;

namespace {

// Files are staged in memory and only written once every computation has
// succeeded, then moved into place.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}
  void add(const std::string& name, std::string content) { files_.emplace_back(name, std::move(content)); }

  void commit() const {
    fs::create_directories(dir_);
    for (const auto& [name, content] : files_) {
      const fs::path target = dir_ / name;
      fs::path tmp = target;
      tmp += ".partial";
      {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw Error("cannot write " + tmp.string());
        f << content;
        if (!f) throw Error("failed writing " + tmp.string());
      }
      fs::rename(tmp, target);
    }
  }

 private:
  fs::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string distribution_csv(const DiscreteDistribution& d) {
  std::string out = "value,probability\n";
  for (const auto& a : d.atoms()) out += format_double(a.value) + ',' + format_double(a.probability) + '\n';
  return out;
}

CycleConfig load_cycle_config(const std::string& path) {
  const Json j = read_json_file(path);
  if (j.is_object() && j.contains("base")) {
    for (const auto& [key, value] : j.items())
      if (key != "base" && key != "axes" && key != "outputs") throw ConfigError(key, "unknown configuration key");
    return config_from_json(j.at("base"));
  }
  return config_from_json(j);
}

std::optional<fs::path> cache_location(const fs::path& out, bool disabled) {
  if (disabled) return std::nullopt;
  if (const char* env = std::getenv("OTTO_CACHE_DIR"); env && *env) return fs::path(env);
  return out / ".otto_cache";
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& sets, const std::string& out_dir,
                 std::ostream& out) {
  CycleConfig config = load_cycle_config(config_path);
  for (const auto& s : sets) {
    const auto [key, value] = split_override(s);
    apply_override(config, key, value);
  }
  config.validate();
  const CycleAnalysis a = analyze_cycle(config);

  OutputSet files(out_dir);
  files.add("summary.json", dump_json(summary_json(a)));
  const std::pair<const char*, const SchemeDistributions*> schemes[] = {{"tpm", &a.tpm_dists}, {"dbn", &a.dbn_dists}};
  for (const auto& [tag, d] : schemes) {
    files.add(std::string("work_dist_") + tag + ".csv", distribution_csv(d->work));
    files.add(std::string("heat_h_dist_") + tag + ".csv", distribution_csv(d->heat_h));
    files.add(std::string("heat_c_dist_") + tag + ".csv", distribution_csv(d->heat_c));
  }
  files.commit();

  out << std::setprecision(10) << "W = " << a.thermo.W << "  Q_h = " << a.thermo.Q_h << "  Q_c = " << a.thermo.Q_c
      << "  (" << to_string(a.regime_unmeasured) << ")\n"
      << "<w>_TPM = " << a.tpm.mean_w << " (" << to_string(a.regime_tpm) << ")  <w>_DBN = " << a.dbn.mean_w << " ("
      << to_string(a.regime_dbn) << ")\n"
      << "KL(DBN||TPM) = " << (is_kl_infinite(a.kl) ? std::string("inf") : format_double(a.kl)) << '\n'
      << "wrote " << out_dir << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& sets, const std::string& out_dir,
              int parallelism, bool no_cache, std::ostream& out) {
  SweepSpec spec = sweep_spec_from_json(read_json_file(config_path));
  for (const auto& s : sets) {
    const auto [key, value] = split_override(s);
    apply_override(spec, key, value);
  }
  spec.validate();
  const auto rows = run_sweep(spec, {parallelism, cache_location(out_dir, no_cache)});
  std::ostringstream csv, json;
  write_csv(csv, spec, rows);
  write_json(json, spec, rows);
  OutputSet files(out_dir);
  files.add("sweep.csv", csv.str());
  files.add("sweep.json", json.str());
  files.commit();
  out << rows.size() << " grid points written to " << out_dir << '\n';
  return 0;
}

int cmd_figure(const std::string& name, const std::string& out_dir, int parallelism, int lambda_points, int g_points,
               bool no_cache, std::ostream& out) {
  const SweepSpec spec = figure_spec(name, lambda_points, g_points);
  const auto rows = run_sweep(spec, {parallelism, cache_location(out_dir, no_cache)});
  std::ostringstream csv;
  write_csv(csv, spec, rows);
  Json meta = to_json(spec);
  meta["figure"] = name;
  meta["lambda_points"] = lambda_points;
  meta["g_points"] = spec.axes.size() > 1 ? Json(g_points) : Json(nullptr);
  meta["rows"] = rows.size();
  OutputSet files(out_dir);
  files.add(name + ".csv", csv.str());
  files.add(name + ".meta.json", dump_json(meta));
  files.commit();
  out << name << ": " << rows.size() << " rows written to " << out_dir << '\n';
  return 0;
}

int cmd_validate(unsigned seed, int parallelism, int configs, const std::string& fault, std::ostream& out) {
  ValidateOptions options;
  options.seed = seed;
  options.parallelism = parallelism;
  options.random_configs = configs;
  if (fault == "skip-tpm-dephasing")
    options.fault = FaultInjection::SkipInitialDephasing;
  else if (!fault.empty())
    throw ConfigError("inject-fault", "unknown fault mode: " + fault);
  const auto results = run_validation(options);
  bool all = true;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    all = all && r.passed;
    out << (r.passed ? "PASS  " : "FAIL  ") << std::left << std::setw(static_cast<int>(width)) << r.name
        << "  worst=" << std::setw(12) << std::setprecision(3) << r.worst << " limit=" << std::setw(8) << r.threshold
        << "  " << r.detail << '\n';
  }
  out << (all ? "all invariants pass" : "invariant failures present") << " (seed " << seed << ")\n";
  return all ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum Otto engine simulator with TPM and DBN work statistics", "otto"};
  app.require_subcommand(1);

  std::string config_path, out_dir, figure_name, fault;
  std::vector<std::string> sets;
  int parallelism = 1, lambda_points = 50, g_points = 51, configs = 24;
  unsigned seed = 1;
  bool no_cache = false;

  auto* sim = app.add_subcommand("simulate", "Evaluate one cycle and write summary and distributions");
  sim->add_option("--config", config_path, "JSON config file")->required();
  sim->add_option("--set", sets, "Override key=value (repeatable)");
  sim->add_option("--out", out_dir, "Output directory")->required();

  auto* sw = app.add_subcommand("sweep", "Run a parameter grid from a sweep file");
  sw->add_option("--config", config_path, "JSON sweep file")->required();
  sw->add_option("--set", sets, "Override key=value (repeatable)");
  sw->add_option("--out", out_dir, "Output directory")->required();
  sw->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  sw->add_flag("--no-cache", no_cache, "Skip the per-point cache");

  auto* fig = app.add_subcommand("figure", "Write the data behind a figure");
  fig->add_option("name", figure_name, "Figure name")->required()->check(CLI::IsMember(figure_names()));
  fig->add_option("--out", out_dir, "Output directory")->required();
  fig->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  fig->add_option("--lambda-points", lambda_points, "Points on the lambda axis")->check(CLI::PositiveNumber);
  fig->add_option("--g-points", g_points, "Points on the g axis")->check(CLI::Range(2, 100000));
  fig->add_flag("--no-cache", no_cache, "Skip the per-point cache");

  auto* val = app.add_subcommand("validate", "Run the property suite");
  val->add_option("--seed", seed, "Random seed");
  val->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::PositiveNumber);
  val->add_option("--configs", configs, "Randomized cycle configs")->check(CLI::PositiveNumber);
  val->add_option("--inject-fault", fault, "Test hook: skip-tpm-dephasing");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*sim) return cmd_simulate(config_path, sets, out_dir, out);
    if (*sw) return cmd_sweep(config_path, sets, out_dir, parallelism, no_cache, out);
    if (*fig) return cmd_figure(figure_name, out_dir, parallelism, lambda_points, g_points, no_cache, out);
    if (*val) return cmd_validate(seed, parallelism, configs, fault, out);
  } catch (const ConfigError& e) {
    err << "error: invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace otto
