#include "otto/validate.hpp"

#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "otto/oracle.hpp"
#include "otto/parallel.hpp"
#include "otto/sweep.hpp"

namespace otto {

CycleConfig random_config(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> dim(2, 4);
  CycleConfig c;
  c.d = d > 0 ? d : dim(rng);
  c.omega_c = 0.3 + 1.2 * u(rng);
  c.omega_h = c.omega_c + 0.1 + 9.9 * u(rng);
  c.T_h = 0.5 + 14.5 * u(rng);
  c.T_c = 0.1 + (c.T_h - 0.1) * 0.95 * u(rng);
  c.g = u(rng) < 0.1 ? 0.0 : 10.0 * u(rng);
  c.lambda_h = c.lambda_c = u(rng) < 0.1 ? 1.0 : 0.01 + 0.99 * u(rng);
  return c;
}

ComplexMatrix random_hermitian(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  return (a + a.adjoint()) / 2.0;
}

DensityMatrix random_state(std::mt19937_64& rng, int d) {
  std::normal_distribution<double> n(0.0, 1.0);
  ComplexMatrix a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = Complex(n(rng), n(rng));
  ComplexMatrix rho = a * a.adjoint();
  return DensityMatrix::from_matrix(rho / rho.trace().real());
}

namespace {

class Ledger {
 public:
  InvariantResult& add(const std::string& name, double threshold) {
    results_.push_back({name, true, 0.0, threshold, ""});
    return results_.back();
  }
  std::vector<InvariantResult> take() { return {results_.begin(), results_.end()}; }

 private:
  std::deque<InvariantResult> results_;  // stable references across add()
};

void observe(InvariantResult& r, double v) {
  if (std::isnan(v)) v = std::numeric_limits<double>::infinity();
  r.worst = std::max(r.worst, v);
  if (!(r.worst < r.threshold)) r.passed = false;
}

double min_eigenvalue(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// ---- qcore ------------------------------------------------------------------

void qcore_suite(std::mt19937_64& rng, Ledger& ledger) {
  auto& deph = ledger.add("qcore.dephase_cptp_idempotent", 1e-12);
  auto& metric = ledger.add("qcore.trace_distance_metric", 1e-12);
  auto& own = ledger.add("qcore.coherence_own_basis", 1e-10);
  auto& eig = ledger.add("qcore.eig_reconstruction", 1e-10);
  auto& kl = ledger.add("qcore.kl_nonnegative", 1e-12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const int d = 2 + t % 3;
    const auto rho = random_state(rng, d);
    const auto sigma = random_state(rng, d);
    const auto tau = random_state(rng, d);
    const auto basis = eig_hermitian(random_hermitian(rng, d));

    const ComplexMatrix once = dephase_matrix(rho.matrix(), basis);
    observe(deph, std::abs(once.trace().real() - 1.0));
    observe(deph, std::max(0.0, -min_eigenvalue(once)));
    observe(deph, max_abs(dephase_matrix(once, basis) - once));

    const double ab = trace_distance(rho, sigma), ba = trace_distance(sigma, rho);
    observe(metric, ab == ba ? 0.0 : 1.0);
    observe(metric, std::max(0.0, ab - trace_distance(rho, tau) - trace_distance(tau, sigma)));

    observe(own, std::abs(rel_entropy_coherence(rho, eig_hermitian(rho.matrix()))));

    // Generic spectrum and one with a forced double degeneracy.
    for (int variant = 0; variant < 2; ++variant) {
      ComplexMatrix h = random_hermitian(rng, d);
      if (variant == 1) {
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
        Eigen::VectorXd e = es.eigenvalues();
        e(1) = e(0);
        h = es.eigenvectors() * e.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
      }
      const auto dec = eig_hermitian(h);
      observe(eig, max_abs(dec.reconstruct() - h));
      ComplexMatrix sum = ComplexMatrix::Zero(d, d);
      for (std::size_t a = 0; a < dec.size(); ++a) {
        const auto& p = dec.projectors[a];
        sum += p;
        observe(eig, max_abs(p * p - p));
        for (std::size_t b = a + 1; b < dec.size(); ++b) observe(eig, max_abs(p * dec.projectors[b]));
      }
      observe(eig, max_abs(sum - ComplexMatrix::Identity(d, d)));
      if (variant == 1 && dec.size() != static_cast<std::size_t>(d - 1)) observe(eig, 1.0);
    }

    std::vector<Atom> ps, qs;
    double tp = 0, tq = 0;
    for (int k = 0; k < 5; ++k) {
      ps.push_back({static_cast<double>(k), u(rng) + 0.01});
      qs.push_back({static_cast<double>(k), u(rng) + 0.01});
      tp += ps.back().probability;
      tq += qs.back().probability;
    }
    for (auto& a : ps) a.probability /= tp;
    for (auto& a : qs) a.probability /= tq;
    const auto p = DiscreteDistribution::from_samples(ps), q = DiscreteDistribution::from_samples(qs);
    observe(kl, std::max(0.0, -kl_divergence(p, q)));
    observe(kl, std::abs(kl_divergence(p, p)));
  }
}

// ---- engine channel and propagator ------------------------------------------

void channel_suite(std::mt19937_64& rng, Ledger& ledger) {
  auto& cptp = ledger.add("engine.gad_cptp", 1e-10);
  auto& commute = ledger.add("engine.gad_commutes_with_dephasing", 1e-10);
  auto& law = ledger.add("engine.gad_offdiagonal_law", 1e-10);
  law.detail = "factor sqrt(1-lambda) at d=2; s^2 + s(1-s)(p_a+p_b) for d>2";
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 30; ++t) {
    const int d = 2 + t % 3;
    const double lambda = u(rng);
    const auto basis = eig_hermitian(spin_operators(d).sz);
    std::vector<double> p(d);
    double total = 0;
    for (auto& x : p) total += (x = u(rng) + 0.01);
    ComplexMatrix sig = ComplexMatrix::Zero(d, d);
    for (int a = 0; a < d; ++a) sig += (p[a] / total) * basis.projectors[a];
    const GadChannel channel(lambda, DensityMatrix::from_matrix(sig), basis);
    const auto rho = random_state(rng, d);
    const ComplexMatrix out = channel.apply(rho.matrix());
    observe(cptp, std::abs(out.trace().real() - 1.0));
    observe(cptp, max_abs(out - out.adjoint()));
    observe(cptp, std::max(0.0, -min_eigenvalue(out)));
    observe(commute, max_abs(dephase_matrix(out, basis) - channel.apply(dephase_matrix(rho.matrix(), basis))));

    const double s = std::sqrt(1.0 - lambda);
    const auto& pop = channel.populations();
    // Projector a is the a-th lowest level, i.e. matrix index d-1-a.
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) {
        if (a == b) continue;
        const int i = d - 1 - a, j = d - 1 - b;
        const double factor = s * s + s * (1.0 - s) * (pop[a] + pop[b]);
        observe(law, std::abs(out(i, j) - factor * rho.matrix()(i, j)));
        if (d == 2) observe(law, std::abs(out(i, j) - s * rho.matrix()(i, j)));
      }
  }
}

void propagator_suite(std::mt19937_64& rng, Ledger& ledger) {
  auto& order = ledger.add("engine.propagator_order", 1.0);
  order.detail = "exponent must lie in [1.7, 2.3]; unitarity defect < 1e-10";
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::ostringstream exps;
  for (int t = 0; t < 3; ++t) {
    const int d = 2 + t;
    const DrivingProtocol p{0.3 + u(rng), 2.0 + 8.0 * u(rng), 0.5 + 9.5 * u(rng), 0.5 + u(rng)};
    const int n = 64;
    auto err = [&](int k) { return max_abs(midpoint_unitary(p, d, k) - midpoint_unitary(p, d, 8 * k)); };
    const double exponent = std::log2(err(n) / err(2 * n));
    exps << (t ? ", " : "exponents ") << exponent;
    observe(order, (exponent >= 1.7 && exponent <= 2.3) ? 0.0 : 1.0);
    const auto conv = spin_propagator(p, d, 256, 1e-11);
    observe(order, max_abs(conv.unitary.adjoint() * conv.unitary - ComplexMatrix::Identity(d, d)) < 1e-10 ? 0.0 : 1.0);
  }
  order.detail += "; " + exps.str();
}

// ---- per-config physics -----------------------------------------------------

enum class Family { Random, ZeroDrive, FullThermalization, Qubit };

struct Probe {
  CycleConfig config;
  Family family;
  unsigned state_seed;
};

struct ProbeOutcome {
  bool failed = false;
  std::string failure;
  std::map<std::string, double> v;
};

ProbeOutcome evaluate_probe(const Probe& probe, FaultInjection fault) {
  ProbeOutcome out;
  try {
    const auto& c = probe.config;
    const auto ops = build_cycle(c);
    const auto cs = limit_cycle(ops, c);
    const auto thermo = unmeasured_thermo(cs, ops);

    std::mt19937_64 rng(probe.state_seed);
    const auto other = limit_cycle(ops, c, random_state(rng, c.d));
    out.v["multistart"] = trace_distance(other.rho1, cs.rho1) / (10.0 * c.fixed_point_tol);

    double norm = 0.0, closed = 0.0;
    std::map<Scheme, SchemeReport> reports;
    std::map<Scheme, SchemeDistributions> dists;
    std::map<Scheme, OutcomeJoint> joints;
    for (auto s : {Scheme::TPM, Scheme::DBN}) {
      joints[s] = outcome_joint(s, cs, ops);
      const auto mg = marginals(joints[s]);
      norm = std::max(norm, std::abs(joints[s].total() - 1.0));
      double pw = 0.0;
      for (double p : mg.p_w) pw += p;
      norm = std::max({norm, std::abs(pw - 1.0), std::abs(mg.p_qh.sum() - 1.0), std::abs(mg.p_qc.sum() - 1.0)});
      dists[s] = scheme_distributions(mg, c.merge_tol);
      for (const auto* d : {&dists[s].work, &dists[s].heat_h, &dists[s].heat_c})
        norm = std::max(norm, std::abs(d->total() - 1.0));
      reports[s] = closed_form_report(s, cs, ops, dists[s], fault);
      closed = std::max(closed, reports[s].max_closed_form_gap());
    }
    const auto& dbn = reports[Scheme::DBN];
    const auto& tpm = reports[Scheme::TPM];
    out.v["normalization"] = norm;
    out.v["closed_form"] = closed;
    out.v["dbn_means"] = std::max({std::abs(dbn.mean_w - thermo.W), std::abs(dbn.mean_qh - thermo.Q_h),
                                   std::abs(dbn.mean_qc - thermo.Q_c)});
    out.v["tpm_first_law"] = std::abs((tpm.mean_w - tpm.mean_qh - tpm.mean_qc) - tpm.first_law_residual);

    const double td_dbn = trace_distance(avg_post_measurement_state(Scheme::DBN, cs, ops), cs.rho1);
    const auto avg_tpm = avg_post_measurement_state(Scheme::TPM, cs, ops, fault);
    const double td_tpm = trace_distance(avg_tpm, cs.rho1);
    const auto eq = check_equivalence_conditions(ops);
    out.v["backaction"] = std::max(td_dbn, eq.satisfied ? td_tpm : 0.0);

    if (probe.family == Family::ZeroDrive || probe.family == Family::FullThermalization)
      out.v["equivalence_kl"] = kl_divergence(dists[Scheme::DBN].work, dists[Scheme::TPM].work);
    if (probe.family == Family::ZeroDrive) {
      double off = 0.0;
      for (int k = 1; k <= 4; ++k) {
        const auto& m = cs[k].matrix();
        off = std::max(off, max_abs(m - ComplexMatrix(m.diagonal().asDiagonal())));
      }
      out.v["g0_diagonal"] = off;
    }
    if (c.d == 2) {
      const auto oracle =
          qubit_history_oracle(c, cs.rho1.matrix(), Eigen::Matrix2cd(ops.U_k), Eigen::Matrix2cd(ops.U_e));
      double gap = 0.0;
      for (int h = 0; h < 32; ++h) {
        gap = std::max(gap, std::abs(joints[Scheme::TPM].probabilities[h] - oracle.tpm[h]));
        gap = std::max(gap, std::abs(joints[Scheme::DBN].probabilities[h] - oracle.dbn[h]));
      }
      out.v["oracle"] = gap;
      out.v["oracle_average"] = max_abs(avg_tpm.matrix() - ComplexMatrix(oracle.tpm_average));
    }
  } catch (const Error& e) {
    out.failed = true;
    out.failure = e.what();
  }
  return out;
}

struct PhysicsCheck {
  const char* name;
  const char* key;
  double threshold;
};

const PhysicsCheck kPhysics[] = {
    {"engine.limit_cycle_multistart", "multistart", 1.0},
    {"engine.g0_corners_diagonal", "g0_diagonal", 1e-10},
    {"measurement.normalization", "normalization", 1e-10},
    {"measurement.dbn_exact_means", "dbn_means", 1e-9},
    {"measurement.closed_form_agreement", "closed_form", 1e-8},
    {"measurement.tpm_first_law", "tpm_first_law", 1e-8},
    {"measurement.scheme_equivalence_kl", "equivalence_kl", 1e-10},
    {"measurement.backaction", "backaction", 1e-10},
    {"measurement.history_oracle_d2", "oracle", 1e-10},
    {"measurement.history_oracle_average_d2", "oracle_average", 1e-9},
};

void physics_suite(std::mt19937_64& rng, const ValidateOptions& options, Ledger& ledger) {
  std::vector<Probe> probes;
  for (int i = 0; i < options.random_configs; ++i) probes.push_back({random_config(rng), Family::Random, 0});
  for (int d = 2; d <= 4; ++d) {
    auto c = random_config(rng, d);
    c.g = 0.0;
    probes.push_back({c, Family::ZeroDrive, 0});
    c = random_config(rng, d);
    c.lambda_h = c.lambda_c = 1.0;
    probes.push_back({c, Family::FullThermalization, 0});
  }
  for (int i = 0; i < 4; ++i) probes.push_back({random_config(rng, 2), Family::Qubit, 0});
  for (auto& p : probes) p.state_seed = static_cast<unsigned>(rng());

  std::vector<ProbeOutcome> outcomes(probes.size());
  parallel_for(probes.size(), options.parallelism,
               [&](std::size_t i) { outcomes[i] = evaluate_probe(probes[i], options.fault); });

  auto& errors = ledger.add("measurement.pipeline_runs", 1.0);
  for (const auto& check : kPhysics) {
    auto& r = ledger.add(check.name, check.threshold);
    std::size_t used = 0;
    for (const auto& o : outcomes) {
      const auto it = o.v.find(check.key);
      if (it == o.v.end()) continue;
      ++used;
      observe(r, it->second);
    }
    r.detail = std::to_string(used) + " configs";
    if (used == 0) {
      r.passed = false;
      r.detail = "no configs evaluated";
    }
  }
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (!outcomes[i].failed) continue;
    errors.passed = false;
    errors.worst += 1.0;
    errors.detail = "config " + std::to_string(i) + ": " + outcomes[i].failure;
  }
  errors.threshold = 1.0;
  if (errors.detail.empty()) errors.detail = std::to_string(outcomes.size()) + " configs";
}

void determinism_suite(const ValidateOptions& options, Ledger& ledger) {
  auto& r = ledger.add("sweep.determinism", 1.0);
  SweepSpec spec;
  spec.base.d = 2;
  spec.axes = {{"lambda", {0.25, 0.5, 1.0}}, {"g", {0.0, 3.0}}};
  spec.outputs = {"kl", "trace_distance_tpm", "eta2_tpm", "regime_tpm"};
  std::ostringstream a, b;
  write_csv(a, spec, run_sweep(spec, {1, std::nullopt}));
  write_csv(b, spec, run_sweep(spec, {std::max(2, options.parallelism), std::nullopt}));
  observe(r, a.str() == b.str() ? 0.0 : 1.0);
  r.detail = "parallelism 1 vs " + std::to_string(std::max(2, options.parallelism));
}

}  // namespace

std::vector<InvariantResult> run_validation(const ValidateOptions& options) {
  std::mt19937_64 rng(options.seed);
  Ledger ledger;
  qcore_suite(rng, ledger);
  channel_suite(rng, ledger);
  propagator_suite(rng, ledger);
  physics_suite(rng, options, ledger);
  determinism_suite(options, ledger);
  return ledger.take();
}

}  // namespace otto
