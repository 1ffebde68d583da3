#include <cmath>
#include <set>

#include "helpers.hpp"
#include "otto/measurement.hpp"
#include "otto/oracle.hpp"
#include "otto/validate.hpp"

using namespace otto;

namespace {

struct Cycle {
  CycleConfig config;
  CycleOperators ops;
  Corners corners;
};

Cycle solve(const CycleConfig& c) {
  auto ops = build_cycle(c);
  auto corners = limit_cycle(ops, c);
  return {c, std::move(ops), std::move(corners)};
}

CycleConfig preset(int d, double lambda, double g) {
  CycleConfig c;
  c.d = d;
  c.lambda_h = c.lambda_c = lambda;
  c.g = g;
  return c;
}

double max_entry_gap(const OutcomeJoint& a, const OutcomeJoint& b) {
  double gap = 0;
  for (std::size_t i = 0; i < a.probabilities.size(); ++i)
    gap = std::max(gap, std::abs(a.probabilities[i] - b.probabilities[i]));
  return gap;
}

// Work marginal from the projector chain with the last bath and measurement
// dropped, written out directly.
double pw_chain(const Cycle& cy, int j, int l, int m, int n) {
  const auto& pe = cy.ops.H_e_end.projectors;
  const auto& pk = cy.ops.H_k_end.projectors;
  const ComplexMatrix& uk = cy.ops.U_k;
  const ComplexMatrix& ue = cy.ops.U_e;
  ComplexMatrix x = pe[j] * cy.corners.rho1.matrix() * pe[j];
  x = pk[l] * uk * x * uk.adjoint() * pk[l];
  x = pk[m] * cy.ops.hot.apply(x) * pk[m];
  x = pe[n] * ue * x * ue.adjoint() * pe[n];
  return x.trace().real();
}

}  // namespace

TEST_SUITE("measurement") {
  TEST_CASE("joints are normalized and marginals consistent") {
    std::mt19937_64 rng(31);
    for (int t = 0; t < 6; ++t) {
      const auto cy = solve(random_config(rng));
      for (Scheme s : {Scheme::TPM, Scheme::DBN}) {
        const auto joint = outcome_joint(s, cy.corners, cy.ops);
        CHECK(std::abs(joint.total() - 1.0) < 1e-10);
        for (double p : joint.probabilities) CHECK(p >= 0.0);
        const auto m = marginals(joint);
        double pw = 0;
        for (double p : m.p_w) pw += p;
        CHECK(std::abs(pw - 1.0) < 1e-10);
        CHECK(std::abs(m.p_qh.sum() - 1.0) < 1e-10);
        CHECK(std::abs(m.p_qc.sum() - 1.0) < 1e-10);
        // Σ_{j,l} p_w and Σ_l p_qh both give the distribution of m.
        const int d = cy.config.d;
        for (int mm = 0; mm < m.w_dims[2]; ++mm) {
          double a = 0;
          for (int j = 0; j < d; ++j)
            for (int l = 0; l < m.w_dims[1]; ++l)
              for (int n = 0; n < m.w_dims[3]; ++n) a += m.w_at(j, l, mm, n);
          CHECK(std::abs(a - m.p_qh.col(mm).sum()) < 1e-12);
        }
        const auto dists = scheme_distributions(m, cy.config.merge_tol);
        CHECK(std::abs(dists.work.total() - 1.0) < 1e-10);
        CHECK(std::abs(dists.heat_h.total() - 1.0) < 1e-10);
        CHECK(std::abs(dists.heat_c.total() - 1.0) < 1e-10);
      }
    }
  }

  TEST_CASE("TPM and DBN coincide at g = 0 and at full thermalization") {
    for (int d = 2; d <= 4; ++d) {
      const auto g0 = solve(preset(d, 0.4, 0.0));
      CHECK(max_entry_gap(tpm_joint(g0.corners, g0.ops), dbn_joint(g0.corners, g0.ops)) < 1e-10);
      const auto full = solve(preset(d, 1.0, 9.0));
      CHECK(max_entry_gap(tpm_joint(full.corners, full.ops), dbn_joint(full.corners, full.ops)) < 1e-10);
    }
  }

  TEST_CASE("d = 2 joints match the history oracle") {
    std::mt19937_64 rng(32);
    for (int t = 0; t < 5; ++t) {
      const auto cy = solve(random_config(rng, 2));
      const auto oracle = qubit_history_oracle(cy.config, cy.corners.rho1.matrix(), Eigen::Matrix2cd(cy.ops.U_k),
                                               Eigen::Matrix2cd(cy.ops.U_e));
      const auto tpm = tpm_joint(cy.corners, cy.ops);
      const auto dbn = dbn_joint(cy.corners, cy.ops);
      REQUIRE(tpm.probabilities.size() == 32);
      for (int h = 0; h < 32; ++h) {
        CHECK(std::abs(tpm.probabilities[h] - oracle.tpm[h]) < 1e-10);
        CHECK(std::abs(dbn.probabilities[h] - oracle.dbn[h]) < 1e-10);
      }
      const auto avg = avg_post_measurement_state(Scheme::TPM, cy.corners, cy.ops);
      CHECK(max_abs(avg.matrix() - ComplexMatrix(oracle.tpm_average)) < 1e-9);
    }
  }

  TEST_CASE("work marginal matches the truncated projector chain") {
    for (int d : {2, 3}) {
      const auto cy = solve(preset(d, 0.3, 9.0));
      const auto m = marginals(tpm_joint(cy.corners, cy.ops));
      for (int j = 0; j < d; ++j)
        for (int l = 0; l < d; ++l)
          for (int mm = 0; mm < d; ++mm)
            for (int n = 0; n < d; ++n) CHECK(std::abs(m.w_at(j, l, mm, n) - pw_chain(cy, j, l, mm, n)) < 1e-12);
    }
  }

  TEST_CASE("value distribution supports") {
    const auto cy = solve(preset(2, 0.5, 9.0));
    const auto m = marginals(tpm_joint(cy.corners, cy.ops));
    const auto work = value_distribution(Quantity::Work, m, 1e-9);
    // Level energies ±ω/2: every combination of four spacings.
    std::set<long long> allowed;
    const double ek[2] = {-5.0, 5.0}, ee[2] = {-0.25, 0.25};
    for (double j : ee)
      for (double l : ek)
        for (double mm : ek)
          for (double n : ee) allowed.insert(std::llround(1e6 * (j - l + mm - n)));
    for (const auto& a : work.atoms()) CHECK(allowed.count(std::llround(1e6 * a.value)) == 1);

    // Diagonal (l = m) heat histories land on q_h = 0.
    const auto heat = value_distribution(Quantity::HeatHot, m, 1e-9);
    double at_zero = 0;
    for (const auto& a : heat.atoms())
      if (std::abs(a.value) < 1e-12) at_zero = a.probability;
    CHECK(std::abs(at_zero - m.p_qh.diagonal().sum()) < 1e-14);
  }

  TEST_CASE("DBN means equal the unmeasured values") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 6; ++t) {
      const auto cy = solve(random_config(rng));
      const auto th = unmeasured_thermo(cy.corners, cy.ops);
      const auto r = closed_form_report(Scheme::DBN, cy.corners, cy.ops, cy.config.merge_tol);
      CHECK(std::abs(r.mean_w - th.W) < 1e-9);
      CHECK(std::abs(r.mean_qh - th.Q_h) < 1e-9);
      CHECK(std::abs(r.mean_qc - th.Q_c) < 1e-9);
      CHECK(std::abs(r.closed_form_mean_w - th.W) < 1e-10);
      CHECK(std::abs(r.first_law_residual) < 1e-10);
    }
  }

  TEST_CASE("closed forms agree with the distributions") {
    std::mt19937_64 rng(34);
    for (int t = 0; t < 6; ++t) {
      const auto cy = solve(random_config(rng));
      for (Scheme s : {Scheme::TPM, Scheme::DBN}) {
        const auto r = closed_form_report(s, cy.corners, cy.ops, cy.config.merge_tol);
        CHECK(r.max_closed_form_gap() < 1e-8);
        CHECK(std::abs((r.mean_w - r.mean_qh - r.mean_qc) - r.first_law_residual) < 1e-8);
      }
    }
  }

  TEST_CASE("TPM mean work equals W at g = 0") {
    const auto cy = solve(preset(3, 0.3, 0.0));
    const auto r = closed_form_report(Scheme::TPM, cy.corners, cy.ops, cy.config.merge_tol);
    CHECK(std::abs(r.closed_form_mean_w - unmeasured_thermo(cy.corners, cy.ops).W) < 1e-10);
  }

  TEST_CASE("expanded TPM work variance is reported separately") {
    const auto cy = solve(preset(3, 0.5, 9.0));
    const auto r = closed_form_report(Scheme::TPM, cy.corners, cy.ops, cy.config.merge_tol);
    CHECK(std::abs(r.closed_form_var_w - r.var_w) < 1e-8);
    CHECK(r.expanded_var_w_mismatch() > 1.0);
    const auto dbn = closed_form_report(Scheme::DBN, cy.corners, cy.ops, cy.config.merge_tol);
    CHECK(dbn.expanded_var_w_mismatch() < 1e-8);
  }

  TEST_CASE("fault hook breaks the TPM closed forms") {
    const auto cy = solve(preset(3, 0.5, 9.0));
    const auto r = closed_form_report(Scheme::TPM, cy.corners, cy.ops, cy.config.merge_tol,
                                      FaultInjection::SkipInitialDephasing);
    CHECK(r.max_closed_form_gap() > 1e-6);
  }

  TEST_CASE("measurement backaction") {
    const auto coherent = solve(preset(3, 0.2, 9.0));
    CHECK(trace_distance(avg_post_measurement_state(Scheme::DBN, coherent.corners, coherent.ops),
                         coherent.corners.rho1) < 1e-10);
    CHECK(trace_distance(avg_post_measurement_state(Scheme::TPM, coherent.corners, coherent.ops),
                         coherent.corners.rho1) > 1e-3);
    const auto g0 = solve(preset(3, 0.2, 0.0));
    CHECK(trace_distance(avg_post_measurement_state(Scheme::TPM, g0.corners, g0.ops), g0.corners.rho1) < 1e-10);
  }

  TEST_CASE("equivalence conditions") {
    const auto g0 = solve(preset(3, 0.5, 0.0));
    const auto e0 = check_equivalence_conditions(g0.ops);
    CHECK(e0.satisfied);
    CHECK(e0.worst_residual < 1e-12);
    const auto g9 = solve(preset(3, 0.5, 9.0));
    const auto e9 = check_equivalence_conditions(g9.ops);
    CHECK_FALSE(e9.satisfied);
    CHECK(e9.worst_residual > 0.1);

    const auto full = solve(preset(3, 1.0, 9.0));
    CHECK_FALSE(check_equivalence_conditions(full.ops).satisfied);
    const auto m_t = marginals(tpm_joint(full.corners, full.ops));
    const auto m_d = marginals(dbn_joint(full.corners, full.ops));
    CHECK(kl_divergence(value_distribution(Quantity::Work, m_d, 1e-9), value_distribution(Quantity::Work, m_t, 1e-9)) <
          1e-10);
  }

  TEST_CASE("fluctuation ratio") {
    const auto f = fluctuation_ratio(1.0, 2.0, 1.2, 1.0);
    CHECK(f.bound == doctest::Approx(1.0 / 36.0).epsilon(1e-14));
    CHECK(*f.eta2 == doctest::Approx(0.5));
    CHECK(f.violated);
    CHECK(*fluctuation_ratio(3.0, 3.0, 2.0, 1.0).eta2 == 1.0);
    CHECK(fluctuation_ratio(1.0, 0.0, 2.0, 1.0).undefined());

    CycleConfig c = preset(3, 0.02, 0.06);
    c.omega_h = 1.0;
    c.T_h = 1.2;
    c.omega_c = 0.85;
    c.T_c = 1.0;
    const auto cy = solve(c);
    for (Scheme s : {Scheme::TPM, Scheme::DBN}) {
      const auto r = fluctuation_ratio(closed_form_report(s, cy.corners, cy.ops, c.merge_tol), c);
      CHECK(r.violated);
    }
  }
}
