#include <cmath>

#include "helpers.hpp"
#include "otto/engine.hpp"
#include "otto/validate.hpp"

using namespace otto;
using otto::test::diag;

namespace {

ComplexMatrix expm_diag_sz(int d, double phi) {
  const auto s = spin_operators(d);
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) u(i, i) = std::exp(Complex(0, -phi * s.sz(i, i).real()));
  return u;
}

double unitarity_defect(const ComplexMatrix& u) {
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

CycleConfig small_config(int d, double lambda, double g) {
  CycleConfig c;
  c.d = d;
  c.lambda_h = c.lambda_c = lambda;
  c.g = g;
  return c;
}

}  // namespace

TEST_SUITE("engine") {
  TEST_CASE("driving protocol endpoints") {
    const DrivingProtocol p{0.5, 10.0, 9.0, 1.0};
    CHECK(p.omega(0.0) == 0.5);
    CHECK(p.omega(1.0) == 10.0);
    CHECK(std::abs(p.g(0.0)) < 1e-15);
    CHECK(std::abs(p.g(1.0)) < 1e-14);
    CHECK(p.g(0.5) == doctest::Approx(9.0));
  }

  TEST_CASE("thermalization times") {
    CycleConfig c;
    c.lambda_h = 0.5;
    c.lambda_c = 1.0;
    CHECK(c.t_hot() == doctest::Approx(std::log(2.0)));
    CHECK(std::isinf(c.t_cold()));
  }

  TEST_CASE("config validation names the field") {
    CycleConfig c;
    c.omega_c = 20.0;
    try {
      c.validate();
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK((e.field() == "omega_c" || e.field() == "omega_h"));
    }
    CycleConfig l;
    l.lambda_h = 1.5;
    CHECK_THROWS_AS(l.validate(), ConfigError);
    CycleConfig d;
    d.d = 1;
    CHECK_THROWS_AS(d.validate(), ConfigError);
  }

  TEST_CASE("g = 0 propagator is exp(-i phi Sz)") {
    for (int d = 2; d <= 4; ++d) {
      const DrivingProtocol p{0.5, 10.0, 0.0, 1.0};
      const double phi = (0.5 + 10.0) * 1.0 / 2;
      const auto s = spin_operators(d);
      const auto generic = propagator(p, s.sx, s.sz, 4, 1e-11);
      CHECK(max_abs(generic.unitary - expm_diag_sz(d, phi)) < 1e-11);
      const auto lifted = spin_propagator(p, d, 4, 1e-11);
      CHECK(max_abs(lifted.unitary - expm_diag_sz(d, phi)) < 1e-11);
    }
  }

  TEST_CASE("lifted and generic propagators agree") {
    for (int d = 2; d <= 5; ++d) {
      const DrivingProtocol p{0.7, 3.0, 2.5, 1.0};
      const auto s = spin_operators(d);
      const auto generic = propagator(p, s.sx, s.sz, 64, 1e-10);
      const auto lifted = spin_propagator(p, d, 64, 1e-10);
      CHECK(max_abs(generic.unitary - lifted.unitary) < 1e-9);
      // Exactness of the lift at a fixed step count.
      const ComplexMatrix fixed = midpoint_unitary(p, d, generic.steps);
      CHECK(max_abs(fixed - generic.unitary) < 1e-10);
    }
  }

  TEST_CASE("lift_su2 is a group homomorphism") {
    std::mt19937_64 rng(4);
    auto random_su2 = [&] {
      std::normal_distribution<double> n;
      double q[4], norm = 0;
      for (double& x : q) x = n(rng), norm += x * x;
      norm = std::sqrt(norm);
      Eigen::Matrix2cd u;
      u << Complex(q[0], q[3]) / norm, Complex(q[2], q[1]) / norm, Complex(-q[2], q[1]) / norm, Complex(q[0], -q[3]) / norm;
      return u;
    };
    for (int d = 2; d <= 5; ++d) {
      const Eigen::Matrix2cd a = random_su2(), b = random_su2();
      CHECK(max_abs(lift_su2(a * b, d) - lift_su2(a, d) * lift_su2(b, d)) < 1e-12);
      CHECK(unitarity_defect(lift_su2(a, d)) < 1e-12);
    }
  }

  TEST_CASE("propagator step doubling and unitarity") {
    const DrivingProtocol p{0.5, 10.0, 9.0, 1.0};
    const auto u = spin_propagator(p, 3, 256, 1e-11);
    CHECK(unitarity_defect(u.unitary) < 1e-10);
    CHECK(u.achieved_error < 1e-11);
    CHECK(max_abs(midpoint_unitary(p, 3, u.steps) - midpoint_unitary(p, 3, u.steps / 2)) < 1e-11);
    CHECK_THROWS_AS(spin_propagator(p, 3, 4, 1e-11, 64), ConvergenceError);
  }

  TEST_CASE("propagator error shrinks at second order") {
    const DrivingProtocol p{0.5, 10.0, 9.0, 1.0};
    const int n0 = 64;
    const ComplexMatrix ref = midpoint_unitary(p, 3, 8 * 4 * n0);
    double prev = max_abs(midpoint_unitary(p, 3, n0) - ref);
    for (int n = 2 * n0; n <= 4 * n0; n *= 2) {
      const double err = max_abs(midpoint_unitary(p, 3, n) - ref);
      const double exponent = std::log2(prev / err);
      CHECK(exponent > 1.7);
      CHECK(exponent < 2.3);
      prev = err;
    }
  }

  TEST_CASE("gibbs state") {
    const auto h = eig_hermitian(10.0 * spin_operators(2).sz);
    const auto g = gibbs_state(h, 14.0);
    // Sz = +1/2 comes first in the matrix ordering.
    CHECK(g.matrix()(0, 0).real() == doctest::Approx(1.0 / (1.0 + std::exp(10.0 / 14.0))).epsilon(1e-14));
    CHECK(g.matrix()(0, 0).real() == doctest::Approx(0.328653).epsilon(1e-6));
    CHECK(g.matrix()(1, 1).real() == doctest::Approx(0.671347).epsilon(1e-6));
    for (int d = 2; d <= 5; ++d) {
      const auto gd = gibbs_state(eig_hermitian(0.5 * spin_operators(d).sz), 0.1);
      CHECK(std::abs(gd.matrix().trace().real() - 1.0) < 1e-14);
      for (int i = 0; i < d; ++i) CHECK(gd.matrix()(i, i).real() > 0.0);
      CHECK(max_abs(gd.matrix() - ComplexMatrix(gd.matrix().diagonal().asDiagonal())) == 0.0);
    }
  }

  TEST_CASE("GAD channel examples") {
    const auto basis = eig_hermitian(spin_operators(2).sz);
    // sigma = diag(0.25, 0.75) in matrix order
    const auto sigma = DensityMatrix::from_matrix(diag({0.25, 0.75}));
    const auto rho = DensityMatrix::from_matrix(diag({1, 0}));
    CHECK(max_abs(gad_channel(rho, 0.5, sigma, basis).matrix() - diag({0.625, 0.375})) < 1e-14);

    std::mt19937_64 rng(8);
    for (int d = 2; d <= 4; ++d) {
      const auto b = eig_hermitian(spin_operators(d).sz);
      const auto s = gibbs_state(eig_hermitian(1.3 * spin_operators(d).sz), 0.7);
      const auto r = random_state(rng, d);
      CHECK(max_abs(gad_channel(r, 0.0, s, b).matrix() - r.matrix()) < 1e-14);
      CHECK(max_abs(gad_channel(r, 1.0, s, b).matrix() - s.matrix()) < 1e-14);
    }

    ComplexMatrix off(2, 2);
    off << 0.5, Complex(0.2, -0.3), Complex(0.2, 0.3), 0.5;
    const double lam = 0.36;
    const auto out = gad_channel(DensityMatrix::from_matrix(off), lam, sigma, basis);
    CHECK(std::abs(out.matrix()(0, 1) - std::sqrt(1 - lam) * off(0, 1)) < 1e-14);

    CHECK_THROWS_AS(GadChannel(0.5, DensityMatrix::from_matrix(off), basis), Error);
  }

  TEST_CASE("GAD off-diagonal factor at d > 2") {
    // Coherence (a, b) is scaled by s^2 + s(1-s)(p_a + p_b); this reduces to
    // sqrt(1-lambda) exactly when p_a + p_b = 1.
    std::mt19937_64 rng(12);
    for (int d = 3; d <= 4; ++d) {
      const auto b = eig_hermitian(spin_operators(d).sz);
      const auto sigma = gibbs_state(eig_hermitian(2.0 * spin_operators(d).sz), 1.1);
      const auto rho = random_state(rng, d);
      const double lam = 0.4, s = std::sqrt(1 - lam);
      const auto out = gad_channel(rho, lam, sigma, b);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          if (i == j) continue;
          const double f = s * s + s * (1 - s) * (sigma.matrix()(i, i).real() + sigma.matrix()(j, j).real());
          CHECK(std::abs(out.matrix()(i, j) - f * rho.matrix()(i, j)) < 1e-12);
        }
    }
  }

  TEST_CASE("GAD is CPTP and commutes with dephasing") {
    std::mt19937_64 rng(13);
    for (int d = 2; d <= 4; ++d) {
      const auto b = eig_hermitian(spin_operators(d).sz);
      const auto sigma = gibbs_state(eig_hermitian(3.0 * spin_operators(d).sz), 0.9);
      for (double lam : {0.1, 0.5, 0.93}) {
        const GadChannel ch(lam, sigma, b);
        // Choi matrix Σ |i><j| ⊗ T(|i><j|)
        ComplexMatrix choi = ComplexMatrix::Zero(d * d, d * d);
        for (int i = 0; i < d; ++i)
          for (int j = 0; j < d; ++j) {
            ComplexMatrix e = ComplexMatrix::Zero(d, d);
            e(i, j) = 1;
            choi.block(i * d, j * d, d, d) = ch.apply(e);
          }
        CHECK(otto::test::min_eig(choi) > -1e-12);
        const auto r = random_state(rng, d);
        const ComplexMatrix out = ch.apply(r.matrix());
        CHECK(std::abs(out.trace().real() - 1.0) < 1e-12);
        CHECK(max_abs(out - out.adjoint()) < 1e-14);
        CHECK(max_abs(dephase_matrix(out, b) - ch.apply(dephase_matrix(r.matrix(), b))) < 1e-12);
      }
    }
  }

  TEST_CASE("build_cycle") {
    const auto ops = build_cycle(small_config(3, 0.5, 0.0));
    CHECK(max_abs(ops.U_k - ComplexMatrix(ops.U_k.diagonal().asDiagonal())) < 1e-12);
    CHECK(unitarity_defect(ops.U_k) < 1e-10);
    CHECK(unitarity_defect(ops.U_e) < 1e-10);
    CHECK(max_abs(ops.H_k - 10.0 * spin_operators(3).sz) == 0.0);
    CHECK(max_abs(ops.H_e - 0.5 * spin_operators(3).sz) == 0.0);
  }

  TEST_CASE("cycle map examples") {
    std::mt19937_64 rng(14);
    const auto full = build_cycle(small_config(3, 1.0, 9.0));
    const auto r = random_state(rng, 3);
    CHECK(max_abs(cycle_map(r, full).matrix() - full.gibbs_c.matrix()) < 1e-12);

    const auto idle = build_cycle(small_config(3, 0.0, 0.0));
    const auto dr = DensityMatrix::from_matrix(diag({0.2, 0.5, 0.3}));
    CHECK(max_abs(cycle_map(dr, idle).matrix() - dr.matrix()) < 1e-12);

    const auto generic = build_cycle(small_config(4, 0.3, 4.0));
    const auto out = cycle_map(random_state(rng, 4), generic);
    CHECK(std::abs(out.matrix().trace().real() - 1.0) < 1e-12);
    CHECK(otto::test::min_eig(out.matrix()) > -1e-12);
  }

  TEST_CASE("limit cycle") {
    const auto cfg1 = small_config(3, 1.0, 9.0);
    const auto ops1 = build_cycle(cfg1);
    const auto c1 = limit_cycle(ops1, cfg1);
    CHECK(max_abs(c1.rho1.matrix() - ops1.gibbs_c.matrix()) < 1e-12);

    std::mt19937_64 rng(15);
    for (double lam : {0.05, 0.5}) {
      const auto cfg = small_config(3, lam, 9.0);
      const auto ops = build_cycle(cfg);
      const auto a = limit_cycle(ops, cfg);
      const auto b = limit_cycle(ops, cfg, random_state(rng, 3));
      CHECK(trace_distance(a.rho1, b.rho1) < 10 * cfg.fixed_point_tol);
      CHECK(trace_distance(cycle_map(a.rho1, ops), a.rho1) < 10 * cfg.fixed_point_tol);
      CHECK(max_abs(a.rho2.matrix() - ops.unitary_k(a.rho1.matrix())) < 1e-14);
      CHECK(max_abs(a[5].matrix() - a[1].matrix()) == 0.0);
    }

    const auto cfg0 = small_config(3, 0.0, 0.0);
    const auto ops0 = build_cycle(cfg0);
    const auto idle = limit_cycle(ops0, cfg0, DensityMatrix::from_matrix(diag({0.2, 0.5, 0.3})));
    CHECK(idle.iterations <= 2);

    const auto cfg_u = small_config(2, 0.0, 3.0);
    CHECK_THROWS_AS(limit_cycle(build_cycle(cfg_u), cfg_u, DensityMatrix::from_matrix(diag({0.9, 0.1}))),
                    ConvergenceError);
  }

  TEST_CASE("g = 0 corners are diagonal") {
    const auto cfg = small_config(4, 0.4, 0.0);
    const auto ops = build_cycle(cfg);
    const auto c = limit_cycle(ops, cfg);
    for (int k = 1; k <= 4; ++k) {
      const ComplexMatrix& m = c[k].matrix();
      CHECK(max_abs(m - ComplexMatrix(m.diagonal().asDiagonal())) < 1e-10);
    }
  }

  TEST_CASE("unmeasured thermodynamics") {
    const auto cfg0 = small_config(3, 0.0, 2.0);
    const auto ops0 = build_cycle(cfg0);
    const auto c0 = corners_from(DensityMatrix::maximally_mixed(3), ops0);
    const auto t0 = unmeasured_thermo(c0, ops0);
    CHECK(t0.Q_h == 0.0);
    CHECK(t0.Q_c == 0.0);

    // Two-level Otto cycle at full thermalization.
    CycleConfig cfg = small_config(2, 1.0, 0.0);
    const auto ops = build_cycle(cfg);
    const auto t = unmeasured_thermo(limit_cycle(ops, cfg), ops);
    const double p_h = 1.0 / (1.0 + std::exp(cfg.omega_h / cfg.T_h));
    const double p_c = 1.0 / (1.0 + std::exp(cfg.omega_c / cfg.T_c));
    CHECK(t.W == doctest::Approx((cfg.omega_h - cfg.omega_c) * (p_h - p_c)).epsilon(1e-12));
    CHECK(t.W > 0.0);
    CHECK(std::abs(t.W - (t.Q_h + t.Q_c)) < 1e-12);
  }

  TEST_CASE("regime classification") {
    CHECK(classify_regime(1, 2, -1) == Regime::Engine);
    CHECK(classify_regime(-1, 2, -1) == Regime::Accelerator);
    CHECK(classify_regime(-1, -2, -1) == Regime::Heater);
    CHECK(classify_regime(0, 0, 0, 1e-9) == Regime::Other);
    CHECK(classify_regime(1, -2, 3) == Regime::Other);
    CHECK(to_string(Regime::Engine) == "Engine");
  }
}
