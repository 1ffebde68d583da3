#include <cmath>

#include "helpers.hpp"
#include "otto/distribution.hpp"
#include "otto/validate.hpp"

using namespace otto;
using otto::test::diag;

TEST_SUITE("qcore") {
  TEST_CASE("spin-1/2 and spin-1 matrices") {
    const auto s2 = spin_operators(2);
    CHECK(max_abs(s2.sz - diag({0.5, -0.5})) < 1e-15);
    ComplexMatrix sx2(2, 2);
    sx2 << 0, 0.5, 0.5, 0;
    CHECK(max_abs(s2.sx - sx2) < 1e-15);

    const auto s3 = spin_operators(3);
    CHECK(max_abs(s3.sz - diag({1, 0, -1})) < 1e-15);
    ComplexMatrix sx3(3, 3);
    sx3 << 0, 1, 0, 1, 0, 1, 0, 1, 0;
    CHECK(max_abs(s3.sx - sx3 / std::sqrt(2.0)) < 1e-15);
  }

  TEST_CASE("angular momentum commutator [Sz, Sx] = i Sy") {
    for (int d = 2; d <= 7; ++d) {
      const auto s = spin_operators(d);
      CHECK(max_abs(s.sz * s.sx - s.sx * s.sz - Complex(0, 1) * s.sy) < 1e-12);
      // Casimir: Sx² + Sy² + Sz² = j(j+1)
      const double j = (d - 1) / 2.0;
      const ComplexMatrix c = s.sx * s.sx + s.sy * s.sy + s.sz * s.sz;
      CHECK(max_abs(c - j * (j + 1) * ComplexMatrix::Identity(d, d)) < 1e-12);
    }
    CHECK_THROWS_AS(spin_operators(1), Error);
  }

  TEST_CASE("eig_hermitian groups degenerate eigenvalues") {
    const auto id = eig_hermitian(ComplexMatrix::Identity(3, 3), 1e-8);
    REQUIRE(id.size() == 1);
    CHECK(id.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(max_abs(id.projectors[0] - ComplexMatrix::Identity(3, 3)) < 1e-12);

    const auto sz = eig_hermitian(spin_operators(3).sz, 1e-8);
    REQUIRE(sz.size() == 3);
    CHECK(sz.eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(sz.eigenvalues[1] == doctest::Approx(0.0));
    CHECK(sz.eigenvalues[2] == doctest::Approx(1.0));
    CHECK(max_abs(sz.projectors[0] - diag({0, 0, 1})) < 1e-12);
    CHECK(max_abs(sz.projectors[2] - diag({1, 0, 0})) < 1e-12);
  }

  TEST_CASE("eig_hermitian reconstructs random operators") {
    std::mt19937_64 rng(11);
    for (int d = 2; d <= 6; ++d) {
      const ComplexMatrix h = random_hermitian(rng, d);
      const auto dec = eig_hermitian(h);
      CHECK(max_abs(dec.reconstruct() - h) < 1e-10);
      ComplexMatrix sum = ComplexMatrix::Zero(d, d);
      for (const auto& p : dec.projectors) sum += p;
      CHECK(max_abs(sum - ComplexMatrix::Identity(d, d)) < 1e-10);
      for (std::size_t a = 1; a < dec.size(); ++a) CHECK(dec.eigenvalues[a] - dec.eigenvalues[a - 1] > dec.grouping_tol);
    }
  }

  TEST_CASE("eig_hermitian builds a rank-2 projector for a doubled eigenvalue") {
    std::mt19937_64 rng(3);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(random_hermitian(rng, 4));
    Eigen::VectorXd e(4);
    e << -1.0, 0.5, 0.5, 2.0;
    const ComplexMatrix h = es.eigenvectors() * e.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    const auto dec = eig_hermitian(h);
    REQUIRE(dec.size() == 3);
    CHECK(dec.projectors[1].trace().real() == doctest::Approx(2.0));
    CHECK(max_abs(dec.projectors[1] * dec.projectors[1] - dec.projectors[1]) < 1e-10);
  }

  TEST_CASE("eig_hermitian rejects non-Hermitian input") {
    ComplexMatrix m(2, 2);
    m << 0, 1, 0, 0;
    CHECK_THROWS_AS(eig_hermitian(m), Error);
  }

  TEST_CASE("density matrix validation") {
    CHECK_THROWS_AS(DensityMatrix::from_matrix(diag({0.6, 0.6})), Error);
    CHECK_THROWS_AS(DensityMatrix::from_matrix(diag({1.5, -0.5})), Error);
    ComplexMatrix nh(2, 2);
    nh << 0.5, 0.1, 0.0, 0.5;
    CHECK_THROWS_AS(DensityMatrix::from_matrix(nh), Error);
    CHECK_NOTHROW(DensityMatrix::from_matrix(diag({0.25, 0.75})));
  }

  TEST_CASE("dephasing") {
    const auto basis = eig_hermitian(spin_operators(2).sz);
    const auto rho = DensityMatrix::from_matrix(diag({0.3, 0.7}));
    CHECK(max_abs(dephase(rho, basis).matrix() - rho.matrix()) < 1e-15);

    ComplexMatrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(max_abs(dephase(DensityMatrix::from_matrix(plus), basis).matrix() - diag({0.5, 0.5})) < 1e-15);

    std::mt19937_64 rng(5);
    for (int d = 2; d <= 5; ++d) {
      const auto r = random_state(rng, d);
      const auto b = eig_hermitian(random_hermitian(rng, d));
      const auto once = dephase(r, b);
      CHECK(std::abs(once.matrix().trace().real() - 1.0) < 1e-12);
      CHECK(otto::test::min_eig(once.matrix()) > -1e-12);
      CHECK(max_abs(dephase(once, b).matrix() - once.matrix()) < 1e-12);
    }
    CHECK_THROWS_AS(dephase(DensityMatrix::maximally_mixed(3), basis), Error);
  }

  TEST_CASE("trace distance") {
    const auto up = DensityMatrix::from_matrix(diag({1, 0}));
    const auto down = DensityMatrix::from_matrix(diag({0, 1}));
    CHECK(trace_distance(up, up) == 0.0);
    CHECK(trace_distance(up, down) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(trace_distance(DensityMatrix::maximally_mixed(2), up) == doctest::Approx(0.5).epsilon(1e-14));

    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
      const int d = 2 + t % 4;
      const auto a = random_state(rng, d), b = random_state(rng, d), c = random_state(rng, d);
      CHECK(trace_distance(a, b) == trace_distance(b, a));
      CHECK(trace_distance(a, b) <= trace_distance(a, c) + trace_distance(c, b) + 1e-12);
    }
  }

  TEST_CASE("relative entropy of coherence") {
    const auto basis = eig_hermitian(spin_operators(2).sz);
    CHECK(rel_entropy_coherence(DensityMatrix::from_matrix(diag({0.2, 0.8})), basis) == doctest::Approx(0.0));
    ComplexMatrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK(rel_entropy_coherence(DensityMatrix::from_matrix(plus), basis) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    // Second route: Shannon entropy of the diagonal minus the spectral entropy.
    std::mt19937_64 rng(21);
    for (int d = 2; d <= 5; ++d) {
      const auto rho = random_state(rng, d);
      const auto b = eig_hermitian(spin_operators(d).sz);
      std::vector<double> pops;
      for (int i = 0; i < d; ++i) pops.push_back(rho.matrix()(i, i).real());
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
      std::vector<double> spec(es.eigenvalues().data(), es.eigenvalues().data() + d);
      CHECK(std::abs(rel_entropy_coherence(rho, b) - (shannon_entropy(pops) - shannon_entropy(spec))) < 1e-10);
      CHECK(std::abs(rel_entropy_coherence(rho, eig_hermitian(rho.matrix()))) < 1e-10);
    }
  }

  TEST_CASE("von Neumann entropy treats zero eigenvalues as 0 ln 0") {
    CHECK(von_neumann_entropy(DensityMatrix::from_matrix(diag({1, 0, 0}))) == 0.0);
    CHECK(von_neumann_entropy(DensityMatrix::maximally_mixed(4)) == doctest::Approx(std::log(4.0)));
  }
}

TEST_SUITE("distribution") {
  TEST_CASE("moments") {
    const auto one = DiscreteDistribution::from_samples({{5.0, 1.0}});
    CHECK(moments(one).mean == 5.0);
    CHECK(moments(one).variance == 0.0);
    const auto pm = DiscreteDistribution::from_samples({{-1.0, 0.5}, {1.0, 0.5}});
    CHECK(moments(pm).mean == doctest::Approx(0.0));
    CHECK(moments(pm).variance == doctest::Approx(1.0));

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-3, 3);
    std::vector<Atom> atoms;
    double total = 0;
    for (int i = 0; i < 12; ++i) atoms.push_back({u(rng), u(rng) + 3.0}), total += atoms.back().probability;
    double m1 = 0, m2 = 0;
    for (auto& a : atoms) {
      a.probability /= total;
      m1 += a.value * a.probability;
      m2 += a.value * a.value * a.probability;
    }
    const auto m = moments(DiscreteDistribution::from_samples(atoms));
    CHECK(m.variance >= 0.0);
    CHECK(std::abs(m.variance - (m2 - m1 * m1)) < 1e-10);
  }

  TEST_CASE("merge within tolerance") {
    const double tol = 1e-9;
    const auto d = DiscreteDistribution::from_samples({{1.0, 0.25}, {1.0 + tol / 2, 0.25}, {2.0, 0.5}}, tol);
    REQUIRE(d.size() == 2);
    CHECK(d.atoms()[0].probability == doctest::Approx(0.5));
    CHECK(std::abs(d.atoms()[0].value - 1.0) < tol);
    CHECK(d.atoms()[1].value == 2.0);
  }

  TEST_CASE("KL divergence") {
    const auto p = DiscreteDistribution::from_samples({{0.0, 1.0}});
    const auto q = DiscreteDistribution::from_samples({{0.0, 0.5}, {1.0, 0.5}});
    CHECK(kl_divergence(p, p) == 0.0);
    CHECK(kl_divergence(p, q) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(is_kl_infinite(kl_divergence(q, p)));
    const auto zero_mass = DiscreteDistribution::from_samples({{0.0, 1.0}, {3.0, 0.0}});
    CHECK(kl_divergence(zero_mass, p) == 0.0);
    CHECK_THROWS_AS(kl_divergence(DiscreteDistribution::from_samples({{0.0, 0.9}}), p), Error);
  }
}
