#include "otto/oracle.hpp"

#include <cmath>

namespace otto {

namespace {

using M2 = Eigen::Matrix2cd;

struct QubitBath {
  std::array<M2, 4> kraus;

  M2 operator()(const M2& x) const {
    M2 out = M2::Zero();
    for (const auto& k : kraus) out += k * x * k.adjoint();
    return out;
  }
};

// Index 0 is the upper level (+ω/2). Damping towards level 0 with weight p0
// and towards level 1 with weight p1 = 1 - p0.
QubitBath qubit_bath(double lambda, double omega, double temperature) {
  const double p0 = 1.0 / (1.0 + std::exp(omega / temperature));
  const double p1 = 1.0 - p0;
  const double a = std::sqrt(1.0 - lambda), b = std::sqrt(lambda);
  M2 down0, down1, up0, up1;
  down0 << a, 0, 0, 1;
  down1 << 0, 0, b, 0;
  up0 << 1, 0, 0, a;
  up1 << 0, b, 0, 0;
  return {{std::sqrt(p1) * down0, std::sqrt(p1) * down1, std::sqrt(p0) * up0, std::sqrt(p0) * up1}};
}

// Projector on the i-th level counted from the bottom of the spectrum.
M2 level(int i) {
  M2 p = M2::Zero();
  p(1 - i, 1 - i) = 1.0;
  return p;
}

}  // namespace

HistoryOracle qubit_history_oracle(const CycleConfig& config, const M2& rho1, const M2& U_k, const M2& U_e) {
  const QubitBath hot = qubit_bath(config.lambda_h, config.omega_h, config.T_h);
  const QubitBath cold = qubit_bath(config.lambda_c, config.omega_c, config.T_c);
  auto conj = [](const M2& u, const M2& x) { return M2(u * x * u.adjoint()); };

  HistoryOracle out;
  out.tpm_average = M2::Zero();
  for (int h = 0; h < 32; ++h) {
    const int j = (h >> 4) & 1, l = (h >> 3) & 1, m = (h >> 2) & 1, n = (h >> 1) & 1, r = h & 1;
    M2 x = level(j) * rho1 * level(j);
    x = level(l) * conj(U_k, x) * level(l);
    x = level(m) * hot(x) * level(m);
    x = level(n) * conj(U_e, x) * level(n);
    x = level(r) * cold(x) * level(r);
    out.tpm[h] = x.trace().real();
    out.tpm_average += x;
  }

  // Corner states and their eigenvectors.
  std::array<M2, 4> corner;
  corner[0] = rho1;
  corner[1] = conj(U_k, corner[0]);
  corner[2] = hot(corner[1]);
  corner[3] = conj(U_e, corner[2]);
  std::array<std::array<M2, 2>, 4> proj;
  std::array<std::array<double, 2>, 4> eig;
  for (int c = 0; c < 4; ++c) {
    Eigen::SelfAdjointEigenSolver<M2> es(corner[c]);
    for (int a = 0; a < 2; ++a) {
      const Eigen::Vector2cd v = es.eigenvectors().col(a);
      proj[c][a] = v * v.adjoint();
      eig[c][a] = es.eigenvalues()(a);
    }
  }
  auto post = [&](int c, int a) { return M2(proj[c][a] * corner[c] * proj[c][a] / eig[c][a]); };
  auto energy = [&](int c, int a, int e) { return (level(e) * post(c, a)).trace().real(); };
  auto tr = [](const M2& p, const M2& x) { return (p * x).trace().real(); };

  out.dbn.fill(0.0);
  for (int al = 0; al < 2; ++al)
    for (int be = 0; be < 2; ++be)
      for (int ga = 0; ga < 2; ++ga)
        for (int de = 0; de < 2; ++de)
          for (int ep = 0; ep < 2; ++ep) {
            if (eig[0][al] < 1e-14 || eig[1][be] < 1e-14 || eig[2][ga] < 1e-14 || eig[3][de] < 1e-14 ||
                eig[0][ep] < 1e-14)
              continue;
            const double path = eig[0][al] * tr(proj[1][be], conj(U_k, post(0, al))) *
                                tr(proj[2][ga], hot(post(1, be))) * tr(proj[3][de], conj(U_e, post(2, ga))) *
                                tr(proj[0][ep], cold(post(3, de)));
            for (int h = 0; h < 32; ++h) {
              const int j = (h >> 4) & 1, l = (h >> 3) & 1, m = (h >> 2) & 1, n = (h >> 1) & 1, r = h & 1;
              out.dbn[h] += path * energy(0, al, j) * energy(1, be, l) * energy(2, ga, m) * energy(3, de, n) *
                            energy(0, ep, r);
            }
          }
  return out;
}

}  // namespace otto
