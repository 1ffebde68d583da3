#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "otto/engine.hpp"

namespace otto {

double DrivingProtocol::g(double t) const { return g_peak * std::sin(std::numbers::pi * t / duration); }

namespace {

void check_protocol(const DrivingProtocol& p, int steps) {
  if (!(p.duration > 0.0)) throw Error("propagator: duration must be positive");
  if (steps < 2) throw Error("propagator: need at least 2 steps");
}

ComplexMatrix hermitian_exp(const ComplexMatrix& h, double dt) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const auto& v = es.eigenvectors();
  Eigen::VectorXcd phases(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * dt));
  return v * phases.asDiagonal() * v.adjoint();
}

ComplexMatrix midpoint_product(const DrivingProtocol& p, const ComplexMatrix& sx, const ComplexMatrix& sz, int n) {
  const double dt = p.duration / n;
  ComplexMatrix u = ComplexMatrix::Identity(sx.rows(), sx.cols());
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * dt;
    const ComplexMatrix h = p.omega(t) * sz + p.g(t) * sx;
    u = hermitian_exp(h, dt) * u;
  }
  return u;
}

// Spin-1/2 unitaries are kept as unit quaternions q0 I - i (q1 σx + q2 σy + q3 σz).
// One step exp(-i dt (a sz + b sx)) is (cos φ, sin φ · (b, 0, a) / r) with
// r = |(a, b)| and φ = r dt / 2.
Eigen::Matrix2cd midpoint_product_su2(const DrivingProtocol& p, int n) {
  const double dt = p.duration / n;
  double q0 = 1.0, q1 = 0.0, q2 = 0.0, q3 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = (k + 0.5) * dt;
    const double a = p.omega(t);
    const double b = p.g(t);
    const double r = std::hypot(a, b);
    if (r == 0.0) continue;
    const double phi = 0.5 * r * dt;
    const double c = std::cos(phi);
    const double s = std::sin(phi) / r;
    const double m1 = s * b;
    const double m3 = s * a;
    const double r0 = c * q0 - m1 * q1 - m3 * q3;
    const double r1 = c * q1 + q0 * m1 - m3 * q2;
    const double r2 = c * q2 + m3 * q1 - m1 * q3;
    const double r3 = c * q3 + q0 * m3 + m1 * q2;
    q0 = r0;
    q1 = r1;
    q2 = r2;
    q3 = r3;
    if ((k & 1023) == 1023) {
      const double norm = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
      q0 /= norm, q1 /= norm, q2 /= norm, q3 /= norm;
    }
  }
  const double norm = std::sqrt(q0 * q0 + q1 * q1 + q2 * q2 + q3 * q3);
  q0 /= norm, q1 /= norm, q2 /= norm, q3 /= norm;
  Eigen::Matrix2cd u;
  u << Complex(q0, -q3), Complex(-q2, -q1), Complex(q2, -q1), Complex(q0, q3);
  return u;
}

template <class Product>
auto refine(Product&& product, int steps, double tol, int max_steps) {
  auto coarse = product(steps);
  double err = 0.0;
  while (true) {
    if (steps > max_steps / 2) {
      std::ostringstream msg;
      msg << "propagator: no convergence to " << tol << " within " << max_steps << " steps (achieved " << err << ")";
      throw ConvergenceError(msg.str(), err);
    }
    steps *= 2;
    auto fine = product(steps);
    err = (fine - coarse).cwiseAbs().maxCoeff();
    if (err < tol) return std::make_tuple(fine, steps, err);
    coarse = std::move(fine);
  }
}

Complex ipow(Complex z, int k) {
  Complex r(1.0, 0.0);
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

}  // namespace

Propagator propagator(const DrivingProtocol& protocol, const ComplexMatrix& sx, const ComplexMatrix& sz, int steps,
                      double tol, int max_steps) {
  check_protocol(protocol, steps);
  if (sx.rows() != sz.rows() || sx.rows() != sx.cols() || sz.rows() != sz.cols())
    throw Error("propagator: operator dimension mismatch");
  auto [u, n, err] = refine([&](int k) { return midpoint_product(protocol, sx, sz, k); }, steps, tol, max_steps);
  return {u, n, err};
}

ComplexMatrix lift_su2(const Eigen::Matrix2cd& u, int d) {
  if (d < 2) throw Error("lift_su2: invalid dimension");
  const int n = d - 1;
  std::vector<double> fact(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
  auto binom = [&](int a, int b) { return fact[a] / (fact[b] * fact[a - b]); };

  // Basis index i holds n - i spin-up factors. Up maps to a·up + c·down,
  // down maps to b·up + dd·down.
  const Complex a = u(0, 0), b = u(0, 1), c = u(1, 0), dd = u(1, 1);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int k = 0; k <= n; ++k) {
    for (int p = 0; p <= k; ++p) {
      for (int q = 0; q <= n - k; ++q) {
        const int kp = p + q;
        const double norm = std::sqrt(fact[kp] * fact[n - kp] / (fact[k] * fact[n - k]));
        out(n - kp, n - k) +=
            norm * binom(k, p) * binom(n - k, q) * ipow(a, p) * ipow(c, k - p) * ipow(b, q) * ipow(dd, n - k - q);
      }
    }
  }
  return out;
}

ComplexMatrix midpoint_unitary(const DrivingProtocol& protocol, int d, int steps) {
  check_protocol(protocol, steps);
  return lift_su2(midpoint_product_su2(protocol, steps), d);
}

Propagator spin_propagator(const DrivingProtocol& protocol, int d, int steps, double tol, int max_steps) {
  check_protocol(protocol, steps);
  auto [u, n, err] =
      refine([&](int k) { return lift_su2(midpoint_product_su2(protocol, k), d); }, steps, tol, max_steps);
  return {u, n, err};
}

}  // namespace otto
