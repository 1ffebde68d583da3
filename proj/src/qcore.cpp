#include "otto/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace otto {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kEntropyZero = 1e-14;

ComplexMatrix hermitian_part(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

SpinOperators spin_operators(int d) {
  if (d < 2) throw Error("spin_operators: invalid dimension " + std::to_string(d) + " (need d >= 2)");
  const double j = 0.5 * (d - 1);
  SpinOperators s{ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d), ComplexMatrix::Zero(d, d)};
  ComplexMatrix raise = ComplexMatrix::Zero(d, d);
  for (int i = 0; i < d; ++i) {
    const double m = j - i;
    s.sz(i, i) = m;
    // <m+1|S+|m> sits one row above the |m> column.
    if (i > 0) raise(i - 1, i) = std::sqrt(j * (j + 1) - m * (m + 1));
  }
  const ComplexMatrix lower = raise.adjoint();
  s.sx = 0.5 * (raise + lower);
  s.sy = Complex(0, -0.5) * (raise - lower);
  return s;
}

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

DensityMatrix DensityMatrix::from_matrix(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols() || m.rows() < 2) throw Error("DensityMatrix: matrix must be square with dim >= 2");
  if (max_abs(m - m.adjoint()) > tol) throw Error("DensityMatrix: matrix is not Hermitian");
  const ComplexMatrix h = hermitian_part(m);
  if (std::abs(h.trace() - Complex(1.0)) > tol) {
    std::ostringstream msg;
    msg << "DensityMatrix: trace " << h.trace().real() << " is not 1";
    throw Error(msg.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -tol) throw Error("DensityMatrix: matrix is not positive semidefinite");
  return DensityMatrix(h);
}

DensityMatrix DensityMatrix::assume_valid(const ComplexMatrix& m) { return DensityMatrix(hermitian_part(m)); }

DensityMatrix DensityMatrix::maximally_mixed(int d) {
  if (d < 2) throw Error("maximally_mixed: invalid dimension");
  return DensityMatrix(ComplexMatrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
  const Eigen::VectorXcd v = psi.normalized();
  return DensityMatrix(v * v.adjoint());
}

ComplexMatrix SpectralDecomposition::reconstruct() const {
  return apply_function([](double x) { return x; });
}

SpectralDecomposition eig_hermitian(const ComplexMatrix& h, double grouping_tol) {
  if (h.rows() != h.cols() || h.rows() == 0) throw Error("eig_hermitian: matrix must be square");
  if (max_abs(h - h.adjoint()) > kHermitianTol) throw Error("eig_hermitian: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(h));
  if (es.info() != Eigen::Success) throw Error("eig_hermitian: eigensolver failed");
  const auto& values = es.eigenvalues();
  const auto& vectors = es.eigenvectors();
  const int n = static_cast<int>(h.rows());

  SpectralDecomposition out;
  out.grouping_tol = grouping_tol;
  int start = 0;
  while (start < n) {
    int stop = start + 1;
    while (stop < n && values(stop) - values(stop - 1) <= grouping_tol) ++stop;
    const auto block = vectors.middleCols(start, stop - start);
    out.projectors.push_back(block * block.adjoint());
    out.eigenvalues.push_back(values.segment(start, stop - start).mean());
    start = stop;
  }
  return out;
}

ComplexMatrix dephase_matrix(const ComplexMatrix& x, const SpectralDecomposition& basis) {
  if (basis.dim() != x.rows() || x.rows() != x.cols()) throw Error("dephase: dimension mismatch");
  ComplexMatrix out = ComplexMatrix::Zero(x.rows(), x.cols());
  for (const auto& p : basis.projectors) out.noalias() += p * x * p;
  return out;
}

DensityMatrix dephase(const DensityMatrix& rho, const SpectralDecomposition& basis) {
  return DensityMatrix::assume_valid(dephase_matrix(rho.matrix(), basis));
}

namespace {

// Lexicographic order on entries, used to make trace_distance bitwise symmetric.
bool entries_less(const ComplexMatrix& a, const ComplexMatrix& b) {
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    const Complex x = a.data()[k], y = b.data()[k];
    if (x.real() != y.real()) return x.real() < y.real();
    if (x.imag() != y.imag()) return x.imag() < y.imag();
  }
  return false;
}

}  // namespace

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw Error("trace_distance: dimension mismatch");
  const bool swap = entries_less(rho.matrix(), sigma.matrix());
  const ComplexMatrix diff = swap ? ComplexMatrix(sigma.matrix() - rho.matrix()) : ComplexMatrix(rho.matrix() - sigma.matrix());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double shannon_entropy(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p)
    if (x > kEntropyZero) s -= x * std::log(x);
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho.matrix(), Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  return shannon_entropy(std::vector<double>(ev.data(), ev.data() + ev.size()));
}

double rel_entropy_coherence(const DensityMatrix& rho, const SpectralDecomposition& basis) {
  const double c = von_neumann_entropy(dephase(rho, basis)) - von_neumann_entropy(rho);
  return std::max(c, 0.0);
}

}  // namespace otto
