#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace otto {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpinOperators {
  ComplexMatrix sx;
  ComplexMatrix sy;
  ComplexMatrix sz;
};

// Angular-momentum matrices for spin j = (d-1)/2 in the Sz eigenbasis,
// ordered m = j, j-1, ..., -j (hbar = 1).
SpinOperators spin_operators(int d);

// Largest absolute entry.
double max_abs(const ComplexMatrix& m);

// Positive, unit-trace Hermitian matrix. Construction through from_matrix()
// validates; assume_valid() only symmetrizes and is meant for outputs of
// maps that are known to be CPTP.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-12;

  static DensityMatrix from_matrix(const ComplexMatrix& m, double tol = kTolerance);
  static DensityMatrix assume_valid(const ComplexMatrix& m);
  static DensityMatrix maximally_mixed(int d);
  static DensityMatrix pure(const Eigen::VectorXcd& psi);

  const ComplexMatrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }

 private:
  explicit DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {}
  ComplexMatrix m_;
};

// Eigenvalues, ascending, each paired with the orthogonal projector onto its
// (possibly degenerate) eigenspace.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<ComplexMatrix> projectors;
  double grouping_tol = 1e-9;

  std::size_t size() const { return eigenvalues.size(); }
  int dim() const { return projectors.empty() ? 0 : static_cast<int>(projectors.front().rows()); }
  // Σ_a λ_a P_a
  ComplexMatrix reconstruct() const;
  // Σ_a f(λ_a) P_a
  template <class F>
  ComplexMatrix apply_function(F&& f) const {
    ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
    for (std::size_t a = 0; a < size(); ++a) out += f(eigenvalues[a]) * projectors[a];
    return out;
  }
};

constexpr double kDefaultGroupingTol = 1e-9;

// Throws Error if h is not Hermitian to 1e-10.
SpectralDecomposition eig_hermitian(const ComplexMatrix& h, double grouping_tol = kDefaultGroupingTol);

// Σ_a P_a X P_a for an arbitrary (not necessarily Hermitian) X.
ComplexMatrix dephase_matrix(const ComplexMatrix& x, const SpectralDecomposition& basis);
DensityMatrix dephase(const DensityMatrix& rho, const SpectralDecomposition& basis);

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// Natural-log von Neumann entropy; eigenvalues below 1e-14 count as zero.
double von_neumann_entropy(const DensityMatrix& rho);
double shannon_entropy(const std::vector<double>& p);

// S(D(rho)) - S(rho) with D the dephasing in `basis`.
double rel_entropy_coherence(const DensityMatrix& rho, const SpectralDecomposition& basis);

}  // namespace otto
