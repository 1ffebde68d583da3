#pragma once

#include <doctest.h>

#include <random>

#include "otto/qcore.hpp"

namespace otto::test {

inline ComplexMatrix diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) d(i++) = x;
  return d.cast<Complex>().asDiagonal();
}

inline double min_eig(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace otto::test
