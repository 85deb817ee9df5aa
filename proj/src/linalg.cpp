#include "impatient/linalg.hpp"

#include <string>

#include "impatient/errors.hpp"

namespace impatient {

namespace {

bool factor_ok(const Eigen::LLT<Matrix>& llt) {
  if (llt.info() != Eigen::Success) return false;
  return llt.matrixLLT().diagonal().allFinite() &&
         (llt.matrixLLT().diagonal().array() > 0.0).all();
}

}  // namespace

JitteredCholesky::JitteredCholesky(const Eigen::Ref<const Matrix>& m) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("cholesky: matrix is not square");
  }
  if (!m.allFinite()) {
    throw NonInvertible("cholesky: matrix has non-finite entries");
  }
  llt.compute(m);
  if (factor_ok(llt)) return;

  const auto n = m.rows();
  for (double j = kJitterStart; j <= kJitterMax * (1.0 + 1e-12); j *= 10.0) {
    llt.compute(m + j * Matrix::Identity(n, n));
    if (factor_ok(llt)) {
      jitter = j;
      return;
    }
  }
  throw NonInvertible("cholesky: matrix of size " + std::to_string(n) +
                      " not positive definite after jitter " + std::to_string(kJitterMax));
}

void symmetrize(Matrix& m) {
  Matrix t = m.transpose();
  m = 0.5 * (m + t);
}

bool is_symmetric(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace impatient
