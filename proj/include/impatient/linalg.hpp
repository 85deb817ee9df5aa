#pragma once

#include <Eigen/Dense>

namespace impatient {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Jitter schedule shared by every solve in the library: first attempt
// without jitter, then 1e-9, 1e-8, ... up to 1e-3 added to the diagonal.
inline constexpr double kJitterStart = 1e-9;
inline constexpr double kJitterMax = 1e-3;

// Cholesky factor of a symmetric positive definite matrix, with the
// jitter actually applied. Throws NonInvertible when the escalation is
// exhausted.
struct JitteredCholesky {
  Eigen::LLT<Matrix> llt;
  double jitter = 0.0;

  explicit JitteredCholesky(const Eigen::Ref<const Matrix>& m);

  template <typename Rhs>
  auto solve(const Eigen::MatrixBase<Rhs>& rhs) const {
    return llt.solve(rhs).eval();
  }
};

// (m + m^T) / 2 in place.
void symmetrize(Matrix& m);

bool is_symmetric(const Matrix& m, double tol);

double min_eigenvalue(const Matrix& m);

}  // namespace impatient
