#include "impatient/contextual.hpp"

#include <string>

#include "impatient/errors.hpp"

namespace impatient {

void ContextualBelief::validate() const {
  const auto n = static_cast<Eigen::Index>(d) * K;
  if (d < 1 || K < 1 || mean.size() != n || cov.rows() != n || cov.cols() != n) {
    throw DimensionMismatch("contextual belief: expected vec(Theta) of size " + std::to_string(n));
  }
}

ContextualBelief contextual_prior(const PriorModel& prior, int d) {
  if (d < 1) throw DimensionMismatch("contextual_prior: d must be >= 1");
  const int K = prior.K();
  ContextualBelief b;
  b.d = d;
  b.K = K;
  b.mean.resize(static_cast<Eigen::Index>(d) * K);
  b.cov = Matrix::Zero(b.mean.size(), b.mean.size());
  for (int i = 0; i < d; ++i) {
    b.mean.segment(static_cast<Eigen::Index>(i) * K, K) = prior.mu;
    b.cov.block(static_cast<Eigen::Index>(i) * K, static_cast<Eigen::Index>(i) * K, K, K) = prior.sigma;
  }
  return b;
}

Matrix observation_operator(const Vector& x, int K, int len) {
  const auto d = x.size();
  Matrix h = Matrix::Zero(len, d * K);
  for (int k = 0; k < len; ++k) {
    for (Eigen::Index i = 0; i < d; ++i) h(k, i * K + k) = x(i);
  }
  return h;
}

ContextualBelief contextual_update(const ContextualBelief& belief, const Vector& x, const Trace& trace,
                                   const Matrix& v_noise) {
  belief.validate();
  if (x.size() != belief.d) throw DimensionMismatch("contextual_update: context length differs from d");
  if (trace.size() != belief.K || v_noise.rows() != belief.K || v_noise.cols() != belief.K) {
    throw DimensionMismatch("contextual_update: trace or noise size differs from K");
  }
  const int len = trace.observed_len;
  if (len < 0 || len > belief.K) throw DimensionMismatch("contextual_update: observed length out of range");
  if (len == 0) return belief;

  const Matrix h = observation_operator(x, belief.K, len);
  const Matrix h_sigma = h * belief.cov;  // len x dK
  Matrix s = h_sigma * h.transpose() + v_noise.topLeftCorner(len, len);
  symmetrize(s);
  const JitteredCholesky chol(s);
  const auto L = chol.llt.matrixL();

  Matrix w = h_sigma;
  L.solveInPlace(w);
  Vector innov = trace.values.head(len) - h * belief.mean;
  L.solveInPlace(innov);

  ContextualBelief out = belief;
  out.mean += w.transpose() * innov;
  out.cov.noalias() -= w.transpose() * w;
  symmetrize(out.cov);
  return out;
}

RewardBelief contextual_reward(const ContextualBelief& belief, const Vector& x, const Vector& weights) {
  belief.validate();
  if (x.size() != belief.d || weights.size() != belief.K) {
    throw DimensionMismatch("contextual_reward: context or weights size mismatch");
  }
  Vector g(belief.mean.size());
  for (int i = 0; i < belief.d; ++i) g.segment(static_cast<Eigen::Index>(i) * belief.K, belief.K) = x(i) * weights;
  GaussianBelief flat{belief.mean, belief.cov};
  return project_reward(flat, g);
}

}  // namespace impatient
