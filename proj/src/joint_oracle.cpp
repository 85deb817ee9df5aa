#include <string>
#include <vector>

#include "impatient/belief.hpp"
#include "impatient/errors.hpp"

namespace impatient {

// Deliberately shares nothing with condition_on_prefix: the full joint
// covariance is assembled entry by entry and solved with a pivoted LDLT.
GaussianBelief joint_conditioning_oracle(const PriorModel& prior, std::span<const Trace> dataset) {
  const int K = prior.K();
  struct Block {
    const Trace* trace;
    Eigen::Index offset;
  };
  std::vector<Block> blocks;
  Eigen::Index n = 0;
  for (const auto& t : dataset) {
    if (t.size() != K) throw DimensionMismatch("oracle: trace length differs from K");
    if (t.observed_len <= 0) continue;
    blocks.push_back({&t, n});
    n += t.observed_len;
  }
  if (n == 0) return GaussianBelief::from_prior(prior);

  Matrix c_oo(n, n);
  Matrix c_zo(K, n);
  Vector resid(n);
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    const auto& ba = blocks[a];
    const int la = ba.trace->observed_len;
    for (int i = 0; i < la; ++i) {
      resid(ba.offset + i) = ba.trace->values(i) - prior.mu(i);
      for (int k = 0; k < K; ++k) c_zo(k, ba.offset + i) = prior.sigma(k, i);
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      const auto& bb = blocks[b];
      const int lb = bb.trace->observed_len;
      for (int i = 0; i < la; ++i) {
        for (int j = 0; j < lb; ++j) {
          double v = prior.sigma(i, j);
          if (a == b) v += prior.v_noise(i, j);
          c_oo(ba.offset + i, bb.offset + j) = v;
        }
      }
    }
  }

  Eigen::LDLT<Matrix> ldlt(c_oo);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
    throw NonInvertible("oracle: joint observation covariance of size " + std::to_string(n) +
                        " is not positive definite");
  }
  GaussianBelief out;
  out.mean = prior.mu + c_zo * ldlt.solve(resid);
  out.cov = prior.sigma - c_zo * ldlt.solve(Matrix(c_zo.transpose()));
  symmetrize(out.cov);
  return out;
}

}  // namespace impatient
