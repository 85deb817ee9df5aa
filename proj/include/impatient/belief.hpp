#pragma once

// Gaussian belief over an arm's mean trace, conditioned on progressively
// revealed sample traces.
//
// Generative model: zbar ~ N(mu, Sigma), z_m = zbar + eps_m, eps_m ~ N(0, V).
// A trace whose first `observed_len` entries are known contributes the
// observation z[:l] = zbar[:l] + eps[:l].

#include <random>
#include <span>
#include <vector>

#include "impatient/linalg.hpp"

namespace impatient {

struct Trace {
  Vector values;          // length K; entries past observed_len are hidden
  int observed_len = 0;   // number of leading entries that may be read
  int origin_round = 1;   // round at which the producing action was taken

  int size() const { return static_cast<int>(values.size()); }
  auto observed() const { return values.head(observed_len); }
};

struct PriorModel {
  Vector mu;
  Matrix sigma;
  Matrix v_noise;
  Vector weights;
  std::vector<int> delays;

  int K() const { return static_cast<int>(mu.size()); }
  int horizon() const { return delays.empty() ? 0 : delays.back(); }

  // Throws DimensionMismatch / std::invalid_argument when the invariants
  // (shapes, symmetry, PSD up to -1e-8, nondecreasing delays) do not hold.
  void validate() const;

  // Model over the first k coordinates only: leading blocks of mu, sigma,
  // v_noise, weights and delays.
  PriorModel leading(int k) const;
};

// Delays k + 1 for k = 1..K: day k is known one round after it ends.
std::vector<int> default_delays(int K);

struct GaussianBelief {
  Vector mean;
  Matrix cov;

  static GaussianBelief from_prior(const PriorModel& prior) { return {prior.mu, prior.sigma}; }
};

struct RewardBelief {
  double mean = 0.0;
  double var = 0.0;
};

// Condition on the leading `len` coordinates of `observation` with noise
// covariance v_noise[:len,:len] * noise_scale. This is the single kernel
// behind every update in this header.
GaussianBelief condition_on_prefix(const GaussianBelief& belief, const Matrix& v_noise,
                                   const Eigen::Ref<const Vector>& observation, int len,
                                   double noise_scale);

// Fold one partially observed trace into the belief. observed_len == 0
// returns the belief unchanged.
GaussianBelief condition_on_trace(const GaussianBelief& belief, const PriorModel& prior,
                                  const Trace& trace);

// Fold M traces that are all observed to exactly `len` entries, given their
// element-wise average. Equivalent to M sequential condition_on_trace calls.
GaussianBelief condition_on_group(const GaussianBelief& belief, const PriorModel& prior,
                                  const Eigen::Ref<const Vector>& mean_trace, int len, int count);

// Running sums of trace prefixes bucketed by observed length. Buckets are
// applied in increasing length, one solve per non-empty bucket.
class GroupedObservations {
 public:
  explicit GroupedObservations(int K);

  // Adds the first `len` entries of `values` to bucket `len`. Callers may
  // pass a len smaller than the trace's observed_len, never a larger one.
  void add(const Eigen::Ref<const Vector>& values, int len);
  void add(const Trace& trace) { add(trace.values, trace.observed_len); }

  int K() const { return K_; }
  bool empty() const;

  GaussianBelief posterior(const PriorModel& prior) const;

 private:
  int K_;
  std::vector<Vector> sums_;
  std::vector<int> counts_;
};

// Posterior of zbar given a dataset of traces, via the grouped update.
// Traces with observed_len == 0 are skipped.
GaussianBelief posterior_from_dataset(const PriorModel& prior, std::span<const Trace> dataset);

// Independent check: builds the joint Gaussian over (zbar, every observed
// entry) and conditions once. Only meant for test-scale datasets.
GaussianBelief joint_conditioning_oracle(const PriorModel& prior, std::span<const Trace> dataset);

// mean = w'mu, var = w'Sigma w. Round-off negatives are clamped to zero;
// a clearly negative variance (non-PSD cov) throws std::domain_error.
RewardBelief project_reward(const GaussianBelief& belief, const Eigen::Ref<const Vector>& weights);

using Rng = std::mt19937_64;

// One draw from N(rb.mean, rb.var), computed as mean + sd * z so that
// var == 0 returns the mean exactly while the stream advances identically.
double sample_reward(const RewardBelief& rb, Rng& rng);

}  // namespace impatient
