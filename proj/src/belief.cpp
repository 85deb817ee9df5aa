#include "impatient/belief.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "impatient/errors.hpp"

namespace impatient {

void PriorModel::validate() const {
  const auto k = mu.size();
  if (sigma.rows() != k || sigma.cols() != k || v_noise.rows() != k || v_noise.cols() != k ||
      weights.size() != k || static_cast<Eigen::Index>(delays.size()) != k) {
    throw DimensionMismatch("prior: inconsistent dimensions (K = " + std::to_string(k) + ")");
  }
  if (!is_symmetric(sigma, 1e-10)) throw std::invalid_argument("prior: sigma is not symmetric");
  if (!is_symmetric(v_noise, 1e-10)) throw std::invalid_argument("prior: v_noise is not symmetric");
  if (min_eigenvalue(sigma) < -1e-8) throw std::invalid_argument("prior: sigma is not PSD");
  if (min_eigenvalue(v_noise) < -1e-8) throw std::invalid_argument("prior: v_noise is not PSD");
  for (std::size_t i = 1; i < delays.size(); ++i) {
    if (delays[i] < delays[i - 1]) throw std::invalid_argument("prior: delays must be nondecreasing");
  }
}

PriorModel PriorModel::leading(int k) const {
  if (k < 0 || k > K()) throw DimensionMismatch("prior: leading block out of range");
  PriorModel out;
  out.mu = mu.head(k);
  out.sigma = sigma.topLeftCorner(k, k);
  out.v_noise = v_noise.topLeftCorner(k, k);
  out.weights = weights.head(k);
  out.delays.assign(delays.begin(), delays.begin() + k);
  return out;
}

std::vector<int> default_delays(int K) {
  std::vector<int> d(K);
  for (int k = 0; k < K; ++k) d[k] = k + 2;
  return d;
}

GaussianBelief condition_on_prefix(const GaussianBelief& belief, const Matrix& v_noise,
                                   const Eigen::Ref<const Vector>& observation, int len,
                                   double noise_scale) {
  const auto K = belief.mean.size();
  if (belief.cov.rows() != K || belief.cov.cols() != K || v_noise.rows() != K ||
      v_noise.cols() != K) {
    throw DimensionMismatch("condition: belief and noise dimensions differ");
  }
  if (len < 0 || len > K || observation.size() < len) {
    throw DimensionMismatch("condition: observed length out of range");
  }
  if (len == 0) return belief;

  Matrix s = belief.cov.topLeftCorner(len, len) + noise_scale * v_noise.topLeftCorner(len, len);
  const JitteredCholesky chol(s);
  const auto L = chol.llt.matrixL();

  // W = L^{-1} Sigma[:l, :K]; posterior cov = Sigma - W^T W.
  Matrix w = belief.cov.topRows(len);
  L.solveInPlace(w);
  Vector innov = observation.head(len) - belief.mean.head(len);
  L.solveInPlace(innov);

  GaussianBelief out;
  out.mean = belief.mean + w.transpose() * innov;
  out.cov = belief.cov;
  out.cov.noalias() -= w.transpose() * w;
  symmetrize(out.cov);
  return out;
}

GaussianBelief condition_on_trace(const GaussianBelief& belief, const PriorModel& prior,
                                  const Trace& trace) {
  if (trace.size() != prior.K()) {
    throw DimensionMismatch("trace length " + std::to_string(trace.size()) + " != K " +
                            std::to_string(prior.K()));
  }
  return condition_on_prefix(belief, prior.v_noise, trace.values, trace.observed_len, 1.0);
}

GaussianBelief condition_on_group(const GaussianBelief& belief, const PriorModel& prior,
                                  const Eigen::Ref<const Vector>& mean_trace, int len, int count) {
  if (count < 1) throw std::invalid_argument("condition_on_group: count must be >= 1");
  if (mean_trace.size() < len) throw DimensionMismatch("condition_on_group: mean trace too short");
  return condition_on_prefix(belief, prior.v_noise, mean_trace, len, 1.0 / count);
}

GroupedObservations::GroupedObservations(int K)
    : K_(K), sums_(static_cast<std::size_t>(K) + 1), counts_(static_cast<std::size_t>(K) + 1, 0) {}

void GroupedObservations::add(const Eigen::Ref<const Vector>& values, int len) {
  if (len < 0 || len > K_ || values.size() < len) {
    throw DimensionMismatch("grouped: observed length out of range");
  }
  if (len == 0) return;
  auto& sum = sums_[len];
  if (counts_[len] == 0) {
    sum = values.head(len);
  } else {
    sum += values.head(len);
  }
  ++counts_[len];
}

bool GroupedObservations::empty() const {
  for (int c : counts_) {
    if (c > 0) return false;
  }
  return true;
}

GaussianBelief GroupedObservations::posterior(const PriorModel& prior) const {
  if (prior.K() != K_) throw DimensionMismatch("grouped: prior K differs");
  auto belief = GaussianBelief::from_prior(prior);
  for (int len = 1; len <= K_; ++len) {
    const int m = counts_[len];
    if (m == 0) continue;
    Vector avg = sums_[len] / static_cast<double>(m);
    belief = condition_on_group(belief, prior, avg, len, m);
  }
  return belief;
}

GaussianBelief posterior_from_dataset(const PriorModel& prior, std::span<const Trace> dataset) {
  GroupedObservations groups(prior.K());
  for (const auto& t : dataset) {
    if (t.size() != prior.K()) throw DimensionMismatch("posterior: trace length differs from K");
    groups.add(t);
  }
  return groups.posterior(prior);
}

RewardBelief project_reward(const GaussianBelief& belief, const Eigen::Ref<const Vector>& weights) {
  if (weights.size() != belief.mean.size()) {
    throw DimensionMismatch("project_reward: weights length differs from K");
  }
  RewardBelief rb;
  rb.mean = weights.dot(belief.mean);
  rb.var = weights.dot(belief.cov * weights);
  if (rb.var < 0.0) {
    const double scale = std::max(1.0, weights.squaredNorm() * belief.cov.diagonal().cwiseAbs().maxCoeff());
    if (rb.var < -1e-12 * scale) throw std::domain_error("project_reward: negative variance");
    rb.var = 0.0;
  }
  return rb;
}

double sample_reward(const RewardBelief& rb, Rng& rng) {
  std::normal_distribution<double> std_normal(0.0, 1.0);
  const double z = std_normal(rng);
  return rb.mean + std::sqrt(rb.var) * z;
}

}  // namespace impatient
