#pragma once

#include <random>
#include <vector>

#include "impatient/belief.hpp"

namespace testing {

using impatient::Matrix;
using impatient::Rng;
using impatient::Vector;

inline Matrix random_matrix(int r, int c, Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = n(rng);
  return m;
}

inline Vector random_vector(int k, Rng& rng) { return random_matrix(k, 1, rng); }

// A A'/k + eps I, well conditioned enough for 1e-8 comparisons.
inline Matrix random_spd(int k, Rng& rng, double eps = 0.1) {
  Matrix a = random_matrix(k, k, rng);
  return a * a.transpose() / k + eps * Matrix::Identity(k, k);
}

// PSD with rank `rank` (no ridge).
inline Matrix random_low_rank(int k, int rank, Rng& rng) {
  Matrix a = random_matrix(k, rank, rng);
  return a * a.transpose();
}

inline impatient::PriorModel random_prior(int K, Rng& rng) {
  impatient::PriorModel p;
  p.mu = random_vector(K, rng);
  p.sigma = random_spd(K, rng);
  p.v_noise = random_spd(K, rng);
  p.weights = Vector::Ones(K);
  p.delays = impatient::default_delays(K);
  return p;
}

inline impatient::Trace random_trace(int K, int len, Rng& rng) {
  impatient::Trace t;
  t.values = random_vector(K, rng);
  t.observed_len = len;
  return t;
}

inline double max_abs(const Matrix& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace testing
