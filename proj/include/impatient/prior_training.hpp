#pragma once

// Meta-learning of the filter's parameters from a corpus of historical
// shows: per-show empirical moments, cross-show averages, surrogate
// weights by least squares, and quadratic trace augmentation.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "impatient/belief.hpp"

namespace impatient {

struct ShowHistory {
  std::string show_id;
  std::vector<Trace> traces;                   // all fully observed
  std::optional<std::vector<double>> targets;  // aligned with traces
};

struct ShowStats {
  Vector mean_trace;
  Matrix noise_cov;
  int count = 0;
};

// Empirical mean trace and population (1/M) noise covariance.
ShowStats show_stats(const ShowHistory& history);

// mu = mean of the per-show means, Sigma = their population covariance,
// V = mean of the per-show noise covariances. Each show counts once.
// Shows are reduced in show_id order so the result does not depend on the
// order of `histories`.
PriorModel fit_prior(std::span<const ShowHistory> histories, std::vector<int> delays, Vector weights);

// argmin_w sum (y - w'z)^2 + ridge |w|^2 over every (trace, target) pair.
Vector fit_weights(std::span<const ShowHistory> histories, double ridge = 1e-6);

// Symmetrize, then clip negative eigenvalues to zero.
Matrix psd_repair(const Matrix& m);

// A monomial of degree <= 2 over trace coordinates: z_i, z_i^2 or z_i z_j.
struct Monomial {
  int first = 0;
  int second = -1;  // -1 for a linear term

  static Monomial linear(int i) { return {i, -1}; }
  static Monomial product(int i, int j) { return {i, j}; }
};

using FeatureSpec = std::vector<Monomial>;

FeatureSpec identity_features(int K);

// (z_1..z_K, z_1^2..z_K^2, z_i z_j for i < j).
FeatureSpec quadratic_features(int K);

struct AugmentedTraces {
  std::vector<Trace> traces;
  // Delay of feature p is the largest delay among the constituents of
  // features 0..p, so prefixes stay observable in order.
  std::vector<int> delays;
};

// Maps each trace through `spec`. A feature counts as observed when every
// constituent coordinate of it and of all earlier features is observed;
// for a spec listed in nondecreasing delay order that is exactly "all of
// its constituents are observed".
AugmentedTraces augment_traces(std::span<const Trace> traces, const FeatureSpec& spec,
                               std::span<const int> delays);

}  // namespace impatient
