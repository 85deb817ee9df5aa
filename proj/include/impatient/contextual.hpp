#pragma once

// Gaussian belief over a d x K coefficient matrix Theta: in context x the
// expected trace is Theta' x and the expected reward x' Theta w.
//
// vec convention: vec(Theta) stacks the rows of Theta, so entry i*K + k is
// Theta(i, k). Under it the expected trace is H vec(Theta) with
// H = x' (x) I_K, and the reward is (x (x) w)' vec(Theta).

#include "impatient/belief.hpp"

namespace impatient {

struct ContextualBelief {
  Vector mean;  // length d*K
  Matrix cov;   // d*K x d*K
  int d = 1;
  int K = 0;

  void validate() const;  // throws DimensionMismatch
};

// Independent copies of a base prior for every context coordinate:
// mean 1_d (x) mu, cov I_d (x) Sigma.
ContextualBelief contextual_prior(const PriorModel& prior, int d);

// Rows 0..len-1 of x' (x) I_K.
Matrix observation_operator(const Vector& x, int K, int len);

// Exact conditioning on z[:l] = H_l vec(Theta) + noise, noise ~ N(0, V[:l,:l]).
// observed_len == 0 returns the belief unchanged.
ContextualBelief contextual_update(const ContextualBelief& belief, const Vector& x, const Trace& trace,
                                   const Matrix& v_noise);

// Belief on x' Theta w.
RewardBelief contextual_reward(const ContextualBelief& belief, const Vector& x, const Vector& weights);

}  // namespace impatient
