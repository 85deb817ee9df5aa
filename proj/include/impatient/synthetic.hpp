#pragma once

// Synthetic stand-in for a podcast consumption corpus.
//
// Show a has a mean activity trace
//   zbar_k = logistic(alpha_a + beta_a log k + A_a cos(2 pi k / 7) + g_ak
//                     + b_a exp(-(k - 1) / hook_decay)),  k = 1..K
// where (alpha_a, beta_a) scatter around (base_level, -decay_rate), A_a
// scatters around weekly_amplitude and g_a is a per-show AR(1) drift in logit
// space (a random walk when drift_persistence = 1). b_a ~ N(0, hook_scale^2)
// is a first-days bump unrelated to the long-run level. A user trace is
// binary: day k is active with probability
//   logistic(c(zbar_k) + gamma u + h_k),
// u ~ N(0, 1) a per-user effect, h a stationary AR(1) path, and c(.) the
// offset that makes the population rate of day k equal zbar_k.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "impatient/belief.hpp"
#include "impatient/prior_training.hpp"

namespace impatient {

struct GeneratorConfig {
  int K = 59;
  double base_level = -2.55;
  double decay_rate = 0.15;
  double weekly_amplitude = 0.25;
  double weekly_jitter = 0.8;       // per-show amplitude sd, relative to weekly_amplitude
  double cross_show_spread = 0.2;   // sd of alpha_a and beta_a
  double drift_ratio = 3.0;         // drift innovation sd, relative to cross_show_spread
  double drift_persistence = 0.3;   // 1 is a random walk, < 1 mean-reverting
  double hook_scale = 0.0;          // sd of a per-show bump on the first days
  double hook_decay = 2.0;          // e-folding time of that bump, in days
  double user_effect_scale = 1.5;   // gamma
  double ar_coefficient = 0.9;      // rho
  double ar_scale = 2.0;            // stationary sd of h
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct ShowGroundTruth {
  std::string show_id;
  Vector mean_trace;       // in (0, 1)
  double stickiness = 0;   // sum of mean_trace
};

// Independent stream for (seed, purpose, index); the same triple always
// yields the same stream regardless of what else has been drawn.
Rng split_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index);

namespace stream {
inline constexpr std::uint64_t kShows = 1;
inline constexpr std::uint64_t kTraces = 2;
inline constexpr std::uint64_t kEnvironment = 3;
inline constexpr std::uint64_t kPolicy = 4;
inline constexpr std::uint64_t kSetChanges = 5;
inline constexpr std::uint64_t kArms = 6;
inline constexpr std::uint64_t kLibrary = 7;
}  // namespace stream

struct Dataset {
  std::vector<ShowHistory> histories;  // targets y = sum_k z_k per trace
  std::vector<ShowGroundTruth> truths;
};

class Generator {
 public:
  explicit Generator(GeneratorConfig cfg);

  const GeneratorConfig& config() const { return cfg_; }

  ShowGroundTruth gen_show(Rng& rng, std::string show_id) const;

  // Latent logit offsets c(zbar_k) for one show, reused across its traces.
  Vector latent_offsets(const ShowGroundTruth& gt) const;

  Trace sample_trace(const ShowGroundTruth& gt, Rng& rng) const;
  Trace sample_trace_from_offsets(const Vector& offsets, Rng& rng) const;

  // Population activity rate E[logistic(offset + gamma u + h)].
  double population_rate(double offset) const;

  // Shows are generated independently from split_stream(cfg.seed, ., i),
  // so the result does not depend on generation order.
  Dataset gen_dataset(int n_shows, int traces_per_show) const;

 private:
  double offset_for_logit(double target_logit) const;

  GeneratorConfig cfg_;
  double mix_sd_ = 0.0;
  double grid_lo_ = 0.0;
  double grid_step_ = 0.0;
  std::vector<double> offsets_;
};

double logistic(double x);
double logit(double p);

std::string show_name(int index);

// Ground-truth file: one JSON object per line,
//   {"show_id": "...", "stickiness": 3.4, "mean_trace": [...]}
void write_ground_truth(const std::filesystem::path& path, const std::vector<ShowGroundTruth>& truths);
std::vector<ShowGroundTruth> read_ground_truth(const std::filesystem::path& path);

}  // namespace impatient
