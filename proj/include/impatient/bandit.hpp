#pragma once

// Batched Thompson sampling over arms whose traces are revealed day by day,
// plus the delayed / day-two proxy / oracle feedback baselines.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "impatient/belief.hpp"
#include "impatient/synthetic.hpp"
#include "impatient/table_io.hpp"

namespace impatient {

enum class PolicyKind { progressive, delayed, day_two_proxy, oracle };

std::string_view policy_name(PolicyKind kind);
PolicyKind parse_policy(std::string_view name);  // throws std::invalid_argument

// What a policy may see about an arm. Ground truth lives elsewhere.
struct ArmData {
  std::string arm_id;
  std::vector<Trace> dataset;
  bool dirty = true;  // observations changed since the last belief refresh
};

// Number of leading entries known `elapsed` rounds after the action:
// max{k : delays[k-1] <= elapsed}, 0 if none.
int revealed_length(int elapsed, std::span<const int> delays);

// Updates observed_len of every trace for `round`; marks the arm dirty and
// returns true iff anything changed.
bool reveal(ArmData& arm, int round, std::span<const int> delays);

// Reward belief of one arm under a policy's feedback filter:
//   progressive   every revealed prefix, reward weights of the model
//   delayed       fully revealed traces only
//   day_two_proxy first entry only, w = e_1 (a K = 1 filter)
//   oracle        every trace as if fully revealed
RewardBelief policy_belief(PolicyKind kind, const ArmData& arm, const PriorModel& prior);

// Per-policy belief cache: only dirty arms are recomputed.
class PolicyBeliefs {
 public:
  PolicyBeliefs(PolicyKind kind, const PriorModel& prior);

  const std::vector<RewardBelief>& refresh(std::span<ArmData> arms);
  int last_recomputed() const { return last_recomputed_; }

 private:
  PolicyKind kind_;
  PriorModel prior_;
  PriorModel proxy_;
  std::vector<RewardBelief> cache_;
  int last_recomputed_ = 0;
};

// B independent Thompson draws; each takes the argmax of one sample per
// arm, ties to the lowest index.
std::vector<int> thompson_select(std::span<const RewardBelief> beliefs, int B, Rng& rng);

// Natural-log entropy of the empirical distribution of one round's picks.
double selection_entropy(std::span<const int> counts);

// Source of arms and of user traces.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual ShowGroundTruth new_arm(Rng& rng, int serial) = 0;
  virtual Trace draw_trace(const ShowGroundTruth& arm, Rng& rng) = 0;
};

// Arms 0..library_size-1 are a fixed evaluation library: show i comes from
// split_stream(cfg.seed, stream::kLibrary, i), so it is the same show in every
// episode and smaller libraries are prefixes of larger ones. Later arms
// (set changes) are fresh shows drawn from the caller's stream.
class SyntheticEnvironment : public Environment {
 public:
  explicit SyntheticEnvironment(GeneratorConfig cfg, int library_size = 0);

  ShowGroundTruth new_arm(Rng& rng, int serial) override;
  Trace draw_trace(const ShowGroundTruth& arm, Rng& rng) override;

  const Generator& generator() const { return gen_; }
  const std::vector<ShowGroundTruth>& library() const { return library_; }

 private:
  Generator gen_;
  std::vector<ShowGroundTruth> library_;
  std::unordered_map<std::string, Vector> offsets_;
};

struct EpisodeConfig {
  int n_arms = 50;
  int batch_size = 30;
  int rounds = 180;
  PolicyKind policy = PolicyKind::progressive;
  bool changing_set = false;
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

struct EpisodeMetrics {
  std::vector<double> per_step_regret;        // length T
  std::vector<double> entropy;                // length T
  std::vector<std::vector<int>> action_counts;  // T x N, by arm slot
  double cumulative_regret = 0.0;
};

using Selector = std::function<std::vector<int>(std::span<const RewardBelief>, int B, Rng&)>;

// Streams split from cfg.seed: initial arms, environment traces, policy
// draws and set changes each get their own, so policies facing the same
// seed face the same arms and the same set changes.
EpisodeMetrics run_episode(const EpisodeConfig& cfg, const PriorModel& prior, Environment& env,
                           const Selector& select = {});

Table metrics_table(const std::string& run_id, PolicyKind policy, std::uint64_t seed, const EpisodeMetrics& m);
Table action_count_table(const std::string& run_id, PolicyKind policy, std::uint64_t seed,
                         const EpisodeMetrics& m);
// Per round: mean and standard error across runs of regret and entropy.
Table aggregate_table(PolicyKind policy, std::span<const EpisodeMetrics> runs);

}  // namespace impatient
