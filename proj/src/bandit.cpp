#include "impatient/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "impatient/stats.hpp"

namespace impatient {

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::progressive:
      return "progressive";
    case PolicyKind::delayed:
      return "delayed";
    case PolicyKind::day_two_proxy:
      return "day_two_proxy";
    case PolicyKind::oracle:
      return "oracle";
  }
  return "unknown";
}

PolicyKind parse_policy(std::string_view name) {
  for (auto k : {PolicyKind::progressive, PolicyKind::delayed, PolicyKind::day_two_proxy, PolicyKind::oracle}) {
    if (policy_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected progressive, delayed, day_two_proxy or oracle)");
}

int revealed_length(int elapsed, std::span<const int> delays) {
  // delays are nondecreasing, so the revealed set is a prefix
  const auto it = std::upper_bound(delays.begin(), delays.end(), elapsed);
  return static_cast<int>(it - delays.begin());
}

bool reveal(ArmData& arm, int round, std::span<const int> delays) {
  const int K = static_cast<int>(delays.size());
  bool changed = false;
  for (auto& t : arm.dataset) {
    if (t.observed_len == K) continue;
    if (round < t.origin_round) throw std::invalid_argument("reveal: round precedes trace origin");
    const int len = revealed_length(round - t.origin_round, delays);
    if (len != t.observed_len) {
      t.observed_len = len;
      changed = true;
    }
  }
  if (changed) arm.dirty = true;
  return changed;
}

namespace {

int effective_length(PolicyKind kind, int observed_len, int K) {
  switch (kind) {
    case PolicyKind::progressive:
      return observed_len;
    case PolicyKind::delayed:
      return observed_len == K ? K : 0;
    case PolicyKind::day_two_proxy:
      return std::min(observed_len, 1);
    case PolicyKind::oracle:
      return K;
  }
  return 0;
}

RewardBelief belief_under(PolicyKind kind, const ArmData& arm, const PriorModel& model, int full_K) {
  GroupedObservations groups(model.K());
  for (const auto& t : arm.dataset) {
    groups.add(t.values, effective_length(kind, t.observed_len, full_K));
  }
  return project_reward(groups.posterior(model), model.weights);
}

PriorModel proxy_model(const PriorModel& prior) {
  PriorModel m = prior.leading(1);
  m.weights = Vector::Ones(1);
  return m;
}

}  // namespace

RewardBelief policy_belief(PolicyKind kind, const ArmData& arm, const PriorModel& prior) {
  if (kind == PolicyKind::day_two_proxy) return belief_under(kind, arm, proxy_model(prior), prior.K());
  return belief_under(kind, arm, prior, prior.K());
}

PolicyBeliefs::PolicyBeliefs(PolicyKind kind, const PriorModel& prior) : kind_(kind), prior_(prior) {
  if (kind_ == PolicyKind::day_two_proxy) proxy_ = proxy_model(prior_);
}

const std::vector<RewardBelief>& PolicyBeliefs::refresh(std::span<ArmData> arms) {
  if (cache_.size() != arms.size()) {
    cache_.assign(arms.size(), RewardBelief{});
    for (auto& a : arms) a.dirty = true;
  }
  const PriorModel& model = kind_ == PolicyKind::day_two_proxy ? proxy_ : prior_;
  last_recomputed_ = 0;
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (!arms[i].dirty) continue;
    cache_[i] = belief_under(kind_, arms[i], model, prior_.K());
    arms[i].dirty = false;
    ++last_recomputed_;
  }
  return cache_;
}

std::vector<int> thompson_select(std::span<const RewardBelief> beliefs, int B, Rng& rng) {
  if (B < 1) throw std::invalid_argument("thompson_select: B must be >= 1");
  if (beliefs.empty()) throw std::invalid_argument("thompson_select: no arms");
  std::vector<int> picks;
  picks.reserve(static_cast<std::size_t>(B));
  for (int i = 0; i < B; ++i) {
    int best = 0;
    double best_draw = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < beliefs.size(); ++a) {
      const double draw = sample_reward(beliefs[a], rng);
      if (draw > best_draw) {
        best_draw = draw;
        best = static_cast<int>(a);
      }
    }
    picks.push_back(best);
  }
  return picks;
}

double selection_entropy(std::span<const int> counts) {
  double total = 0.0;
  for (int c : counts) total += c;
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (int c : counts) {
    if (c <= 0) continue;
    const double p = c / total;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

SyntheticEnvironment::SyntheticEnvironment(GeneratorConfig cfg, int library_size) : gen_(cfg) {
  for (int i = 0; i < library_size; ++i) {
    auto rng = split_stream(cfg.seed, stream::kLibrary, static_cast<std::uint64_t>(i));
    library_.push_back(gen_.gen_show(rng, "lib-" + std::to_string(i)));
    offsets_[library_.back().show_id] = gen_.latent_offsets(library_.back());
  }
}

ShowGroundTruth SyntheticEnvironment::new_arm(Rng& rng, int serial) {
  if (serial >= 0 && serial < static_cast<int>(library_.size())) return library_[static_cast<std::size_t>(serial)];
  auto gt = gen_.gen_show(rng, "arm-" + std::to_string(serial));
  offsets_[gt.show_id] = gen_.latent_offsets(gt);
  return gt;
}

Trace SyntheticEnvironment::draw_trace(const ShowGroundTruth& arm, Rng& rng) {
  auto it = offsets_.find(arm.show_id);
  if (it == offsets_.end()) it = offsets_.emplace(arm.show_id, gen_.latent_offsets(arm)).first;
  return gen_.sample_trace_from_offsets(it->second, rng);
}

void EpisodeConfig::validate() const {
  if (n_arms < 2) throw std::invalid_argument("episode: n_arms must be >= 2");
  if (batch_size < 1) throw std::invalid_argument("episode: batch_size must be >= 1");
  if (rounds < 1) throw std::invalid_argument("episode: rounds must be >= 1");
}

EpisodeMetrics run_episode(const EpisodeConfig& cfg, const PriorModel& prior, Environment& env,
                           const Selector& select) {
  cfg.validate();
  const int N = cfg.n_arms;
  const int B = cfg.batch_size;

  auto arm_rng = split_stream(cfg.seed, stream::kArms, 0);
  auto env_rng = split_stream(cfg.seed, stream::kEnvironment, 0);
  auto policy_rng = split_stream(cfg.seed, stream::kPolicy, 0);
  auto change_rng = split_stream(cfg.seed, stream::kSetChanges, 0);

  std::vector<ArmData> arms(static_cast<std::size_t>(N));
  std::vector<ShowGroundTruth> truths;
  truths.reserve(static_cast<std::size_t>(N));
  int serial = 0;
  for (int a = 0; a < N; ++a, ++serial) {
    truths.push_back(env.new_arm(arm_rng, serial));
    arms[a].arm_id = truths.back().show_id;
  }

  PolicyBeliefs beliefs(cfg.policy, prior);
  EpisodeMetrics m;
  m.per_step_regret.reserve(static_cast<std::size_t>(cfg.rounds));
  m.entropy.reserve(static_cast<std::size_t>(cfg.rounds));
  m.action_counts.reserve(static_cast<std::size_t>(cfg.rounds));

  for (int t = 1; t <= cfg.rounds; ++t) {
    for (auto& arm : arms) reveal(arm, t, prior.delays);
    const auto& rb = beliefs.refresh(arms);
    const auto picks = select ? select(rb, B, policy_rng) : thompson_select(rb, B, policy_rng);
    if (static_cast<int>(picks.size()) != B) throw std::logic_error("selector returned a wrong batch size");

    std::vector<int> counts(static_cast<std::size_t>(N), 0);
    double picked = 0.0;
    for (int a : picks) {
      if (a < 0 || a >= N) throw std::logic_error("selector returned an invalid arm");
      Trace tr = env.draw_trace(truths[a], env_rng);
      tr.observed_len = 0;
      tr.origin_round = t;
      arms[a].dataset.push_back(std::move(tr));
      arms[a].dirty = true;
      ++counts[a];
      picked += truths[a].stickiness;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& gt : truths) best = std::max(best, gt.stickiness);
    const double regret = std::max(0.0, best - picked / B);

    m.per_step_regret.push_back(regret);
    m.entropy.push_back(selection_entropy(counts));
    m.action_counts.push_back(std::move(counts));
    m.cumulative_regret += regret;

    if (cfg.changing_set) {
      std::uniform_int_distribution<int> pick_slot(0, N - 1);
      const int slot = pick_slot(change_rng);
      truths[slot] = env.new_arm(change_rng, serial++);
      arms[slot] = ArmData{truths[slot].show_id, {}, true};
    }
  }
  return m;
}

Table metrics_table(const std::string& run_id, PolicyKind policy, std::uint64_t seed, const EpisodeMetrics& m) {
  Table t;
  t.header = {"run_id", "policy", "seed", "round", "per_step_regret", "entropy"};
  for (std::size_t r = 0; r < m.per_step_regret.size(); ++r) {
    t.rows.push_back({run_id, std::string(policy_name(policy)), std::to_string(seed), std::to_string(r + 1),
                      format_real(m.per_step_regret[r]), format_real(m.entropy[r])});
  }
  return t;
}

Table action_count_table(const std::string& run_id, PolicyKind policy, std::uint64_t seed,
                         const EpisodeMetrics& m) {
  Table t;
  t.header = {"run_id", "policy", "seed", "round"};
  const std::size_t N = m.action_counts.empty() ? 0 : m.action_counts.front().size();
  for (std::size_t a = 0; a < N; ++a) t.header.push_back("arm_" + std::to_string(a));
  for (std::size_t r = 0; r < m.action_counts.size(); ++r) {
    std::vector<std::string> row{run_id, std::string(policy_name(policy)), std::to_string(seed),
                                 std::to_string(r + 1)};
    for (int c : m.action_counts[r]) row.push_back(std::to_string(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table aggregate_table(PolicyKind policy, std::span<const EpisodeMetrics> runs) {
  Table t;
  t.header = {"policy", "round", "runs", "mean_regret", "stderr_regret", "mean_entropy", "stderr_entropy"};
  if (runs.empty()) return t;
  const std::size_t T = runs.front().per_step_regret.size();
  for (std::size_t r = 0; r < T; ++r) {
    std::vector<double> reg, ent;
    for (const auto& run : runs) {
      if (run.per_step_regret.size() != T) throw std::invalid_argument("aggregate: runs have different lengths");
      reg.push_back(run.per_step_regret[r]);
      ent.push_back(run.entropy[r]);
    }
    t.rows.push_back({std::string(policy_name(policy)), std::to_string(r + 1), std::to_string(runs.size()),
                      format_real(mean(reg)), format_real(standard_error(reg)), format_real(mean(ent)),
                      format_real(standard_error(ent))});
  }
  return t;
}

}  // namespace impatient
