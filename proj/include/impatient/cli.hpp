#pragma once

// Experiment harness behind the `impatient` executable.
//
// Config file (JSON):
//   {
//     "generator":    { GeneratorConfig fields, all optional },
//     "data":         { "n_shows": 200, "traces_per_show": 2000 },
//     "prior_source": "fit" | "path/to/prior.json",
//     "episode":      { "n_arms": 50, "batch_size": 30, "rounds": 180,
//                       "changing_set": false, "policy": "all" },
//     "analysis":     { "ms": [10, 100, 1000], "max_days": 59 },
//     "output_dir":   "out",
//     "seeds":        [0, 1, 2]
//   }
// Relative paths are resolved against the directory holding the config.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "impatient/bandit.hpp"
#include "impatient/errors.hpp"
#include "impatient/synthetic.hpp"

namespace impatient::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

// Bad or missing configuration; the message names the offending key.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  GeneratorConfig generator;
  int n_shows = 200;
  int traces_per_show = 2000;
  std::string prior_source = "fit";  // "fit" or a resolved path
  int n_arms = 50;
  int batch_size = 30;
  int rounds = 180;
  bool changing_set = false;
  std::string policy = "all";  // a policy name or "all"
  std::vector<int> analysis_ms{10, 100, 1000};
  int analysis_max_days = 59;
  std::optional<std::filesystem::path> output_dir;
  std::vector<std::uint64_t> seeds;
};

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// "0,1,2" -> {0, 1, 2}; throws ConfigError.
std::vector<std::uint64_t> parse_seed_list(const std::string& csv);

// "all" -> every policy; otherwise a single name. Throws ConfigError.
std::vector<PolicyKind> parse_policy_list(const std::string& name);

// <out>/seed-<s>/corpus.jsonl and ground_truth.jsonl for every seed, the
// seed replacing generator.seed.
void cmd_gen_data(const RunConfig& cfg, const std::filesystem::path& out);

// Fits mu, Sigma, V with default delays. weights: "ones" or "fit" (least
// squares on the corpus targets).
void cmd_train_prior(const std::filesystem::path& corpus, const std::filesystem::path& out,
                     const std::string& weights = "ones");

// Per policy: <out>/<policy>/seed-<s>-metrics.csv, seed-<s>-actions.csv
// and aggregate.csv.
void cmd_run_bandit(const RunConfig& cfg, const std::vector<PolicyKind>& policies,
                    const std::filesystem::path& out);

// Under <out>: sigma_curve.csv, v_curve.csv and their uncorrelated
// sigma_baseline.csv / v_baseline.csv, mae.csv, sigma.csv and v_noise.csv.
void cmd_analyze(const std::filesystem::path& prior, const std::filesystem::path& corpus,
                 const std::filesystem::path& out, const std::vector<int>& ms, int max_days);

// The prior a run uses: loaded from prior_source, or fitted on a corpus
// generated from cfg.generator when prior_source is "fit".
PriorModel resolve_prior(const RunConfig& cfg);

// Entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace impatient::cli
