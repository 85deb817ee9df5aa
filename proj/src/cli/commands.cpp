#include <charconv>
#include <iostream>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "impatient/analysis.hpp"
#include "impatient/cli.hpp"
#include "impatient/corpus_io.hpp"
#include "impatient/prior_io.hpp"
#include "impatient/prior_training.hpp"
#include "impatient/table_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace impatient::cli {

namespace {

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& known) {
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) {
      throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
    }
  }
}

const json& object_at(const json& root, const std::string& key) {
  const json& v = root.at(key);
  if (!v.is_object()) throw ConfigError("'" + key + "' must be an object");
  return v;
}

template <typename T>
void read_field(const json& obj, const std::string& where, const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  const std::string name = where.empty() ? key : where + "." + key;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError("'" + name + "' must be a boolean");
      out = v.get<bool>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("'" + name + "' must be a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError("'" + name + "' must be an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) {
          out = v.get<T>();
        } else {
          throw ConfigError("'" + name + "' must be a nonnegative integer");
        }
      } else {
        out = v.get<T>();
      }
    } else {
      if (!v.is_number()) throw ConfigError("'" + name + "' must be a number");
      out = v.get<T>();
    }
  } catch (const json::exception&) {
    throw ConfigError("'" + name + "' is out of range");
  }
}

GeneratorConfig parse_generator(const json& g) {
  static const std::set<std::string> keys{
      "K",          "base_level",       "decay_rate", "weekly_amplitude",  "weekly_jitter",
      "cross_show_spread", "drift_ratio", "drift_persistence", "hook_scale", "hook_decay",
      "user_effect_scale", "ar_coefficient", "ar_scale", "seed"};
  reject_unknown(g, "generator", keys);
  GeneratorConfig c;
  read_field(g, "generator", "K", c.K);
  read_field(g, "generator", "base_level", c.base_level);
  read_field(g, "generator", "decay_rate", c.decay_rate);
  read_field(g, "generator", "weekly_amplitude", c.weekly_amplitude);
  read_field(g, "generator", "weekly_jitter", c.weekly_jitter);
  read_field(g, "generator", "cross_show_spread", c.cross_show_spread);
  read_field(g, "generator", "drift_ratio", c.drift_ratio);
  read_field(g, "generator", "drift_persistence", c.drift_persistence);
  read_field(g, "generator", "hook_scale", c.hook_scale);
  read_field(g, "generator", "hook_decay", c.hook_decay);
  read_field(g, "generator", "user_effect_scale", c.user_effect_scale);
  read_field(g, "generator", "ar_coefficient", c.ar_coefficient);
  read_field(g, "generator", "ar_scale", c.ar_scale);
  read_field(g, "generator", "seed", c.seed);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

EpisodeConfig episode_for(const RunConfig& cfg, PolicyKind kind, std::uint64_t seed) {
  EpisodeConfig e;
  e.n_arms = cfg.n_arms;
  e.batch_size = cfg.batch_size;
  e.rounds = cfg.rounds;
  e.changing_set = cfg.changing_set;
  e.policy = kind;
  e.seed = seed;
  return e;
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(root, "",
                 {"generator", "data", "prior_source", "episode", "analysis", "output_dir", "seeds"});

  RunConfig cfg;
  if (root.contains("generator")) cfg.generator = parse_generator(object_at(root, "generator"));

  if (root.contains("data")) {
    const json& d = object_at(root, "data");
    reject_unknown(d, "data", {"n_shows", "traces_per_show"});
    read_field(d, "data", "n_shows", cfg.n_shows);
    read_field(d, "data", "traces_per_show", cfg.traces_per_show);
    if (cfg.n_shows < 2) throw ConfigError("'data.n_shows' must be >= 2");
    if (cfg.traces_per_show < 1) throw ConfigError("'data.traces_per_show' must be >= 1");
  }

  read_field(root, "", "prior_source", cfg.prior_source);
  if (cfg.prior_source.empty()) throw ConfigError("'prior_source' must be \"fit\" or a path");
  if (cfg.prior_source != "fit") cfg.prior_source = resolve(base_dir, cfg.prior_source).string();

  if (root.contains("episode")) {
    const json& e = object_at(root, "episode");
    reject_unknown(e, "episode", {"n_arms", "batch_size", "rounds", "changing_set", "policy"});
    read_field(e, "episode", "n_arms", cfg.n_arms);
    read_field(e, "episode", "batch_size", cfg.batch_size);
    read_field(e, "episode", "rounds", cfg.rounds);
    read_field(e, "episode", "changing_set", cfg.changing_set);
    read_field(e, "episode", "policy", cfg.policy);
  }
  try {
    episode_for(cfg, PolicyKind::progressive, 0).validate();
  } catch (const std::invalid_argument& ex) {
    throw ConfigError(ex.what());
  }
  parse_policy_list(cfg.policy);

  if (root.contains("analysis")) {
    const json& a = object_at(root, "analysis");
    reject_unknown(a, "analysis", {"ms", "max_days"});
    if (a.contains("ms")) {
      const json& ms = a.at("ms");
      if (!ms.is_array() || ms.empty()) throw ConfigError("'analysis.ms' must be a nonempty array");
      cfg.analysis_ms.clear();
      for (const auto& m : ms) {
        if (!m.is_number_integer() || m.get<long long>() < 1) {
          throw ConfigError("'analysis.ms' entries must be positive integers");
        }
        cfg.analysis_ms.push_back(m.get<int>());
      }
    }
    read_field(a, "analysis", "max_days", cfg.analysis_max_days);
    if (cfg.analysis_max_days < 0) throw ConfigError("'analysis.max_days' must be >= 0");
  }

  if (root.contains("output_dir")) {
    std::string out;
    read_field(root, "", "output_dir", out);
    if (out.empty()) throw ConfigError("'output_dir' must be a nonempty path");
    cfg.output_dir = resolve(base_dir, out);
  }

  if (root.contains("seeds")) {
    const json& s = root.at("seeds");
    if (!s.is_array()) throw ConfigError("'seeds' must be an array of integers");
    for (const auto& v : s) {
      if (!v.is_number_unsigned()) throw ConfigError("'seeds' entries must be nonnegative integers");
      cfg.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text, path.parent_path());
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t end = std::min(csv.find(',', start), csv.size());
    const std::string item = csv.substr(start, end - start);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("--seeds: '" + item + "' is not a nonnegative integer");
    }
    seeds.push_back(v);
    start = end + 1;
  }
  return seeds;
}

std::vector<PolicyKind> parse_policy_list(const std::string& name) {
  if (name == "all") {
    return {PolicyKind::progressive, PolicyKind::delayed, PolicyKind::day_two_proxy, PolicyKind::oracle};
  }
  try {
    return {parse_policy(name)};
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("policy: ") + e.what());
  }
}

void cmd_gen_data(const RunConfig& cfg, const fs::path& out) {
  for (const auto seed : cfg.seeds) {
    GeneratorConfig g = cfg.generator;
    g.seed = seed;
    const Dataset ds = Generator(g).gen_dataset(cfg.n_shows, cfg.traces_per_show);
    const fs::path dir = out / ("seed-" + std::to_string(seed));
    fs::create_directories(dir);
    write_corpus(dir / "corpus.jsonl", ds.histories);
    write_ground_truth(dir / "ground_truth.jsonl", ds.truths);
  }
}

void cmd_train_prior(const fs::path& corpus, const fs::path& out, const std::string& weights) {
  const auto histories = read_corpus(corpus);
  if (histories.empty()) throw TooFewShows("corpus has no shows");
  const int K = histories.front().traces.front().size();
  Vector w = Vector::Ones(K);
  if (weights == "fit") {
    w = fit_weights(histories);
  } else if (weights != "ones") {
    throw ConfigError("--weights must be 'ones' or 'fit'");
  }
  const PriorModel prior = fit_prior(histories, default_delays(K), w);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_prior(prior, out);
}

PriorModel resolve_prior(const RunConfig& cfg) {
  if (cfg.prior_source != "fit") return load_prior(cfg.prior_source);
  const Dataset ds = Generator(cfg.generator).gen_dataset(cfg.n_shows, cfg.traces_per_show);
  return fit_prior(ds.histories, default_delays(cfg.generator.K), Vector::Ones(cfg.generator.K));
}

void cmd_run_bandit(const RunConfig& cfg, const std::vector<PolicyKind>& policies, const fs::path& out) {
  const PriorModel prior = resolve_prior(cfg);
  if (prior.K() != cfg.generator.K) {
    throw DimensionMismatch("prior has K = " + std::to_string(prior.K()) + " but generator.K = " +
                            std::to_string(cfg.generator.K));
  }
  const SyntheticEnvironment base(cfg.generator, cfg.n_arms);
  for (const auto kind : policies) {
    const fs::path dir = out / std::string(policy_name(kind));
    fs::create_directories(dir);
    std::vector<EpisodeMetrics> runs;
    for (const auto seed : cfg.seeds) {
      SyntheticEnvironment env = base;
      runs.push_back(run_episode(episode_for(cfg, kind, seed), prior, env));
      const std::string run_id = std::string(policy_name(kind)) + "-seed-" + std::to_string(seed);
      const std::string stem = "seed-" + std::to_string(seed);
      write_atomic(dir / (stem + "-metrics.csv"), to_csv(metrics_table(run_id, kind, seed, runs.back())));
      write_atomic(dir / (stem + "-actions.csv"), to_csv(action_count_table(run_id, kind, seed, runs.back())));
    }
    write_atomic(dir / "aggregate.csv", to_csv(aggregate_table(kind, runs)));
  }
}

void cmd_analyze(const fs::path& prior_path, const fs::path& corpus, const fs::path& out,
                 const std::vector<int>& ms, int max_days) {
  const PriorModel prior = load_prior(prior_path);
  const auto shows = read_corpus(corpus, prior.K());
  fs::create_directories(out);

  write_atomic(out / "sigma_curve.csv", to_csv(curve_table(variance_explained(prior.sigma, prior.weights))));
  write_atomic(out / "sigma_baseline.csv",
               to_csv(curve_table(uncorrelated_baseline(prior.sigma, prior.weights))));
  write_atomic(out / "v_curve.csv", to_csv(curve_table(variance_explained(prior.v_noise, prior.weights))));
  write_atomic(out / "v_baseline.csv", to_csv(curve_table(uncorrelated_baseline(prior.v_noise, prior.weights))));

  std::vector<int> days(static_cast<std::size_t>(max_days) + 1);
  for (int t = 0; t <= max_days; ++t) days[static_cast<std::size_t>(t)] = t;
  write_atomic(out / "mae.csv", to_csv(mae_table(mae_grid(prior, shows, ms, days))));

  export_covariances(prior, out);
}

int run(int argc, char** argv) {
  CLI::App app{"Progressive-feedback bandit experiments"};
  app.require_subcommand(1);

  std::string config, seeds_csv, out, policy, corpus, prior, weights = "ones";

  auto* gen = app.add_subcommand("gen-data", "Generate synthetic corpora and ground truth, one per seed");
  gen->add_option("--config", config, "Run config (JSON)")->required();
  gen->add_option("--seeds", seeds_csv, "Comma-separated seeds, overriding the config");
  gen->add_option("--out", out, "Output directory, overriding output_dir");

  auto* train = app.add_subcommand("train-prior", "Fit a prior from a corpus");
  train->add_option("--corpus", corpus, "Corpus (JSONL)")->required();
  train->add_option("--out", out, "Prior file to write")->required();
  train->add_option("--weights", weights, "'ones' or 'fit'");

  auto* bandit = app.add_subcommand("run-bandit", "Run bandit episodes");
  bandit->add_option("--config", config, "Run config (JSON)")->required();
  bandit->add_option("--policy", policy, "progressive, delayed, day_two_proxy, oracle or all");
  bandit->add_option("--seeds", seeds_csv, "Comma-separated seeds, overriding the config");
  bandit->add_option("--out", out, "Output directory, overriding output_dir");

  auto* analyze = app.add_subcommand("analyze", "Variance curves, MAE grid and covariance export");
  analyze->add_option("--prior", prior, "Prior file")->required();
  analyze->add_option("--corpus", corpus, "Corpus (JSONL)")->required();
  analyze->add_option("--config", config, "Run config; supplies analysis settings and output_dir");
  analyze->add_option("--out", out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  // Everything up to the start of the actual work is a config error.
  int stage = kExitConfig;
  try {
    auto output_dir = [&](const RunConfig& cfg) -> fs::path {
      if (!out.empty()) return out;
      if (cfg.output_dir) return *cfg.output_dir;
      throw ConfigError("'output_dir' is missing (set it in the config or pass --out)");
    };
    auto seeds_of = [&](RunConfig& cfg) {
      if (!seeds_csv.empty()) cfg.seeds = parse_seed_list(seeds_csv);
      if (cfg.seeds.empty()) throw ConfigError("'seeds' is empty (set it in the config or pass --seeds)");
    };

    if (gen->parsed()) {
      RunConfig cfg = load_run_config(config);
      seeds_of(cfg);
      const fs::path dir = output_dir(cfg);
      stage = kExitRuntime;
      cmd_gen_data(cfg, dir);
    } else if (train->parsed()) {
      if (weights != "ones" && weights != "fit") throw ConfigError("--weights must be 'ones' or 'fit'");
      stage = kExitRuntime;
      cmd_train_prior(corpus, out, weights);
    } else if (bandit->parsed()) {
      RunConfig cfg = load_run_config(config);
      seeds_of(cfg);
      const auto policies = parse_policy_list(policy.empty() ? cfg.policy : policy);
      const fs::path dir = output_dir(cfg);
      stage = kExitRuntime;
      cmd_run_bandit(cfg, policies, dir);
    } else if (analyze->parsed()) {
      RunConfig cfg = config.empty() ? RunConfig{} : load_run_config(config);
      const fs::path dir = output_dir(cfg);
      stage = kExitRuntime;
      cmd_analyze(prior, corpus, dir, cfg.analysis_ms, cfg.analysis_max_days);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << (stage == kExitConfig ? "config error: " : "error: ") << e.what() << '\n';
    return stage;
  }
  return kExitOk;
}

}  // namespace impatient::cli
