#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include "impatient/analysis.hpp"
#include "impatient/cli.hpp"
#include "impatient/corpus_io.hpp"
#include "impatient/prior_io.hpp"

using namespace impatient;
namespace fs = std::filesystem;

namespace {

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "impatient");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::run(static_cast<int>(argv.size()), argv.data());
}

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("impatient-cli-" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

// Every regular file under `dir`, by relative path.
std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path());
  }
  return out;
}

const char* kSmallConfig = R"({
  "generator": {"K": 59, "seed": 5},
  "data": {"n_shows": 6, "traces_per_show": 40},
  "episode": {"n_arms": 5, "batch_size": 3, "rounds": 180},
  "analysis": {"ms": [5, 10, 20]},
  "output_dir": "out",
  "seeds": [0, 1]
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    auto c = cli::parse_run_config("{}");
    CHECK(c.n_arms == 50);
    CHECK(c.batch_size == 30);
    CHECK(c.rounds == 180);
    CHECK(c.prior_source == "fit");
    CHECK(c.analysis_ms == std::vector<int>{10, 100, 1000});
    CHECK_FALSE(c.output_dir.has_value());
  }
  SUBCASE("paths resolve against the config directory") {
    auto c = cli::parse_run_config(R"({"output_dir": "o", "prior_source": "p.json"})", "/base");
    CHECK(*c.output_dir == fs::path("/base/o"));
    CHECK(c.prior_source == "/base/p.json");
    auto abs = cli::parse_run_config(R"({"output_dir": "/abs"})", "/base");
    CHECK(*abs.output_dir == fs::path("/abs"));
  }
  SUBCASE("unknown keys are named") {
    try {
      cli::parse_run_config(R"({"episode": {"n_armz": 3}})");
      FAIL("expected a config error");
    } catch (const cli::ConfigError& e) {
      CHECK(std::string(e.what()).find("episode.n_armz") != std::string::npos);
    }
  }
  SUBCASE("type and range errors") {
    CHECK_THROWS_AS(cli::parse_run_config(R"({"episode": {"rounds": "many"}})"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(R"({"episode": {"n_arms": 1}})"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(R"({"generator": {"ar_coefficient": 1.5}})"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(R"({"seeds": [-1]})"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config(R"({"episode": {"policy": "greedy"}})"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_run_config("[1, 2"), cli::ConfigError);
  }
  SUBCASE("seed and policy lists") {
    CHECK(cli::parse_seed_list("3,1,4") == std::vector<std::uint64_t>{3, 1, 4});
    CHECK_THROWS_AS(cli::parse_seed_list("3,,4"), cli::ConfigError);
    CHECK_THROWS_AS(cli::parse_seed_list("x"), cli::ConfigError);
    CHECK(cli::parse_policy_list("all").size() == 4);
    CHECK(cli::parse_policy_list("oracle") == std::vector<PolicyKind>{PolicyKind::oracle});
  }
}

TEST_CASE("exit codes") {
  auto d = fresh_dir("exit");
  write(d / "no_out.json", R"({"seeds": [1]})");
  write(d / "unknown.json", R"({"sedes": [1]})");
  write(d / "ok.json", kSmallConfig);
  CHECK(invoke({}) == cli::kExitConfig);
  CHECK(invoke({"--help"}) == cli::kExitOk);
  CHECK(invoke({"gen-data", "--config", (d / "no_out.json").string()}) == cli::kExitConfig);
  CHECK(invoke({"gen-data", "--config", (d / "unknown.json").string()}) == cli::kExitConfig);
  CHECK(invoke({"gen-data", "--config", (d / "missing.json").string()}) == cli::kExitConfig);
  CHECK(invoke({"gen-data", "--config", (d / "ok.json").string(), "--seeds", "1,a"}) == cli::kExitConfig);
  CHECK(invoke({"run-bandit", "--config", (d / "ok.json").string(), "--policy", "greedy"}) == cli::kExitConfig);
  CHECK(invoke({"train-prior", "--corpus", (d / "nope.jsonl").string(), "--out", (d / "p.json").string()}) ==
        cli::kExitRuntime);
  CHECK(invoke({"train-prior", "--corpus", (d / "nope.jsonl").string(), "--out", (d / "p.json").string(),
                "--weights", "median"}) == cli::kExitConfig);
  fs::remove_all(d);
}

TEST_CASE("train-prior on a two-show corpus") {
  auto d = fresh_dir("train");
  write(d / "corpus.jsonl",
        "{\"show_id\": \"b\", \"trace\": [0,0]}\n"
        "{\"show_id\": \"a\", \"trace\": [1,0]}\n"
        "{\"show_id\": \"b\", \"trace\": [0,0]}\n"
        "{\"show_id\": \"a\", \"trace\": [1,1]}\n");
  REQUIRE(invoke({"train-prior", "--corpus", (d / "corpus.jsonl").string(), "--out", (d / "prior.json").string()}) ==
          0);
  auto p = load_prior(d / "prior.json");
  CHECK(p.mu(0) == 0.5);
  CHECK(p.mu(1) == 0.25);
  CHECK(p.sigma(0, 0) == 0.25);
  CHECK(p.sigma(0, 1) == 0.125);
  CHECK(p.sigma(1, 1) == 0.0625);
  CHECK(p.v_noise(1, 1) == 0.125);
  CHECK(p.v_noise(0, 0) == 0.0);
  CHECK(p.weights == Vector::Ones(2));
  CHECK(p.delays == std::vector<int>{2, 3});
  CHECK(prior_to_json(load_prior(d / "prior.json")) == read_file(d / "prior.json"));

  write(d / "one.jsonl", "{\"show_id\": \"a\", \"trace\": [1,0]}\n");
  CHECK(invoke({"train-prior", "--corpus", (d / "one.jsonl").string(), "--out", (d / "p1.json").string()}) ==
        cli::kExitRuntime);
  CHECK_FALSE(fs::exists(d / "p1.json"));
  fs::remove_all(d);
}

TEST_CASE("run-bandit writes one file per seed plus an aggregate") {
  auto d = fresh_dir("bandit");
  write(d / "cfg.json", kSmallConfig);
  std::string seeds = "0,1,2,3,4,5,6,7,8,9";
  REQUIRE(invoke({"run-bandit", "--config", (d / "cfg.json").string(), "--policy", "progressive", "--seeds", seeds}) ==
          0);
  const auto dir = d / "out" / "progressive";
  for (int s = 0; s < 10; ++s) {
    auto t = read_csv(dir / ("seed-" + std::to_string(s) + "-metrics.csv"));
    CHECK(t.rows.size() == 180);
    CHECK(t.header == std::vector<std::string>{"run_id", "policy", "seed", "round", "per_step_regret", "entropy"});
    CHECK(read_csv(dir / ("seed-" + std::to_string(s) + "-actions.csv")).rows.size() == 180);
  }
  auto agg = read_csv(dir / "aggregate.csv");
  CHECK(agg.rows.size() == 180);
  CHECK(agg.rows[0][agg.column("runs")] == "10");

  const auto first = snapshot(d / "out");
  CHECK(first.size() == 21);
  REQUIRE(invoke({"run-bandit", "--config", (d / "cfg.json").string(), "--policy", "progressive", "--seeds", seeds}) ==
          0);
  CHECK(snapshot(d / "out") == first);
  fs::remove_all(d);
}

TEST_CASE("gen-data, train-prior and analyze chain") {
  auto d = fresh_dir("chain");
  write(d / "cfg.json", kSmallConfig);
  REQUIRE(invoke({"gen-data", "--config", (d / "cfg.json").string()}) == 0);
  const auto corpus = d / "out" / "seed-0" / "corpus.jsonl";
  auto shows = read_corpus(corpus);
  CHECK(shows.size() == 6);
  std::size_t records = 0;
  for (const auto& s : shows) records += s.traces.size();
  CHECK(records == 240);
  CHECK(fs::exists(d / "out" / "seed-1" / "ground_truth.jsonl"));

  REQUIRE(invoke({"train-prior", "--corpus", corpus.string(), "--out", (d / "prior.json").string()}) == 0);
  REQUIRE(invoke({"analyze", "--prior", (d / "prior.json").string(), "--corpus", corpus.string(), "--out",
                  (d / "an").string(), "--config", (d / "cfg.json").string()}) == 0);
  for (const char* f : {"sigma_curve.csv", "sigma_baseline.csv", "v_curve.csv", "v_baseline.csv"}) {
    auto t = read_csv(d / "an" / f);
    REQUIRE(t.rows.size() == 60);
    CHECK(parse_real(t.rows.front()[1]) == 0.0);
    CHECK(std::abs(parse_real(t.rows.back()[1]) - 1.0) <= 1e-9);
  }
  auto mae = read_csv(d / "an" / "mae.csv");
  CHECK(mae.rows.size() == 3 * 60);
  auto p = load_prior(d / "prior.json");
  CHECK(matrix_from_table(read_csv(d / "an" / "sigma.csv")) == p.sigma);
  CHECK(matrix_from_table(read_csv(d / "an" / "v_noise.csv")) == p.v_noise);
  fs::remove_all(d);
}

}  // TEST_SUITE
