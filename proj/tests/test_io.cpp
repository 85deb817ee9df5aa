#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "impatient/corpus_io.hpp"
#include "impatient/errors.hpp"
#include "impatient/prior_io.hpp"
#include "impatient/stats.hpp"
#include "impatient/table_io.hpp"
#include "support.hpp"

using namespace impatient;

namespace {

// P(U <= u) by enumerating every split of the pooled sample.
double brute_p_less(const std::vector<double>& lo, const std::vector<double>& hi) {
  std::vector<double> all(lo);
  all.insert(all.end(), hi.begin(), hi.end());
  const int n = static_cast<int>(all.size()), m = static_cast<int>(lo.size());
  auto u_of = [&](const std::vector<bool>& pick) {
    double u = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (pick[i] && !pick[j]) u += all[i] > all[j] ? 1.0 : all[i] == all[j] ? 0.5 : 0.0;
    return u;
  };
  std::vector<bool> observed(n, false);
  std::fill(observed.begin(), observed.begin() + m, true);
  const double u_obs = u_of(observed);
  std::vector<bool> pick(n, false);
  std::fill(pick.end() - m, pick.end(), true);
  double below = 0, total = 0;
  do {
    total += 1;
    below += u_of(pick) <= u_obs + 1e-12;
  } while (std::next_permutation(pick.begin(), pick.end()));
  return below / total;
}

std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("impatient-io-" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("rank-sum test against enumeration") {
  Rng rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> a, b;
    for (int i = 0; i < 4 + rep % 3; ++i) a.push_back(n(rng));
    for (int i = 0; i < 5; ++i) b.push_back(n(rng) + 0.5);
    CHECK(rank_sum_p_less(a, b) == doctest::Approx(brute_p_less(a, b)).epsilon(1e-12));
  }
  std::vector<double> lo{1, 2, 3, 4, 5, 6, 7, 8, 9, 10}, hi{11, 12, 13, 14, 15, 16, 17, 18, 19, 20};
  CHECK(rank_sum_p_less(lo, hi) == doctest::Approx(1.0 / 184756.0).epsilon(1e-9));
  CHECK(rank_sum_p_less(hi, lo) == doctest::Approx(1.0));

  // ties fall back to the normal approximation
  std::vector<double> t1{0, 0, 1, 1, 1, 2, 2}, t2{1, 2, 2, 3, 3, 3, 4};
  const double p = rank_sum_p_less(t1, t2);
  CHECK(p > 0.0);
  CHECK(p < 0.05);
  CHECK(std::abs(p - brute_p_less(t1, t2)) < 0.02);
}

TEST_CASE("mean and standard error") {
  std::vector<double> xs{1, 2, 3, 4};
  CHECK(mean(xs) == 2.5);
  CHECK(standard_error(xs) == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(standard_error(std::vector<double>{3}) == 0.0);
}

TEST_CASE("real formatting round-trips") {
  Rng rng(2);
  std::normal_distribution<double> n(0.0, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = n(rng) * std::pow(10.0, static_cast<int>(rng() % 20) - 10);
    CHECK(parse_real(format_real(v)) == v);
  }
  CHECK_THROWS_AS(parse_real("1.5x"), FormatError);
  CHECK_THROWS_AS(parse_real(""), FormatError);
}

TEST_CASE("csv round trip and errors") {
  Table t;
  t.header = {"a", "b"};
  t.rows = {{"1", "x"}, {"2", "y"}};
  auto back = parse_csv(to_csv(t));
  CHECK(back.header == t.header);
  CHECK(back.rows == t.rows);
  CHECK(back.column("b") == 1);
  CHECK(back.column("c") == -1);
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), FormatError);
  CHECK_THROWS_AS(parse_csv(""), FormatError);
}

TEST_CASE("atomic writes leave no temp files") {
  auto d = scratch("atomic");
  write_atomic(d / "f.txt", "one");
  write_atomic(d / "f.txt", "two");
  CHECK(read_file(d / "f.txt") == "two");
  int files = 0;
  for ([[maybe_unused]] auto& e : std::filesystem::directory_iterator(d)) ++files;
  CHECK(files == 1);
  CHECK_THROWS_AS(write_atomic(d / "missing" / "f.txt", "x"), IoError);
  CHECK_THROWS_AS(read_file(d / "nope"), IoError);
  std::filesystem::remove_all(d);
}

TEST_CASE("corpus round trip") {
  Rng rng(3);
  std::vector<ShowHistory> shows;
  for (int s = 0; s < 3; ++s) {
    ShowHistory h{"show \"" + std::to_string(s) + "\"", {}, std::vector<double>{}};
    for (int m = 0; m < 4; ++m) {
      Trace t;
      t.values = (testing::random_vector(5, rng).array() > 0).cast<double>();
      t.observed_len = 5;
      h.traces.push_back(t);
      h.targets->push_back(0.1 * m - 1.0 / 3.0);
    }
    shows.push_back(h);
  }
  shows[2].targets.reset();
  const auto text = corpus_to_text(shows);
  auto back = parse_corpus(text);
  REQUIRE(back.size() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(back[s].show_id == shows[s].show_id);
    CHECK(back[s].targets.has_value() == shows[s].targets.has_value());
    if (shows[s].targets) CHECK(*back[s].targets == *shows[s].targets);
    for (int m = 0; m < 4; ++m) {
      CHECK(back[s].traces[m].values == shows[s].traces[m].values);
      CHECK(back[s].traces[m].observed_len == 5);
    }
  }
  CHECK(corpus_to_text(back) == text);
}

TEST_CASE("corpus records of one show may interleave") {
  const std::string text =
      "{\"show_id\": \"a\", \"trace\": [1,0]}\n"
      "{\"show_id\": \"b\", \"trace\": [0,0]}\n"
      "\n"
      "{\"show_id\": \"a\", \"trace\": [1,1]}\n";
  auto shows = parse_corpus(text);
  REQUIRE(shows.size() == 2);
  CHECK(shows[0].show_id == "a");
  CHECK(shows[0].traces.size() == 2);
  CHECK(shows[1].traces.size() == 1);
}

TEST_CASE("corpus validation") {
  CHECK_THROWS_AS(parse_corpus("{\"show_id\": \"a\", \"trace\": [1,2]}\n"), FormatError);
  CHECK_THROWS_AS(parse_corpus("{\"show_id\": \"a\", \"trace\": [1,0]}\n{\"show_id\": \"a\", \"trace\": [1]}\n"),
                  FormatError);
  CHECK_THROWS_AS(parse_corpus("{\"show_id\": \"a\", \"trace\": [1,0]}\n", 3), FormatError);
  CHECK_THROWS_AS(parse_corpus("{\"trace\": [1,0]}\n"), FormatError);
  CHECK_THROWS_AS(parse_corpus("not json\n"), FormatError);
  CHECK_THROWS_AS(parse_corpus("{\"show_id\": \"a\", \"trace\": [1,0], \"target\": 1}\n"
                               "{\"show_id\": \"a\", \"trace\": [1,0]}\n"),
                  FormatError);
}

TEST_CASE("prior file round trip is exact") {
  Rng rng(4);
  auto p = testing::random_prior(7, rng);
  p.weights = testing::random_vector(7, rng);
  auto d = scratch("prior");
  save_prior(p, d / "prior.json");
  auto q = load_prior(d / "prior.json");
  CHECK(q.mu == p.mu);
  CHECK(q.sigma == p.sigma);
  CHECK(q.v_noise == p.v_noise);
  CHECK(q.weights == p.weights);
  CHECK(q.delays == p.delays);
  CHECK(prior_to_json(q) == prior_to_json(p));
  std::filesystem::remove_all(d);
  CHECK_THROWS_AS(prior_from_json("{\"mu\": [1]}"), FormatError);
  CHECK_THROWS_AS(prior_from_json("[oops"), FormatError);
}

}  // TEST_SUITE
