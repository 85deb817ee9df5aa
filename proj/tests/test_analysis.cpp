#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "impatient/analysis.hpp"
#include "impatient/errors.hpp"
#include "support.hpp"

using namespace impatient;
using testing::max_abs;

namespace {

// 1 - w2' (C22 - C21 C11^+ C12) w2 / w'Cw, straight from the block formula.
std::vector<double> schur_curve(const Matrix& c, const Vector& w) {
  const int K = static_cast<int>(c.rows());
  const double total = w.dot(c * w);
  std::vector<double> out{0.0};
  for (int t = 1; t <= K; ++t) {
    const int r = K - t;
    if (r == 0) {
      out.push_back(1.0);
      continue;
    }
    const Matrix c11 = c.topLeftCorner(t, t);
    const Matrix pinv = c11.completeOrthogonalDecomposition().pseudoInverse();
    const Matrix schur = c.bottomRightCorner(r, r) - c.bottomLeftCorner(r, t) * pinv * c.topRightCorner(t, r);
    const Vector w2 = w.tail(r);
    out.push_back(1.0 - w2.dot(schur * w2) / total);
  }
  return out;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("impatient-test-" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("analysis") {

TEST_CASE("equal diagonal gives a straight line") {
  for (int K : {1, 5, 59}) {
    auto c = variance_explained(2.5 * Matrix::Identity(K, K), Vector::Ones(K));
    REQUIRE(c.explained.size() == static_cast<std::size_t>(K) + 1);
    for (int t = 0; t <= K; ++t) CHECK(c.explained[t] == doctest::Approx(double(t) / K).epsilon(1e-14));
  }
}

TEST_CASE("rank one: the first day explains everything") {
  Vector v(4);
  v << 2, -1, 0.5, 3;
  auto c = variance_explained(v * v.transpose(), Vector::Ones(4));
  CHECK(c.explained[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.explained[4] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-day hand example and its baseline") {
  Matrix c(2, 2);
  c << 2, 1, 1, 2;
  auto e = variance_explained(c, Vector::Ones(2));
  CHECK(e.explained[0] == 0.0);
  CHECK(e.explained[1] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(e.explained[2] == doctest::Approx(1.0).epsilon(1e-15));
  auto b = uncorrelated_baseline(c, Vector::Ones(2));
  CHECK(b.explained[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(b.explained[2] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("baseline of a diagonal matrix is the curve itself") {
  Rng rng(1);
  Vector d = testing::random_vector(6, rng).cwiseAbs();
  Matrix c = d.asDiagonal();
  Vector w = testing::random_vector(6, rng);
  auto a = variance_explained(c, w), b = uncorrelated_baseline(c, w);
  for (std::size_t t = 0; t < a.explained.size(); ++t) CHECK(a.explained[t] == b.explained[t]);
}

TEST_CASE("zero total variance is rejected") {
  CHECK_THROWS_AS(variance_explained(Matrix::Zero(3, 3), Vector::Ones(3)), NonInvertible);
  CHECK_THROWS_AS(variance_explained(Matrix::Identity(3, 3), Vector::Ones(2)), DimensionMismatch);
}

TEST_CASE("property: matches the block formula on random PSD input") {
  Rng rng(2);
  for (int rep = 0; rep < 60; ++rep) {
    const int K = 1 + static_cast<int>(rng() % 12);
    const int rank = 1 + static_cast<int>(rng() % K);
    const Matrix c = rep % 2 ? testing::random_spd(K, rng) : testing::random_low_rank(K, rank, rng);
    const Vector w = rep % 3 ? Vector::Ones(K) : testing::random_vector(K, rng);
    const auto got = variance_explained(c, w).explained;
    const auto want = schur_curve(c, w);
    for (int t = 0; t <= K; ++t) CHECK(got[t] == doctest::Approx(want[t]).epsilon(1e-7).scale(1.0));
  }
}

TEST_CASE("property: monotone and anchored, invariant to rescaling") {
  Rng rng(3);
  for (int rep = 0; rep < 200; ++rep) {
    const int K = 1 + static_cast<int>(rng() % 20);
    const int rank = 1 + static_cast<int>(rng() % K);
    const Matrix c = rep % 2 ? testing::random_spd(K, rng, 0.0) : testing::random_low_rank(K, rank, rng);
    const Vector w = Vector::Ones(K);
    const auto e = variance_explained(c, w).explained;
    CHECK(e.front() == 0.0);
    CHECK(std::abs(e.back() - 1.0) <= 1e-9);
    for (int t = 1; t <= K; ++t) CHECK(e[t] >= e[t - 1] - 1e-9);
    const auto s = variance_explained(37.0 * c, w).explained;
    for (int t = 0; t <= K; ++t) CHECK(std::abs(s[t] - e[t]) <= 1e-9);
  }
}

TEST_CASE("days of data map onto revealed entries") {
  const auto d = default_delays(59);
  CHECK(observed_after_days(0, d) == 0);
  CHECK(observed_after_days(1, d) == 1);
  CHECK(observed_after_days(10, d) == 10);
  CHECK(observed_after_days(59, d) == 59);
  CHECK(observed_after_days(80, d) == 59);
  const std::vector<int> slow{3, 3, 6};
  CHECK(observed_after_days(1, slow) == 2);
  CHECK(observed_after_days(3, slow) == 2);
  CHECK(observed_after_days(4, slow) == 3);
}

TEST_CASE("mae_eval") {
  // two shows of K = 2 with hand-checkable numbers
  PriorModel p;
  p.mu = Vector::Constant(2, 0.5);
  p.sigma = 0.1 * Matrix::Identity(2, 2);
  p.v_noise = 0.2 * Matrix::Identity(2, 2);
  p.weights = Vector::Ones(2);
  p.delays = default_delays(2);
  auto tr = [](double a, double b) {
    Trace t;
    t.values = Vector(2);
    t.values << a, b;
    t.observed_len = 2;
    return t;
  };
  std::vector<ShowHistory> shows{{"a", {tr(1, 1), tr(0, 0), tr(1, 0)}, {}}, {"b", {tr(0, 0), tr(1, 1), tr(1, 1)}, {}}};

  SUBCASE("no days observed: prior prediction for any M") {
    for (int M : {1, 2}) {
      auto r = mae_eval(p, shows, M, 0);
      std::vector<double> expect;
      for (const auto& h : shows) {
        double s = 0;
        for (std::size_t m = M; m < h.traces.size(); ++m) s += h.traces[m].values.sum();
        expect.push_back(std::abs(1.0 - s / (h.traces.size() - M)));
      }
      CHECK(r.abs_errors == expect);
      CHECK(r.mae == doctest::Approx((expect[0] + expect[1]) / 2));
    }
  }
  SUBCASE("one day observed, one trace") {
    auto r = mae_eval(p, shows, 1, 1);
    // day-1 gain 0.1 / 0.3; holdouts 0.5 and 2
    const double pred_a = 0.5 + (1.0 - 0.5) / 3.0 + 0.5;
    CHECK(r.abs_errors[0] == doctest::Approx(std::abs(pred_a - 0.5)).epsilon(1e-12));
    const double pred_b = 0.5 - 0.5 / 3.0 + 0.5;
    CHECK(r.abs_errors[1] == doctest::Approx(std::abs(pred_b - 2.0)).epsilon(1e-12));
  }
  SUBCASE("too few traces") { CHECK_THROWS_AS(mae_eval(p, shows, 3, 1), InsufficientTraces); }
  SUBCASE("grid layout") {
    const int Ms[] = {1, 2};
    const int ds[] = {0, 1, 2};
    auto cells = mae_grid(p, shows, Ms, ds);
    CHECK(cells.size() == 6);
    CHECK(mae_table(cells).rows.size() == 6);
    CHECK(cells[4].M == 2);
    CHECK(cells[4].days == 1);
    CHECK(cells[4].result.mae == mae_eval(p, shows, 2, 1).mae);
  }
}

TEST_CASE("covariance export round trip") {
  Rng rng(4);
  PriorModel p;
  const int K = 6;
  p.mu = testing::random_vector(K, rng);
  p.sigma = testing::random_spd(K, rng);
  p.v_noise = testing::random_spd(K, rng);
  p.weights = Vector::Ones(K);
  p.delays = default_delays(K);
  auto dir = scratch_dir("export");
  export_covariances(p, dir);
  CHECK(matrix_from_table(read_csv(dir / "sigma.csv")) == p.sigma);
  CHECK(matrix_from_table(read_csv(dir / "v_noise.csv")) == p.v_noise);
  CHECK(read_csv(dir / "sigma.csv").header.front() == "day_1");

  auto one = p.leading(1);
  export_covariances(one, dir);
  auto t = read_csv(dir / "sigma.csv");
  CHECK(t.header.size() == 1);
  CHECK(t.rows.size() == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("lag correlation") {
  std::vector<double> xs;
  for (int i = 0; i < 70; ++i) xs.push_back(std::cos(2 * M_PI * i / 7.0));
  CHECK(lag_correlation(xs, 7) == doctest::Approx(1.0));
  CHECK(lag_correlation(xs, 7) > lag_correlation(xs, 5));
  CHECK(lag_correlation(xs, 7) > lag_correlation(xs, 9));
  CHECK_THROWS(lag_correlation(xs, 69));
}

TEST_CASE("curve table") {
  auto c = variance_explained(Matrix::Identity(3, 3), Vector::Ones(3));
  auto t = curve_table(c);
  CHECK(t.header == std::vector<std::string>{"t", "value", "stderr"});
  CHECK(t.rows.size() == 4);
  CHECK(parse_real(t.rows[3][1]) == 1.0);
}

}  // TEST_SUITE
