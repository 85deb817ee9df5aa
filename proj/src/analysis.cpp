#include "impatient/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "impatient/bandit.hpp"
#include "impatient/errors.hpp"
#include "impatient/stats.hpp"

namespace impatient {

VarianceCurve variance_explained(const Matrix& cov, const Vector& weights) {
  const auto K = cov.rows();
  if (cov.cols() != K || weights.size() != K) throw DimensionMismatch("variance_explained: shape mismatch");

  Matrix c = cov;
  symmetrize(c);
  Vector c_y = c * weights;  // cov(x, w'x)
  const double total = weights.dot(c_y);
  if (!(total > 0.0)) throw NonInvertible("variance_explained: w' cov w is not positive");

  const double tol = 1e-12 * std::max(c.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  VarianceCurve curve;
  curve.explained.reserve(static_cast<std::size_t>(K) + 1);
  curve.explained.push_back(0.0);
  double v_y = total;
  for (Eigen::Index j = 0; j < K; ++j) {
    const double d = c(j, j);
    if (d > tol) {
      const Vector col = c.col(j);
      const double cy = c_y(j);
      c.noalias() -= col * (col.transpose() / d);
      c_y -= col * (cy / d);
      v_y -= cy * cy / d;
    }
    v_y = std::max(v_y, 0.0);
    curve.explained.push_back(1.0 - v_y / total);
  }
  return curve;
}

VarianceCurve uncorrelated_baseline(const Matrix& cov, const Vector& weights) {
  if (cov.rows() != cov.cols()) throw DimensionMismatch("uncorrelated_baseline: matrix is not square");
  const Matrix diag = cov.diagonal().asDiagonal();
  return variance_explained(diag, weights);
}

int observed_after_days(int days, std::span<const int> delays) {
  if (days <= 0 || delays.empty()) return 0;
  return revealed_length(delays.front() + days - 1, delays);
}

namespace {

struct ShowSummary {
  Vector head_mean;   // mean of the first M traces
  double holdout = 0; // empirical stickiness of the rest
};

ShowSummary summarize(const ShowHistory& h, int M, int K) {
  if (static_cast<int>(h.traces.size()) <= M) {
    throw InsufficientTraces("show '" + h.show_id + "' has " + std::to_string(h.traces.size()) +
                             " traces, need more than " + std::to_string(M));
  }
  ShowSummary s;
  s.head_mean = Vector::Zero(K);
  for (int m = 0; m < M; ++m) {
    if (h.traces[m].size() != K) throw DimensionMismatch("mae: trace length differs from K");
    s.head_mean += h.traces[m].values;
  }
  s.head_mean /= static_cast<double>(M);
  double sum = 0.0;
  for (std::size_t m = static_cast<std::size_t>(M); m < h.traces.size(); ++m) sum += h.traces[m].values.sum();
  s.holdout = sum / static_cast<double>(h.traces.size() - static_cast<std::size_t>(M));
  return s;
}

MaeResult finish(std::vector<double> errors) {
  MaeResult r;
  r.mae = mean(errors);
  r.std_error = standard_error(errors);
  r.abs_errors = std::move(errors);
  return r;
}

}  // namespace

std::vector<MaeCell> mae_grid(const PriorModel& prior, std::span<const ShowHistory> shows,
                              std::span<const int> Ms, std::span<const int> days) {
  const int K = prior.K();
  const Vector ones = Vector::Ones(K);
  const auto prior_belief = GaussianBelief::from_prior(prior);

  std::vector<MaeCell> cells;
  for (int M : Ms) {
    if (M < 1) throw std::invalid_argument("mae: M must be >= 1");
    std::vector<std::vector<double>> errors(days.size());
    for (const auto& h : shows) {
      const auto s = summarize(h, M, K);
      for (std::size_t d = 0; d < days.size(); ++d) {
        const int len = observed_after_days(days[d], prior.delays);
        const auto post = len == 0 ? prior_belief : condition_on_group(prior_belief, prior, s.head_mean, len, M);
        errors[d].push_back(std::abs(ones.dot(post.mean) - s.holdout));
      }
    }
    for (std::size_t d = 0; d < days.size(); ++d) cells.push_back({M, days[d], finish(std::move(errors[d]))});
  }
  return cells;
}

MaeResult mae_eval(const PriorModel& prior, std::span<const ShowHistory> shows, int M, int days) {
  const int Ms[] = {M};
  const int ds[] = {days};
  return mae_grid(prior, shows, Ms, ds).front().result;
}

Table matrix_table(const Matrix& m) {
  Table t;
  for (Eigen::Index c = 0; c < m.cols(); ++c) t.header.push_back("day_" + std::to_string(c + 1));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<std::string> row;
    row.reserve(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(format_real(m(r, c)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Matrix matrix_from_table(const Table& t) {
  const auto cols = static_cast<Eigen::Index>(t.header.size());
  Matrix m(static_cast<Eigen::Index>(t.rows.size()), cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = parse_real(t.rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
    }
  }
  return m;
}

void export_covariances(const PriorModel& prior, const std::filesystem::path& dir) {
  write_atomic(dir / "sigma.csv", to_csv(matrix_table(prior.sigma)));
  write_atomic(dir / "v_noise.csv", to_csv(matrix_table(prior.v_noise)));
}

Table curve_table(const VarianceCurve& curve) {
  Table t;
  t.header = {"t", "value", "stderr"};
  for (std::size_t i = 0; i < curve.explained.size(); ++i) {
    t.rows.push_back({std::to_string(i), format_real(curve.explained[i]), "0"});
  }
  return t;
}

Table mae_table(std::span<const MaeCell> cells) {
  Table t;
  t.header = {"M", "t", "value", "stderr"};
  for (const auto& c : cells) {
    t.rows.push_back({std::to_string(c.M), std::to_string(c.days), format_real(c.result.mae),
                      format_real(c.result.std_error)});
  }
  return t;
}

double lag_correlation(std::span<const double> xs, int lag) {
  const auto n = static_cast<int>(xs.size()) - lag;
  if (lag < 0 || n < 2) throw std::invalid_argument("lag_correlation: lag too large");
  const auto a = xs.subspan(0, static_cast<std::size_t>(n));
  const auto b = xs.subspan(static_cast<std::size_t>(lag), static_cast<std::size_t>(n));
  const double ma = mean(a), mb = mean(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (int i = 0; i < n; ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace impatient
