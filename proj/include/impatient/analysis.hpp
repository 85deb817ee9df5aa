#pragma once

// Diagnostics of a trained model: how fast the leading days explain the
// variance of w'z, stickiness prediction error, covariance export.

#include <filesystem>
#include <span>
#include <vector>

#include "impatient/belief.hpp"
#include "impatient/prior_training.hpp"
#include "impatient/synthetic.hpp"
#include "impatient/table_io.hpp"

namespace impatient {

struct VarianceCurve {
  std::vector<double> explained;  // index t = 0..K
};

// explained[t] = 1 - Var[w'x | x_1..x_t] / Var[w'x] for x ~ N(., cov).
// The conditional variance is the Schur complement of the leading t x t
// block; it is built one coordinate at a time, and a coordinate whose
// conditional variance is already zero (relative 1e-12) is skipped, which is
// the pseudo-inverse limit of the Schur complement. Throws NonInvertible if
// w'cov w is not positive.
VarianceCurve variance_explained(const Matrix& cov, const Vector& weights);

// The same curve for diag(cov): no correlation between days.
VarianceCurve uncorrelated_baseline(const Matrix& cov, const Vector& weights);

// Days of data -> number of revealed trace entries: the prefix known
// delays[0] + days - 1 rounds after the action (0 days -> nothing).
int observed_after_days(int days, std::span<const int> delays);

struct MaeResult {
  double mae = 0.0;
  double std_error = 0.0;
  std::vector<double> abs_errors;  // one per show
};

// For each show: the first M traces, truncated to `days` of data, give the
// posterior mean of 1'zbar; the remaining traces give the holdout empirical
// stickiness. Returns the mean absolute error over shows and its standard
// error. Throws InsufficientTraces when a show has <= M traces.
MaeResult mae_eval(const PriorModel& prior, std::span<const ShowHistory> shows, int M, int days);

struct MaeCell {
  int M = 0;
  int days = 0;
  MaeResult result;
};

// The whole (M, days) grid with the per-show work shared across cells.
std::vector<MaeCell> mae_grid(const PriorModel& prior, std::span<const ShowHistory> shows,
                              std::span<const int> Ms, std::span<const int> days);

// Dense K x K table, header day_1..day_K, one row per matrix row.
Table matrix_table(const Matrix& m);
Matrix matrix_from_table(const Table& t);

// Writes <dir>/sigma.csv and <dir>/v_noise.csv.
void export_covariances(const PriorModel& prior, const std::filesystem::path& dir);

Table curve_table(const VarianceCurve& curve);
Table mae_table(std::span<const MaeCell> cells);

// Pearson correlation of (xs[0..n-lag), xs[lag..n)).
double lag_correlation(std::span<const double> xs, int lag);

}  // namespace impatient
