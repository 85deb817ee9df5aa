#include "impatient/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace impatient {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double standard_error(std::span<const double> xs) {
  const auto n = xs.size();
  if (n < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

namespace {

// P(U <= u) for the Mann-Whitney U statistic of sample sizes (m, n), no ties.
double exact_u_cdf(int m, int n, int u) {
  // f(i, j, s): orderings of i lower and j higher items with U = s. The
  // largest item is either a lower one (beats all j) or a higher one:
  //   f(i, j, s) = f(i - 1, j, s - j) + f(i, j - 1, s).
  const int umax = m * n;
  std::vector<std::vector<double>> prev(static_cast<std::size_t>(m) + 1,
                                        std::vector<double>(static_cast<std::size_t>(umax) + 1, 0.0));
  for (int i = 0; i <= m; ++i) prev[i][0] = 1.0;
  for (int j = 1; j <= n; ++j) {
    auto cur = prev;
    for (int i = 1; i <= m; ++i) {
      for (int s = 0; s <= umax; ++s) {
        double v = prev[i][s];  // f(i, j - 1, s)
        if (s - j >= 0) v += cur[i - 1][s - j];  // f(i - 1, j, s - j)
        cur[i][s] = v;
      }
    }
    prev = std::move(cur);
  }
  double total = 0.0, below = 0.0;
  for (int s = 0; s <= umax; ++s) {
    total += prev[m][s];
    if (s <= u) below += prev[m][s];
  }
  return below / total;
}

}  // namespace

double rank_sum_p_less(std::span<const double> lower, std::span<const double> higher) {
  const auto m = lower.size();
  const auto n = higher.size();
  if (m == 0 || n == 0) throw std::invalid_argument("rank_sum: empty sample");

  // U counts pairs where the "lower" value exceeds the "higher" one (ties 1/2);
  // small U supports H1.
  double u = 0.0;
  bool ties = false;
  for (double a : lower) {
    for (double b : higher) {
      if (a > b) {
        u += 1.0;
      } else if (a == b) {
        u += 0.5;
        ties = true;
      }
    }
  }

  if (!ties && m <= 50 && n <= 50) {
    return exact_u_cdf(static_cast<int>(m), static_cast<int>(n), static_cast<int>(u));
  }

  std::vector<double> all(lower.begin(), lower.end());
  all.insert(all.end(), higher.begin(), higher.end());
  std::sort(all.begin(), all.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j] == all[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double dm = static_cast<double>(m), dn = static_cast<double>(n), N = dm + dn;
  const double var = dm * dn / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (var <= 0.0) return 1.0;
  const double z = (u - dm * dn / 2.0 + 0.5) / std::sqrt(var);  // continuity correction
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace impatient
