#pragma once

#include <span>

namespace impatient {

double mean(std::span<const double> xs);

// Standard error of the mean (sample sd / sqrt(n)); 0 for n < 2.
double standard_error(std::span<const double> xs);

// One-sided Wilcoxon rank-sum (Mann-Whitney) test of H1: values in `lower`
// tend to be smaller than values in `higher`. Exact null distribution when
// there are no ties and both samples have at most 50 elements; otherwise
// the normal approximation with tie correction.
double rank_sum_p_less(std::span<const double> lower, std::span<const double> higher);

}  // namespace impatient
