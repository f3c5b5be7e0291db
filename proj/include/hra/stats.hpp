#pragma once

// Small-sample hypothesis tests and summaries used to compare runs.

#include <cstddef>
#include <span>
#include <vector>

namespace hra {

double mean(std::span<const double> x);

/// One-sided exact rank-sum (Mann-Whitney) test of "x tends to be smaller
/// than y": the probability, under random relabelling, of a rank sum for x at
/// most the observed one. Ties get mid-ranks. Falls back to the normal
/// approximation when the number of relabellings exceeds `exact_limit`.
double rank_sum_p_less(std::span<const double> x, std::span<const double> y, std::size_t exact_limit = 5'000'000);

/// One-sided sign test of "a beats b" on paired samples: P(Binomial(n, 1/2) >=
/// wins) with ties dropped.
double sign_test_p_greater(std::span<const double> a, std::span<const double> b);

/// Trailing moving average over `window` entries (shorter at the start).
std::vector<double> moving_average(std::span<const double> x, std::size_t window);

}  // namespace hra
