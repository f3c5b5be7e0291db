#include "hra/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hra/errors.hpp"

namespace hra {

double mean(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

namespace {

std::vector<double> mid_ranks(const std::vector<double>& pooled) {
  std::vector<std::size_t> order(pooled.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pooled[a] < pooled[b]; });
  std::vector<double> ranks(pooled.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && pooled[order[j + 1]] == pooled[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

double binomial(std::size_t n, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

}  // namespace

double rank_sum_p_less(std::span<const double> x, std::span<const double> y, std::size_t exact_limit) {
  if (x.empty() || y.empty()) throw InvalidArgument("rank-sum test needs two non-empty samples");
  std::vector<double> pooled(x.begin(), x.end());
  pooled.insert(pooled.end(), y.begin(), y.end());
  const std::vector<double> ranks = mid_ranks(pooled);
  const std::size_t n = pooled.size();
  const std::size_t m = x.size();
  double observed = 0.0;
  for (std::size_t i = 0; i < m; ++i) observed += ranks[i];

  const double total = binomial(n, m);
  if (total <= static_cast<double>(exact_limit)) {
    // Enumerate every m-subset of the pooled ranks.
    std::vector<std::size_t> pick(m);
    std::iota(pick.begin(), pick.end(), 0);
    std::size_t at_most = 0;
    std::size_t count = 0;
    const double eps = 1e-9;
    while (true) {
      double w = 0.0;
      for (std::size_t i : pick) w += ranks[i];
      if (w <= observed + eps) ++at_most;
      ++count;
      std::size_t i = m;
      while (i > 0 && pick[i - 1] == n - m + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < m; ++j) pick[j] = pick[j - 1] + 1;
    }
    return static_cast<double>(at_most) / static_cast<double>(count);
  }

  const double mu = static_cast<double>(m) * static_cast<double>(n + 1) / 2.0;
  const double var = static_cast<double>(m) * static_cast<double>(y.size()) * static_cast<double>(n + 1) / 12.0;
  const double z = (observed + 0.5 - mu) / std::sqrt(var);
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double sign_test_p_greater(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("sign test needs paired samples");
  std::size_t wins = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++n;
    if (a[i] > b[i]) ++wins;
  }
  if (n == 0) return 1.0;
  double p = 0.0;
  for (std::size_t k = wins; k <= n; ++k) p += binomial(n, k);
  return p / std::pow(2.0, static_cast<double>(n));
}

std::vector<double> moving_average(std::span<const double> x, std::size_t window) {
  if (window == 0) throw InvalidArgument("smoothing window must be positive");
  std::vector<double> out(x.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sum += x[i];
    if (i >= window) sum -= x[i - window];
    out[i] = sum / static_cast<double>(std::min(i + 1, window));
  }
  return out;
}

}  // namespace hra
