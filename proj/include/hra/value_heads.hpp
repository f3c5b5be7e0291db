#pragma once

// TD targets and tabular per-component value heads.

#include <cstddef>
#include <span>
#include <vector>

#include "hra/mdp.hpp"

namespace hra {

enum class TargetKind {
  max,           // y = r + gamma * max_a' Q(s', a')
  uniform_mean,  // y = r + gamma * mean_a' Q(s', a')  (expected Sarsa, uniform policy)
};

struct TargetRule {
  TargetKind kind = TargetKind::uniform_mean;
  double gamma = 0.99;

  /// Throws InvalidArgument unless gamma lies in [0,1].
  void validate() const;
};

/// Bootstrap term max/mean(next_values); next_values must be non-empty.
double bootstrap_value(TargetKind kind, std::span<const double> next_values);

/// Terminal transitions return r without reading next_values.
double td_target(const TargetRule& rule, double reward, std::span<const double> next_values, bool terminal);

/// Dense state x action table; unvisited entries read 0.
class TabularHead {
 public:
  TabularHead(std::size_t state_count, std::size_t action_count, double alpha, TargetRule rule);

  std::size_t state_count() const { return states_; }
  std::size_t action_count() const { return actions_; }
  double alpha() const { return alpha_; }
  const TargetRule& rule() const { return rule_; }

  double value(std::size_t s, std::size_t a) const { return table_[s * actions_ + a]; }
  std::span<const double> row(std::size_t s) const { return {table_.data() + s * actions_, actions_}; }
  std::span<double> row(std::size_t s) { return {table_.data() + s * actions_, actions_}; }
  std::span<const double> table() const { return table_; }

  /// Q(s,a) <- (1-alpha) Q(s,a) + alpha * y; returns the new value.
  double update(std::size_t s, std::size_t a, double reward, std::size_t s_next, bool terminal);

 private:
  std::size_t states_;
  std::size_t actions_;
  double alpha_;
  TargetRule rule_;
  std::vector<double> table_;
};

/// Updates `head` on component k of the transition. Truncated transitions
/// bootstrap; only true terminals stop the backup.
void tabular_update(TabularHead& head, const DecomposedTransition& t, std::size_t k);

}  // namespace hra
