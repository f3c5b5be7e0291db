#include "hra/value_heads.hpp"

#include <algorithm>
#include <numeric>

#include "hra/errors.hpp"

namespace hra {

void TargetRule::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("discount must lie in [0,1]");
}

double bootstrap_value(TargetKind kind, std::span<const double> next_values) {
  if (next_values.empty()) throw InvalidArgument("td_target: next_values is empty");
  if (kind == TargetKind::max) return *std::max_element(next_values.begin(), next_values.end());
  return std::accumulate(next_values.begin(), next_values.end(), 0.0) / static_cast<double>(next_values.size());
}

double td_target(const TargetRule& rule, double reward, std::span<const double> next_values, bool terminal) {
  if (next_values.empty()) throw InvalidArgument("td_target: next_values is empty");
  if (terminal) return reward;
  return reward + rule.gamma * bootstrap_value(rule.kind, next_values);
}

TabularHead::TabularHead(std::size_t state_count, std::size_t action_count, double alpha, TargetRule rule)
    : states_(state_count), actions_(action_count), alpha_(alpha), rule_(rule), table_(state_count * action_count, 0.0) {
  if (state_count == 0 || action_count == 0) throw InvalidArgument("tabular head needs states and actions");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("step size must lie in (0,1]");
  rule_.validate();
}

double TabularHead::update(std::size_t s, std::size_t a, double reward, std::size_t s_next, bool terminal) {
  if (s >= states_ || s_next >= states_ || a >= actions_) throw InvalidArgument("tabular update out of range");
  const double y = td_target(rule_, reward, row(s_next), terminal);
  double& q = table_[s * actions_ + a];
  q = alpha_ == 1.0 ? y : (1.0 - alpha_) * q + alpha_ * y;
  return q;
}

void tabular_update(TabularHead& head, const DecomposedTransition& t, std::size_t k) {
  if (k >= t.r_components.size()) throw InvalidArgument("component index out of range");
  head.update(t.s.index, t.a.index, t.r_components[k], t.s_next.index, t.terminal && !t.truncated);
}

}  // namespace hra
