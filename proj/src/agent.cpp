#include "hra/agent.hpp"

#include <algorithm>
#include <cmath>

#include "hra/errors.hpp"
#include "hra/mdp.hpp"

namespace hra {

double HeadMultipliers::of(ObjectKind k) const {
  switch (k) {
    case ObjectKind::pellet:
      return pellet;
    case ObjectKind::power_pellet:
      return power_pellet;
    case ObjectKind::fruit:
      return fruit;
    case ObjectKind::ghost:
      return ghost;
    case ObjectKind::blue_ghost:
      return blue_ghost;
  }
  return 0.0;
}

HeadMatrix head_values(const GvfSources& banks, std::size_t map_id, std::size_t player_state,
                       std::span<const ObjectHead> objects, std::size_t action_count) {
  HeadMatrix rows;
  rows.reserve(objects.size());
  for (const ObjectHead& o : objects) {
    HeadRow row{o.kind, std::vector<double>(action_count, 0.0)};
    const GvfBank* bank = group_of(o.kind) == HeadGroup::ghost ? banks.ghost : banks.score;
    if (bank) {
      bank->values({map_id, o.location}, player_state, row.values);
      for (double& v : row.values) v *= o.multiplier;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> aggregate(const HeadMatrix& rows, const AggregatorSpec& spec, std::size_t action_count) {
  std::vector<double> out(action_count, 0.0);
  if (spec.kind == AggregatorKind::linear_sum) {
    for (const HeadRow& r : rows)
      for (std::size_t a = 0; a < action_count; ++a) out[a] += r.values[a];
    return out;
  }

  std::vector<double> score(action_count, 0.0);
  std::vector<double> ghost(action_count, 0.0);
  for (const HeadRow& r : rows) {
    auto& dst = group_of(r.kind) == HeadGroup::ghost ? ghost : score;
    for (std::size_t a = 0; a < action_count; ++a) dst[a] += r.values[a];
  }
  const auto [lo, hi] = std::minmax_element(score.begin(), score.end());
  const double low = *lo;
  const double range = *hi - *lo;
  for (std::size_t a = 0; a < action_count; ++a) {
    const double normalized = range > 0.0 ? (score[a] - low) / range : 0.0;
    out[a] = normalized + spec.ghost_weight * ghost[a];
  }
  return out;
}

std::vector<double> diversification_values(std::size_t step, Rng& rng, std::size_t action_count, std::size_t window,
                                           double high) {
  std::vector<double> out(action_count, 0.0);
  if (step >= window) return out;
  for (double& v : out) v = rng.uniform(0.0, high);
  return out;
}

ExplorationState::ExplorationState(double kappa) : kappa_(kappa) {
  if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be non-negative");
}

std::uint64_t ExplorationState::count(std::uint64_t state, std::size_t action) const {
  const auto it = extra_.find(key(state, action));
  return 1 + (it == extra_.end() ? 0 : it->second);
}

void ExplorationState::record(std::uint64_t state, std::size_t action) {
  ++extra_[key(state, action)];
  ++total_;
}

void ExplorationState::set(std::uint64_t state, std::size_t action, std::uint64_t n) {
  if (n == 0) throw InvalidArgument("visit counts start at 1");
  extra_[key(state, action)] = n - 1;
}

std::vector<double> exploration_bonus(const ExplorationState& es, std::uint64_t state, std::size_t action_count) {
  std::vector<double> out(action_count, 0.0);
  if (es.kappa() == 0.0) return out;
  const double quartic_root = std::pow(static_cast<double>(es.total_actions()), 0.25);
  for (std::size_t a = 0; a < action_count; ++a)
    out[a] = es.kappa() * std::sqrt(quartic_root / static_cast<double>(es.count(state, a)));
  return out;
}

void ExecutiveMemory::begin_episode() {
  buffer_.clear();
  clean_ = true;
}

void ExecutiveMemory::record(std::size_t action) { buffer_.push_back(action); }

void ExecutiveMemory::on_death() {
  buffer_.clear();
  clean_ = false;
}

void ExecutiveMemory::on_level_complete(int level) {
  if (clean_ && !has(level)) recorded_[level] = buffer_;
  buffer_.clear();
  clean_ = true;
}

std::optional<std::size_t> ExecutiveMemory::recorded_action(int level, std::size_t step_index) const {
  const auto it = recorded_.find(level);
  if (it == recorded_.end() || step_index >= it->second.size()) return std::nullopt;
  return it->second[step_index];
}

std::vector<double> memory_step(const ExecutiveMemory& mem, int level, std::size_t step_index,
                                std::size_t action_count) {
  std::vector<double> out(action_count, 0.0);
  if (const auto a = mem.recorded_action(level, step_index); a && *a < action_count) out[*a] = kMemoryForce;
  return out;
}

std::size_t select_action(std::span<const double> aggregated, std::span<const double> diversification,
                          std::span<const double> bonus, std::span<const double> memory_forcing) {
  const std::size_t n = aggregated.size();
  if (diversification.size() != n || bonus.size() != n || memory_forcing.size() != n)
    throw InvalidArgument("select_action: head vectors differ in length");
  std::vector<double> total(n);
  for (std::size_t a = 0; a < n; ++a) total[a] = aggregated[a] + diversification[a] + bonus[a] + memory_forcing[a];
  return argmax(total);
}

}  // namespace hra
