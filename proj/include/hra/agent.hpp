#pragma once

// Building blocks of the maze control agent: object heads read from the GVF
// bank, the two aggregators, the diversification and count-based exploration
// heads, the executive-memory head and final action selection.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "hra/gvf.hpp"
#include "hra/rng.hpp"

namespace hra {

enum class ObjectKind { pellet, power_pellet, fruit, ghost, blue_ghost };

/// Ghost heads avoid; everything else scores points.
enum class HeadGroup { score, ghost };

inline HeadGroup group_of(ObjectKind k) { return k == ObjectKind::ghost ? HeadGroup::ghost : HeadGroup::score; }

struct HeadMultipliers {
  double pellet = 10.0;
  double power_pellet = 50.0;
  double fruit = 200.0;
  double blue_ghost = 1000.0;
  double ghost = -1000.0;

  double of(ObjectKind k) const;
};

struct ObjectHead {
  ObjectKind kind;
  Cell location;
  double multiplier;
};

enum class AggregatorKind { linear_sum, normalized };

struct AggregatorSpec {
  AggregatorKind kind = AggregatorKind::linear_sum;
  double ghost_weight = -10.0;  // only used by the normalized aggregator
};

struct HeadRow {
  ObjectKind kind;
  std::vector<double> values;
};

using HeadMatrix = std::vector<HeadRow>;

/// Which bank each group reads; both may point at the same bank.
struct GvfSources {
  const GvfBank* score = nullptr;
  const GvfBank* ghost = nullptr;
};

/// One row per live object: GVF(map, object cell)[player_state] x multiplier.
/// Objects without a GVF yet produce zero rows.
HeadMatrix head_values(const GvfSources& banks, std::size_t map_id, std::size_t player_state,
                       std::span<const ObjectHead> objects, std::size_t action_count);

/// linear_sum: column sums of every row.
/// normalized: min-max normalised column sums of the score rows (a constant
/// column maps to 0), plus ghost_weight x the column sums of the ghost rows.
std::vector<double> aggregate(const HeadMatrix& rows, const AggregatorSpec& spec, std::size_t action_count);

/// Uniform draws in [0, high] while step < window, zeros afterwards.
std::vector<double> diversification_values(std::size_t step, Rng& rng, std::size_t action_count,
                                           std::size_t window = 50, double high = 20.0);

/// Visit counts for the targeted exploration head. Counts start at 1.
class ExplorationState {
 public:
  explicit ExplorationState(double kappa = 1.0);

  double kappa() const { return kappa_; }
  std::uint64_t total_actions() const { return total_; }
  std::uint64_t count(std::uint64_t state, std::size_t action) const;
  void record(std::uint64_t state, std::size_t action);
  /// Sets counters directly (tests and snapshots).
  void set(std::uint64_t state, std::size_t action, std::uint64_t n);
  void set_total(std::uint64_t n) { total_ = n; }

  const std::unordered_map<std::uint64_t, std::uint64_t>& raw() const { return extra_; }

 private:
  static std::uint64_t key(std::uint64_t state, std::size_t action) { return state * 8 + action; }

  double kappa_;
  std::uint64_t total_ = 0;
  std::unordered_map<std::uint64_t, std::uint64_t> extra_;  // n(s,a) - 1
};

/// kappa * sqrt(N^(1/4) / n(s,a)) per action.
std::vector<double> exploration_bonus(const ExplorationState& es, std::uint64_t state, std::size_t action_count);

inline constexpr double kMemoryForce = 1e6;

/// Stores, per level, an action sequence that cleared the level without a
/// death.
class ExecutiveMemory {
 public:
  void begin_episode();
  void record(std::size_t action);
  /// Discards the current level's recording; nothing is committed for it.
  void on_death();
  void on_level_complete(int level);

  bool has(int level) const { return recorded_.count(level) != 0; }
  std::optional<std::size_t> recorded_action(int level, std::size_t step_index) const;
  const std::map<int, std::vector<std::size_t>>& recorded() const { return recorded_; }
  const std::vector<std::size_t>& buffer() const { return buffer_; }
  bool clean() const { return clean_; }

  void restore(std::map<int, std::vector<std::size_t>> recorded) { recorded_ = std::move(recorded); }

 private:
  std::map<int, std::vector<std::size_t>> recorded_;
  std::vector<std::size_t> buffer_;
  bool clean_ = true;
};

/// kMemoryForce at the recorded action, 0 elsewhere; all zeros when the level
/// or step is not recorded.
std::vector<double> memory_step(const ExecutiveMemory& mem, int level, std::size_t step_index,
                                std::size_t action_count);

/// Argmax of the elementwise sum, lowest index on ties.
std::size_t select_action(std::span<const double> aggregated, std::span<const double> diversification,
                          std::span<const double> bonus, std::span<const double> memory_forcing);

}  // namespace hra
