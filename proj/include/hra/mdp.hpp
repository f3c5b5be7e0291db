#pragma once

// Discrete-MDP vocabulary shared by the environments, learners and oracle.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hra/rng.hpp"

namespace hra {

struct StateId {
  std::size_t index = 0;
  friend bool operator==(StateId, StateId) = default;
};

struct ActionId {
  std::size_t index = 0;
  friend bool operator==(ActionId, ActionId) = default;
};

enum class Event : std::uint8_t {
  fruit_eaten,
  pellet_eaten,
  power_pellet_eaten,
  blue_ghost_eaten,
  ghost_contact,
  level_complete,
  fruit_spawned,
  inactive,  // the environment ignored the action (start-of-game freeze)
};

std::string_view to_string(Event e);
Event event_from_string(std::string_view name);

/// One environment step. The component rewards decompose the shaped reward:
/// sum(r_components) == r_env + shaping, with r_env the unshaped game score.
struct DecomposedTransition {
  StateId s;
  ActionId a;
  StateId s_next;
  double r_env = 0.0;
  double shaping = 0.0;
  std::vector<double> r_components;
  bool terminal = false;
  /// Terminal only because a step budget ran out; learners keep bootstrapping.
  bool truncated = false;
  std::vector<Event> events;

  bool has(Event e) const;
  double component_sum() const;
};

/// Environment interface consumed by rollout(). Component count may change
/// between steps (e.g. on a map change) and is reported per transition.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::size_t action_count() const = 0;
  virtual std::size_t state_count() const = 0;
  virtual std::size_t component_count() const = 0;

  virtual StateId reset(std::uint64_t seed) = 0;
  virtual StateId state() const = 0;
  virtual bool done() const = 0;
  virtual DecomposedTransition step(ActionId a) = 0;
};

enum class PolicyKind { uniform_random, greedy, epsilon_greedy };
enum class TieBreak { lowest_index, seeded_random };

struct PolicySpec {
  PolicyKind kind = PolicyKind::uniform_random;
  double epsilon = 0.0;
  TieBreak tie_break = TieBreak::lowest_index;

  static PolicySpec uniform() { return {}; }
  static PolicySpec greedy_lowest() { return {PolicyKind::greedy, 0.0, TieBreak::lowest_index}; }
  static PolicySpec epsilon_greedy(double eps);

  /// Selection probability of each action given its values. Ties share the
  /// greedy mass only under the seeded tie break.
  std::vector<double> probabilities(std::span<const double> values) const;
};

/// Action values for the current state of the environment.
using ValueSource = std::function<std::vector<double>(StateId)>;

struct EpisodeLog {
  std::vector<DecomposedTransition> transitions;
  double total_score = 0.0;
  std::size_t steps = 0;
  std::uint64_t seed = 0;

  std::vector<ActionId> actions() const;
};

/// Lowest-index argmax; returns 0 for an empty range.
std::size_t argmax(std::span<const double> values);

std::size_t select_with_policy(const PolicySpec& policy, std::span<const double> values,
                               std::size_t action_count, Rng& rng);

/// Runs one episode. The env is reset with `seed`; the policy draws from an
/// independent stream derived from the same seed.
EpisodeLog rollout(Environment& env, const PolicySpec& policy, const ValueSource& values,
                   std::size_t max_steps, std::uint64_t seed);

/// Replays a recorded action sequence on a freshly reset environment and
/// returns the visited state sequence (reset state first).
std::vector<StateId> replay_states(Environment& env, std::uint64_t seed,
                                   std::span<const ActionId> actions);

// Line-oriented text format: a header naming the component columns, then one
// comma-separated transition per line.
void write_episode_log(std::ostream& os, const EpisodeLog& log);
EpisodeLog read_episode_log(std::istream& is);
void save_episode_log(const std::string& path, const EpisodeLog& log);
EpisodeLog load_episode_log(const std::string& path);

}  // namespace hra
