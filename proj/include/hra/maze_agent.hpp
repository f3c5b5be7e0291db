#pragma once

// The maze control agent: GVF banks that grow with the explored map, object
// heads weighted by their point value, an aggregator, and the optional
// diversification, targeted-exploration and executive-memory heads.

#include <cstdint>
#include <memory>
#include <vector>

#include "hra/agent.hpp"
#include "hra/checkpoint.hpp"
#include "hra/gvf.hpp"
#include "hra/maze.hpp"

namespace hra {

struct MazeAgentConfig {
  AggregatorSpec aggregator{AggregatorKind::normalized, -10.0};
  HeadMultipliers multipliers;
  TargetKind gvf_target = TargetKind::uniform_mean;
  double gamma_score = 0.99;
  double gamma_ghost = 0.99;
  double gvf_alpha = 1.0;
  bool diversification = true;
  std::size_t diversification_window = 50;
  double diversification_high = 20.0;
  bool targeted_exploration = true;
  double kappa = 1.0;
  bool executive_memory = false;
};

/// Live objects of the current map as heads. In the normalized aggregator the
/// ghost rows keep a unit multiplier; the ghost weight is applied there.
std::vector<ObjectHead> maze_objects(const MazeWorld& world, const HeadMultipliers& multipliers,
                                     AggregatorKind aggregator);

/// Per-episode bookkeeping owned by the caller, so evaluation never touches
/// the agent itself.
struct MazeEpisode {
  std::size_t step = 0;        // active (non-frozen) steps this episode
  std::size_t level_step = 0;  // active steps in the current level
  Rng rng;
};

class MazeAgent {
 public:
  /// Registers the topology of every map of `world` in the banks.
  MazeAgent(const MazeAgentConfig& config, const MazeWorld& world);

  const MazeAgentConfig& config() const { return config_; }

  MazeEpisode begin_episode(std::uint64_t seed, bool learning);

  /// Action for the current world state. Frozen worlds get the no-op.
  /// Diversification only applies while learning.
  std::size_t act(const MazeWorld& world, MazeEpisode& episode, bool learning) const;

  /// Feeds one step back. `map_before`/`level_before` describe the world
  /// before the step. With learning off nothing in the agent changes.
  void observe(const DecomposedTransition& t, std::size_t map_before, int level_before, const MazeWorld& after,
               MazeEpisode& episode, bool learning);

  /// Advances the episode step counters only; used by evaluation.
  static void track(const DecomposedTransition& t, MazeEpisode& episode);

  /// The four action-value vectors that select_action combines.
  struct Decision {
    std::vector<double> aggregated;
    std::vector<double> diversification;
    std::vector<double> bonus;
    std::vector<double> memory;
  };
  Decision decide(const MazeWorld& world, MazeEpisode& episode, bool learning) const;

  const GvfBank& score_bank() const { return *score_; }
  const GvfBank& ghost_bank() const { return ghost_ ? *ghost_ : *score_; }
  GvfSources sources() const { return {&score_bank(), &ghost_bank()}; }
  const ExplorationState& exploration() const { return exploration_; }
  const ExecutiveMemory& memory() const { return memory_; }

  std::size_t gvf_count() const;
  /// Object locations (pellets, power pellets, fruit spawns) covered by a
  /// GVF, plus one head per ghost in each colour.
  std::size_t head_count() const;

  void save(bin::Sections& sections) const;
  void load(const bin::Sections& sections);

 private:
  static std::uint64_t count_key(std::size_t map_id, std::size_t state) { return (map_id << 32) | state; }

  MazeAgentConfig config_;
  std::vector<Maze> maps_;
  std::unique_ptr<GvfBank> score_;
  std::unique_ptr<GvfBank> ghost_;  // null when both groups share one discount
  ExplorationState exploration_;
  ExecutiveMemory memory_;
};

}  // namespace hra
