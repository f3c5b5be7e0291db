#pragma once

// Training loops, evaluation protocols, metrics logs, checkpoints and sweeps.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hra/config.hpp"
#include "hra/fruit_agents.hpp"
#include "hra/maze_agent.hpp"
#include "hra/mdp.hpp"

namespace hra {

struct MetricsRow {
  std::size_t episode = 0;
  double train_score = 0.0;
  std::optional<double> eval_score;  // mean over the evaluation episodes
  std::size_t steps = 0;
  std::optional<double> eval_steps;
  int levels_completed = 0;
  std::size_t head_count = 0;
  std::size_t gvf_count = 0;
  double wall_time_ms = 0.0;

  /// Equality on everything except wall time.
  bool same_result(const MetricsRow& o) const;
};

/// Append-only per-episode log, one per (config, seed). Empty optional
/// fields are written as empty CSV cells.
class MetricsLog {
 public:
  static constexpr std::string_view kHeader =
      "episode,train_score,eval_score,steps,eval_steps,levels_completed,head_count,gvf_count,wall_time_ms";

  void append(const MetricsRow& row) { rows_.push_back(row); }
  const std::vector<MetricsRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  /// Mean eval score over the last `window` evaluated episodes; falls back to
  /// training scores when nothing was evaluated.
  double final_eval_score(std::size_t window = 100) const;
  double final_eval_steps(std::size_t window = 100) const;
  double final_train_score(std::size_t window = 100) const;

  void write_csv(std::ostream& os) const;
  static MetricsLog read_csv(std::istream& is);
  void save(const std::string& path) const;
  static MetricsLog load(const std::string& path);

 private:
  std::vector<MetricsRow> rows_;
};

struct EvalEpisode {
  double score = 0.0;
  std::size_t steps = 0;
  int levels_completed = 0;
  int deaths = 0;
  std::vector<int> level_deaths;  // deaths per level, index level - 1
  std::size_t start_index = 0;    // restored reference index (random start) or no-op count (fixed start)
  bool finished = false;          // fruit grid: every fruit eaten
};

struct EvalSummary {
  std::vector<EvalEpisode> episodes;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

EvalSummary summarize(std::vector<EvalEpisode> episodes);

// Seed streams. Every random quantity of a run derives from (seed, stream, index).
std::uint64_t fruit_train_seed(std::uint64_t seed, std::size_t episode);
std::uint64_t fruit_eval_seed(std::uint64_t seed, std::size_t round, std::size_t repeat = 0);
std::uint64_t maze_game_seed(const EnvSpec& env, std::uint64_t seed, std::size_t episode);

// ---- fruit grid ----

struct FruitRun {
  MetricsLog log;
  std::unique_ptr<FruitAgent> agent;
};

/// Uniform-random behaviour policy for training; greedy evaluation after the
/// episodes selected by config.eval.
FruitRun train_fruit(const ExperimentConfig& config, std::uint64_t seed);

/// One greedy episode from the state produced by FruitGrid::reset(env_seed).
EvalEpisode fruit_greedy_episode(const FruitAgent& agent, std::uint64_t env_seed,
                                 std::size_t max_steps = kFruitStepLimit);

/// Fixed start: FruitGrid::reset(fruit_eval_seed(seed, round, i)). Random
/// start: replays a uniformly drawn prefix of the reference trajectory.
EvalSummary evaluate_fruit(const FruitAgent& agent, const EvalSpec& eval, EvalKind protocol, std::size_t episodes,
                           std::uint64_t seed, std::size_t round = 0, const EpisodeLog* reference = nullptr);

// ---- maze ----

struct MazeRun {
  MetricsLog log;
  std::unique_ptr<MazeAgent> agent;
};

MazeRun train_maze(const ExperimentConfig& config, std::uint64_t seed);

/// Greedy evaluation; never mutates the agent. `seed` is the run seed.
/// Fixed start: the run's game seed plus a seeded no-op prefix of length
/// [0, noop_max]. Random start: replays a uniformly drawn prefix of the
/// reference trajectory first; only points scored afterwards count.
EvalSummary evaluate_maze(const MazeAgent& agent, const ExperimentConfig& config, EvalKind protocol,
                          std::size_t episodes, std::uint64_t seed, std::size_t round = 0,
                          const EpisodeLog* reference = nullptr);

/// A greedy fixed-start episode recorded as a trajectory (reference fixture).
EpisodeLog record_maze_episode(const MazeAgent& agent, const ExperimentConfig& config, std::uint64_t seed);

/// Uniform-random policy on the maze: mean score over `episodes` games.
double maze_random_policy_score(const ExperimentConfig& config, std::size_t episodes, std::uint64_t seed);

// ---- checkpoints ----

struct Checkpoint {
  ExperimentConfig config;
  std::uint64_t seed = 0;
  std::unique_ptr<FruitAgent> fruit;
  std::unique_ptr<MazeAgent> maze;
};

void save_checkpoint(const std::string& path, const ExperimentConfig& config, std::uint64_t seed,
                     const FruitAgent* fruit, const MazeAgent* maze);
Checkpoint load_checkpoint(const std::string& path);

/// Runs evaluation for a loaded checkpoint under the given protocol.
EvalSummary evaluate_checkpoint(const Checkpoint& ckpt, EvalKind protocol, std::size_t episodes);

// ---- experiment driver ----

struct RunOutput {
  MetricsLog log;
  std::string metrics_path;
  std::string checkpoint_path;
};

/// Trains one (config, seed) cell; when output_dir is non-empty writes
/// metrics_seed<N>.csv and checkpoint_seed<N>.bin there.
RunOutput run_experiment(const ExperimentConfig& config, std::uint64_t seed, const std::string& output_dir);

// ---- sweeps ----

/// {"base": <config>, "axes": {"agent.gamma_score": [..], ...}, "seeds": [..]}
struct SweepGrid {
  nlohmann::json base;
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;
  std::vector<std::uint64_t> seeds;
};

SweepGrid parse_grid(const nlohmann::json& doc);
SweepGrid load_grid(const std::string& path);

struct SweepRow {
  std::vector<std::string> values;  // one per axis
  std::uint64_t seed = 0;
  std::string status;  // "ok" or the error message
  double final_eval_score = 0.0;
  double final_train_score = 0.0;
  std::size_t episodes = 0;
};

/// Runs every (axis combination x seed) cell with up to `jobs` workers.
/// Rows come back in cell order regardless of `jobs`; failed cells are
/// reported in their row's status.
std::vector<SweepRow> sweep(const SweepGrid& grid, std::size_t jobs);
void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<SweepRow>& rows);

// ---- plotting ----

/// episode, raw and trailing-mean-smoothed train and eval scores.
void write_plot_csv(std::ostream& os, const MetricsLog& log, std::size_t window);

}  // namespace hra
