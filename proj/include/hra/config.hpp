#pragma once

// Experiment configuration: a JSON document describing the environment, the
// agent, the training budget, evaluation and seeds. Unknown keys are
// rejected at every level.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "hra/fruit_agents.hpp"
#include "hra/maze.hpp"
#include "hra/maze_agent.hpp"

namespace hra {

enum class EnvKind { fruit, maze };

struct EnvSpec {
  EnvKind kind = EnvKind::fruit;
  MazeConfig maze;
  /// Optional replacement maps (four files, level-schedule order).
  std::vector<std::string> map_files;
  /// Every training and evaluation game starts from the same seed, like an
  /// emulator with a deterministic start.
  bool fixed_game_seed = true;
  /// Cap on training episode length (maze).
  std::size_t step_limit = 10'000;
};

enum class EvalKind { fixed_start, random_start };

struct EvalSpec {
  EvalKind protocol = EvalKind::fixed_start;
  std::size_t every = 1;     // evaluate after every n-th training episode
  std::size_t episodes = 1;  // evaluation episodes per evaluation point
  std::string reference;     // reference trajectory file for random starts
  std::size_t max_steps = 0; // 0: 300 on the fruit grid, 10,000 in the maze
  std::size_t noop_max = 30;
};

inline constexpr std::string_view kMazeMethod = "full-maze-hra";

struct AgentSpec {
  std::string method = "hra";
  FruitAgentConfig fruit;
  MazeAgentConfig maze;
};

struct ExperimentConfig {
  EnvSpec env;
  AgentSpec agent;
  std::size_t episodes = 0;
  EvalSpec eval;
  std::vector<std::uint64_t> seeds{1};
  std::string output;

  /// The document this config was parsed from, with defaults filled in.
  nlohmann::json to_json() const;
};

/// Throws ConfigError on unknown keys, wrong types, bad values and
/// method/environment mismatches.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

std::string_view to_string(EvalKind k);
EvalKind eval_kind_from_string(std::string_view name);

/// Builds the maze world an experiment runs on.
MazeWorld make_maze_world(const EnvSpec& env);

}  // namespace hra
