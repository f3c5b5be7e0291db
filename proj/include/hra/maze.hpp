#pragma once

// Desk-scale Pac-Man-style maze: ASCII maps, the points table, and the
// MazeWorld environment with ghosts, power pellets, fruit and levels.

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hra/grid.hpp"
#include "hra/mdp.hpp"
#include "hra/rng.hpp"

namespace hra {

/// Parsed ASCII map. Legend: '#' wall, '.' pellet, 'o' power pellet,
/// 'P' player spawn, 'G' ghost house, 'F' fruit spawn, ' ' empty corridor.
class Maze {
 public:
  static constexpr int kWall = -1;

  int width() const { return width_; }
  int height() const { return height_; }

  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < height_ && c.col >= 0 && c.col < width_; }
  bool is_wall(Cell c) const { return !in_bounds(c) || index_[flat(c)] == kWall; }

  /// Corridor cells are numbered densely in row-major order.
  std::size_t corridor_count() const { return cells_.size(); }
  int corridor_index(Cell c) const { return in_bounds(c) ? index_[flat(c)] : kWall; }
  Cell corridor_cell(std::size_t index) const { return cells_.at(index); }

  /// Destination of a compass move; blocked moves stay in place.
  std::size_t neighbor(std::size_t index, Direction d) const { return moves_[index * 4 + static_cast<std::size_t>(d)]; }
  bool open(std::size_t index, Direction d) const { return neighbor(index, d) != index; }

  /// Shortest-path length between corridor cells.
  int distance(std::size_t a, std::size_t b) const { return dist_[a * cells_.size() + b]; }

  const std::vector<Cell>& pellets() const { return pellets_; }
  const std::vector<Cell>& power_pellets() const { return power_pellets_; }
  const std::vector<Cell>& ghost_house() const { return ghost_house_; }
  std::optional<Cell> fruit_spawn() const { return fruit_spawn_; }
  Cell player_spawn() const { return player_spawn_; }

  friend Maze maze_load(std::string_view map_text);

 private:
  std::size_t flat(Cell c) const { return static_cast<std::size_t>(c.row * width_ + c.col); }

  int width_ = 0;
  int height_ = 0;
  std::vector<int> index_;
  std::vector<Cell> cells_;
  std::vector<std::size_t> moves_;
  std::vector<int> dist_;
  std::vector<Cell> pellets_;
  std::vector<Cell> power_pellets_;
  std::vector<Cell> ghost_house_;
  std::optional<Cell> fruit_spawn_;
  Cell player_spawn_{};
};

/// Throws ParseError with the offending line and column.
Maze maze_load(std::string_view map_text);
Maze maze_load_file(const std::string& path);

/// The four bundled maps, in level-schedule order.
const std::array<std::string_view, 4>& bundled_map_texts();

enum class FruitType : std::uint8_t { cherry, strawberry, orange, pretzel, apple, pear, banana };
inline constexpr std::size_t kFruitTypes = 7;

struct PointsTable {
  static constexpr int pellet = 10;
  static constexpr int power_pellet = 50;
  static constexpr std::array<int, 4> blue_ghost_chain = {200, 400, 800, 1600};
  static constexpr std::array<int, kFruitTypes> fruit = {100, 200, 500, 700, 1000, 2000, 5000};

  static int fruit_value(FruitType t) { return fruit[static_cast<std::size_t>(t)]; }
};

inline constexpr double kGhostContactShaping = -1000.0;

/// 1-2 map 0, 3-4 map 1, 5-6 map 2, 7-8 map 3, then odd levels map 2 and
/// even levels map 3.
std::size_t map_for_level(int level);
/// Fixed fruit for levels 1-7; nullopt from level 8 on (drawn at random).
std::optional<FruitType> fruit_for_level(int level);

inline constexpr std::size_t kMazeActions = 5;
inline constexpr std::size_t kNoop = 4;
inline constexpr std::size_t kGhosts = 4;

struct MazeConfig {
  int lives = 3;
  int blue_duration = 40;
  int fruit_duration = 60;
  /// Steps at game start during which every action is ignored.
  int start_delay = 32;
  /// Ghost i leaves the house i * interval steps into a life.
  int ghost_release_interval = 30;
  double ghost_chase_prob = 0.8;
  /// Ghosts sit out every n-th active step (0: never), so normal ghosts move
  /// at 2/3 and blue ghosts at 1/2 of the player's speed by default.
  int ghost_skip_every = 3;
  int blue_skip_every = 2;
};

struct Ghost {
  Cell cell;
  Direction heading = Direction::north;
  int blue_timer = 0;
  int release_in = 0;
  bool blue() const { return blue_timer > 0; }
};

struct FruitOnBoard {
  Cell cell;
  FruitType type;
  int timer;
};

/// Player state is (corridor cell, orientation); StateId = cell * 4 + orientation.
class MazeWorld : public Environment {
 public:
  /// `maps` are indexed by map_for_level(). Must hold four mazes, each with
  /// a ghost house.
  MazeWorld(std::vector<std::shared_ptr<const Maze>> maps, MazeConfig config = {});
  /// Uses the bundled maps.
  explicit MazeWorld(MazeConfig config = {});

  std::size_t action_count() const override { return kMazeActions; }
  std::size_t state_count() const override { return maze().corridor_count() * 4; }
  std::size_t component_count() const override;

  StateId reset(std::uint64_t seed) override;
  StateId state() const override;
  bool done() const override { return lives_ == 0; }
  DecomposedTransition step(ActionId a) override;

  const MazeConfig& config() const { return config_; }
  const Maze& maze() const { return *maps_[map_id_]; }
  const Maze& maze(std::size_t map_id) const { return *maps_.at(map_id); }
  std::size_t map_count() const { return maps_.size(); }
  std::size_t map_id() const { return map_id_; }
  int level() const { return level_; }
  int lives() const { return lives_; }
  int levels_completed() const { return level_ - 1; }
  bool frozen() const { return freeze_ > 0; }

  Cell player() const { return player_; }
  Direction orientation() const { return orientation_; }
  std::size_t player_state() const;

  const std::array<Ghost, kGhosts>& ghosts() const { return ghosts_; }
  const std::vector<bool>& pellet_alive() const { return pellet_alive_; }
  const std::vector<bool>& power_alive() const { return power_alive_; }
  std::size_t dots_remaining() const { return dots_remaining_; }
  const std::optional<FruitOnBoard>& fruit() const { return fruit_; }
  int blue_chain() const { return blue_chain_; }

  // Component layout for the current map:
  //   [pellets..., power pellets..., fruit, ghost contact x4, blue ghost x4]
  std::size_t pellet_component(std::size_t pellet) const { return pellet; }
  std::size_t power_component(std::size_t power) const { return maze().pellets().size() + power; }
  std::size_t fruit_component() const { return maze().pellets().size() + maze().power_pellets().size(); }
  std::size_t ghost_component(std::size_t g) const { return fruit_component() + 1 + g; }
  std::size_t blue_ghost_component(std::size_t g) const { return fruit_component() + 1 + kGhosts + g; }

  // Scenario setup for tests.
  void place_player(Cell c, Direction orientation = Direction::west);
  void place_ghost(std::size_t g, Cell c, Direction heading = Direction::north, int blue_timer = 0);
  void clear_freeze() { freeze_ = 0; }
  void reseed(std::uint64_t seed) { rng_.reseed(seed); }

 private:
  void load_level();
  void reset_positions();
  void move_ghost(Ghost& g);
  bool try_move_player(std::size_t action);

  std::vector<std::shared_ptr<const Maze>> maps_;
  MazeConfig config_;
  Rng rng_;

  std::size_t map_id_ = 0;
  int level_ = 1;
  int lives_ = 0;
  int freeze_ = 0;
  Cell player_{};
  Direction orientation_ = Direction::west;
  std::array<Ghost, kGhosts> ghosts_{};
  std::vector<bool> pellet_alive_;
  std::vector<bool> power_alive_;
  std::size_t dots_total_ = 0;
  std::size_t dots_remaining_ = 0;
  int fruit_spawns_ = 0;
  std::optional<FruitOnBoard> fruit_;
  int blue_chain_ = 0;
  std::uint64_t ticks_ = 0;
};

}  // namespace hra
