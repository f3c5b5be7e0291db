#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "hra/errors.hpp"
#include "hra/maze.hpp"

using namespace hra;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MazeWorld ready_world(MazeConfig config = {}) {
  MazeWorld w(config);
  w.reset(1);
  w.clear_freeze();
  // Park every ghost in the far bottom-right corner.
  for (std::size_t g = 0; g < kGhosts; ++g) w.place_ghost(g, Cell{13, 19}, Direction::west);
  return w;
}

const std::size_t kEast = static_cast<std::size_t>(Direction::east);
const std::size_t kWest = static_cast<std::size_t>(Direction::west);

}  // namespace

TEST_SUITE("maze") {
  TEST_CASE("small map parses") {
    const Maze m = maze_load(
        "#####\n"
        "#P..#\n"
        "#.#.#\n"
        "#G  #\n"
        "#####\n");
    CHECK(m.width() == 5);
    CHECK(m.height() == 5);
    CHECK(m.pellets().size() == 4);
    CHECK(m.player_spawn() == Cell{1, 1});
    CHECK(m.ghost_house().size() == 1);
    CHECK(m.corridor_count() == 8);
    CHECK(m.is_wall(Cell{0, 0}));
    CHECK(m.is_wall(Cell{-1, 2}));
    const auto spawn = static_cast<std::size_t>(m.corridor_index(Cell{1, 1}));
    CHECK(m.neighbor(spawn, Direction::north) == spawn);
    CHECK(m.distance(spawn, static_cast<std::size_t>(m.corridor_index(Cell{3, 3}))) == 4);
  }

  TEST_CASE("unknown glyphs report their position") {
    try {
      maze_load("#####\n#P.X#\n#####\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("'X'") != std::string::npos);
      CHECK(e.line() == 2);
      CHECK(e.column() == 4);
    }
  }

  TEST_CASE("walled-off pellets are unreachable") {
    try {
      maze_load("#######\n#P.#.##\n#######\n");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("unreachable") != std::string::npos);
    }
  }

  TEST_CASE("ragged maps are rejected") {
    CHECK_THROWS_AS(maze_load("#####\n#P.#\n#####\n"), ParseError);
    CHECK_THROWS_AS(maze_load("#####\n#...#\n#####\n"), ParseError);
  }

  TEST_CASE("bundled maps match the files under maps/") {
    const char* names[] = {"map_a.txt", "map_b.txt", "map_c.txt", "map_d.txt"};
    for (std::size_t i = 0; i < 4; ++i) {
      const std::string text = read_file(std::string(HRA_SOURCE_DIR) + "/maps/" + names[i]);
      CHECK(text == std::string(bundled_map_texts()[i]));
      const Maze m = maze_load(text);
      CHECK(m.power_pellets().size() == 2);
      CHECK_FALSE(m.ghost_house().empty());
      CHECK(m.fruit_spawn().has_value());
    }
  }

  TEST_CASE("points table") {
    CHECK(PointsTable::pellet == 10);
    CHECK(PointsTable::power_pellet == 50);
    CHECK(PointsTable::blue_ghost_chain == std::array<int, 4>{200, 400, 800, 1600});
    CHECK(PointsTable::fruit_value(FruitType::cherry) == 100);
    CHECK(PointsTable::fruit_value(FruitType::banana) == 5000);
    for (std::size_t k = 1; k < 4; ++k)
      CHECK(PointsTable::blue_ghost_chain[k] == 2 * PointsTable::blue_ghost_chain[k - 1]);
  }

  TEST_CASE("level schedule") {
    const std::size_t expected[] = {0, 0, 1, 1, 2, 2, 3, 3, 2, 3, 2, 3};
    for (int level = 1; level <= 12; ++level) CHECK(map_for_level(level) == expected[level - 1]);
    CHECK(fruit_for_level(1) == FruitType::cherry);
    CHECK(fruit_for_level(7) == FruitType::banana);
    CHECK_FALSE(fruit_for_level(8).has_value());
    CHECK_THROWS_AS(map_for_level(0), InvalidArgument);
  }

  TEST_CASE("the start delay ignores every action") {
    MazeWorld w;
    w.reset(3);
    const Cell start = w.player();
    for (int i = 0; i < w.config().start_delay; ++i) {
      REQUIRE(w.frozen());
      const auto t = w.step(ActionId{kWest});
      CHECK(t.has(Event::inactive));
      CHECK(t.r_env == 0.0);
    }
    CHECK(w.player() == start);
    CHECK_FALSE(w.frozen());
  }

  TEST_CASE("stepping onto a pellet scores 10") {
    MazeWorld w = ready_world();
    REQUIRE(w.player() == Cell{9, 10});
    const auto t = w.step(ActionId{kWest});
    CHECK(w.player() == Cell{9, 9});
    CHECK(t.r_env == 10.0);
    CHECK(t.has(Event::pellet_eaten));
    const auto pellet = std::find(w.maze().pellets().begin(), w.maze().pellets().end(), Cell{9, 9});
    const auto k = static_cast<std::size_t>(pellet - w.maze().pellets().begin());
    CHECK(t.r_components[w.pellet_component(k)] == 10.0);
    CHECK(t.component_sum() == 10.0);
  }

  TEST_CASE("walls stop the player and keep its orientation") {
    MazeWorld w = ready_world();
    w.place_player(Cell{3, 2}, Direction::east);
    w.step(ActionId{static_cast<std::size_t>(Direction::north)});
    CHECK(w.player() == Cell{3, 2});
    CHECK(w.orientation() == Direction::east);
  }

  TEST_CASE("blue ghosts pay along the doubling chain") {
    MazeWorld w = ready_world();
    w.place_player(Cell{3, 2});
    w.place_ghost(0, Cell{3, 3}, Direction::west, 40);
    w.place_ghost(1, Cell{3, 4}, Direction::west, 40);
    // Ghost 0 swaps places with the player, ghost 1 walks into its new cell.
    const auto t = w.step(ActionId{kEast});
    CHECK(t.r_components[w.blue_ghost_component(0)] == 200.0);
    CHECK(t.r_components[w.blue_ghost_component(1)] == 400.0);
    CHECK(t.r_env == 200.0 + 400.0 + PointsTable::pellet);
    CHECK(w.blue_chain() == 2);
    CHECK_FALSE(w.ghosts()[0].blue());
  }

  TEST_CASE("normal ghost contact costs a life and only shaped reward") {
    MazeWorld w = ready_world();
    w.place_player(Cell{3, 2});
    w.place_ghost(2, Cell{3, 3}, Direction::west);
    const int lives = w.lives();
    const auto t = w.step(ActionId{kEast});
    CHECK(t.has(Event::ghost_contact));
    CHECK(t.r_env == 0.0);
    CHECK(t.shaping == kGhostContactShaping);
    CHECK(t.r_components[w.ghost_component(2)] == kGhostContactShaping);
    CHECK(w.lives() == lives - 1);
    CHECK(w.player() == w.maze().player_spawn());
  }

  TEST_CASE("losing the last life ends the game") {
    MazeConfig config;
    config.lives = 1;
    MazeWorld w = ready_world(config);
    w.place_player(Cell{3, 2});
    w.place_ghost(0, Cell{3, 3}, Direction::west);
    const auto t = w.step(ActionId{kEast});
    CHECK(t.terminal);
    CHECK(w.done());
    CHECK_THROWS_AS(w.step(ActionId{0}), InvalidState);
  }

  TEST_CASE("pellets only decrease and levels advance exactly at zero") {
    MazeConfig config;
    config.lives = 1000000;
    config.ghost_release_interval = 1000000;
    config.ghost_chase_prob = 0.0;
    MazeWorld w(config);
    w.reset(9);
    Rng rng(4);
    int levels = 0;
    for (int step = 0; step < 60000 && !w.done(); ++step) {
      const std::size_t before = w.dots_remaining();
      const int level = w.level();
      const std::size_t first_blue = w.blue_ghost_component(0);
      const std::size_t a = rng.below(kMazeActions);
      const auto t = w.step(ActionId{a});
      std::size_t eaten = 0;
      for (Event e : t.events) eaten += e == Event::pellet_eaten || e == Event::power_pellet_eaten;
      CHECK(t.component_sum() - t.shaping == t.r_env);
      if (t.has(Event::level_complete)) {
        CHECK(before == eaten);
        CHECK(w.level() == level + 1);
        ++levels;
      } else {
        CHECK(w.level() == level);
        CHECK(w.dots_remaining() == before - eaten);
      }
      for (std::size_t g = 0; g < kGhosts; ++g) {
        const double blue = t.r_components[first_blue + g];
        if (blue == 0.0) continue;
        CHECK(std::find(PointsTable::blue_ghost_chain.begin(), PointsTable::blue_ghost_chain.end(), int(blue)) !=
              PointsTable::blue_ghost_chain.end());
      }
    }
    CHECK(levels >= 1);
  }

  TEST_CASE("ghosts move slower than the player") {
    for (int blue : {0, 1000}) {
      MazeWorld w = ready_world();
      for (std::size_t g = 1; g < kGhosts; ++g) w.place_ghost(g, Cell{13, 1}, Direction::east, blue);
      w.place_ghost(0, Cell{13, 19}, Direction::west, blue);
      int moves = 0;
      for (int i = 0; i < 12; ++i) {
        const Cell before = w.ghosts()[0].cell;
        w.step(ActionId{kNoop});
        moves += w.ghosts()[0].cell != before;
      }
      CHECK(moves == (blue ? 6 : 8));
    }
    MazeConfig lockstep;
    lockstep.ghost_skip_every = 0;
    MazeWorld w = ready_world(lockstep);
    int moves = 0;
    for (int i = 0; i < 12; ++i) {
      const Cell before = w.ghosts()[0].cell;
      w.step(ActionId{kNoop});
      moves += w.ghosts()[0].cell != before;
    }
    CHECK(moves == 12);
  }

  TEST_CASE("seeded games repeat") {
    MazeWorld a, b;
    a.reset(17);
    b.reset(17);
    Rng ra(2), rb(2);
    for (int i = 0; i < 500 && !a.done(); ++i) {
      const auto ta = a.step(ActionId{ra.below(kMazeActions)});
      const auto tb = b.step(ActionId{rb.below(kMazeActions)});
      REQUIRE(ta.s_next == tb.s_next);
      REQUIRE(ta.r_env == tb.r_env);
    }
    for (std::size_t g = 0; g < kGhosts; ++g) CHECK(a.ghosts()[g].cell == b.ghosts()[g].cell);
  }
}
