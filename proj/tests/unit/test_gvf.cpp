#include <doctest.h>

#include <sstream>

#include "hra/errors.hpp"
#include "hra/gvf.hpp"
#include "hra/maze.hpp"
#include "hra/oracle.hpp"
#include "reference.hpp"

using namespace hra;

namespace {

const char* kSmallMaze =
    "#######\n"
    "#P....#\n"
    "#.#.#.#\n"
    "#.....#\n"
    "#.#.#.#\n"
    "#....G#\n"
    "#######\n";

// Next player state of a (cell x orientation) move, derived from the maze graph.
std::size_t next_state(const Maze& m, std::size_t s, std::size_t a) {
  const std::size_t cell = s / 4;
  if (a >= kCompassActions || !m.open(cell, static_cast<Direction>(a))) return s;
  return m.neighbor(cell, static_cast<Direction>(a)) * 4 + a;
}

// Sweeps every non-target (state, action) of the maze until nothing changes.
void sweep_to_convergence(GvfBank& bank, const Maze& m, std::size_t target_cell) {
  double change = 1.0;
  const GvfKey key{0, m.corridor_cell(target_cell)};
  while (change >= 1e-12) {
    change = 0.0;
    for (std::size_t s = 0; s < m.corridor_count() * 4; ++s) {
      if (s / 4 == target_cell) continue;
      for (std::size_t a = 0; a < kMazeActions; ++a) {
        const double before = bank.value(key, s, a);
        bank.update_all({0, s, a, next_state(m, s, a)});
        change = std::max(change, std::abs(bank.value(key, s, a) - before));
      }
    }
  }
}

// Uniform-policy reference for reaching `target` built from the maze graph.
EnumeratedMdp reach_mdp(const Maze& m, std::size_t target_cell) {
  EnumeratedMdp mdp(m.corridor_count() * 4, kMazeActions, 1);
  for (std::size_t s = 0; s < m.corridor_count() * 4; ++s) {
    if (s / 4 == target_cell) {
      mdp.set_terminal(s);
      continue;
    }
    for (std::size_t a = 0; a < kMazeActions; ++a) {
      const std::size_t n = next_state(m, s, a);
      mdp.add_outcome(s, a, n, 1.0, {n / 4 == target_cell ? 1.0 : 0.0});
    }
  }
  return mdp;
}

}  // namespace

TEST_SUITE("gvf") {
  TEST_CASE("ensure is idempotent and validates keys") {
    const Maze m = maze_load(kSmallMaze);
    GvfBank bank;
    bank.register_map(0, MapTopology::of(m, kMazeActions));
    const GvfHandle h = bank.ensure({0, Cell{1, 1}});
    CHECK(bank.ensure({0, Cell{1, 1}}) == h);
    CHECK(bank.size() == 1);
    CHECK_THROWS_AS(bank.ensure({0, Cell{0, 0}}), InvalidArgument);
    CHECK_THROWS_AS(bank.ensure({3, Cell{1, 1}}), InvalidArgument);
    for (double v : bank.at(h).table()) CHECK(v == 0.0);
  }

  TEST_CASE("missing GVFs read zero") {
    GvfBank bank;
    bank.register_map(0, MapTopology::open_grid(3, 3, 4));
    CHECK(bank.value({0, Cell{1, 1}}, 0, 2) == 0.0);
    CHECK(bank.value({7, Cell{1, 1}}, 0, 2) == 0.0);
    std::vector<double> row(4, 5.0);
    bank.values({0, Cell{2, 2}}, 3, row);
    CHECK(row == std::vector<double>(4, 0.0));
  }

  TEST_CASE("entering the target pays exactly 1") {
    GvfBank bank;
    bank.register_map(0, MapTopology::open_grid(1, 5, 4));
    bank.ensure({0, Cell{0, 4}});
    bank.ensure({0, Cell{0, 0}});
    bank.update_all({0, 3, 1, 4});
    CHECK(bank.value({0, Cell{0, 4}}, 3, 1) == 1.0);
    CHECK(bank.value({0, Cell{0, 0}}, 3, 1) == 0.0);
  }

  TEST_CASE("a 1x5 corridor converges to the discounted hitting values") {
    const double gamma = 0.99;
    GvfBank bank({TargetKind::uniform_mean, gamma}, 1.0);
    bank.register_map(0, MapTopology::open_grid(1, 5, 4));
    const GvfKey key{0, Cell{0, 4}};
    bank.ensure(key);
    const auto step = [](std::size_t s, std::size_t a) -> std::size_t {
      if (a == 1) return std::min<std::size_t>(s + 1, 4);
      if (a == 3) return s == 0 ? 0 : s - 1;
      return s;
    };
    for (int sweep = 0; sweep < 20000; ++sweep)
      for (std::size_t s = 0; s < 4; ++s)
        for (std::size_t a = 0; a < 4; ++a) bank.update_all({0, s, a, step(s, a)});

    EnumeratedMdp mdp(5, 4, 1);
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t a = 0; a < 4; ++a) mdp.add_outcome(s, a, step(s, a), 1.0, {step(s, a) == 4 ? 1.0 : 0.0});
    mdp.set_terminal(4);
    const QTable expected = ref::uniform_q(mdp, gamma);
    for (std::size_t s = 0; s < 4; ++s)
      for (std::size_t a = 0; a < 4; ++a) CHECK(std::abs(bank.value(key, s, a) - expected.at(s, a)) < 1e-6);
    for (std::size_t s = 0; s + 1 < 4; ++s) CHECK(bank.value(key, s, 1) < bank.value(key, s + 1, 1));
    CHECK(bank.value(key, 3, 1) == 1.0);
  }

  TEST_CASE("maze GVFs converge to the oracle and stay in [0,1]") {
    const Maze m = maze_load(kSmallMaze);
    const std::size_t target = static_cast<std::size_t>(m.corridor_index(Cell{3, 3}));
    GvfBank bank({TargetKind::uniform_mean, 0.9}, 1.0);
    bank.register_map(0, MapTopology::of(m, kMazeActions));
    const GvfKey key{0, m.corridor_cell(target)};
    bank.ensure(key);
    sweep_to_convergence(bank, m, target);
    const QTable expected = ref::uniform_q(reach_mdp(m, target), 0.9);
    const QTable library = policy_eval_exact(maze_target_mdp(m, m.corridor_cell(target)), PolicySpec::uniform(), 0.9);
    CHECK(max_abs_difference(expected, library) < 1e-10);
    for (std::size_t s = 0; s < m.corridor_count() * 4; ++s) {
      if (s / 4 == target) continue;
      for (std::size_t a = 0; a < kMazeActions; ++a) {
        CHECK(std::abs(bank.value(key, s, a) - expected.at(s, a)) < 1e-6);
        CHECK(bank.value(key, s, a) >= 0.0);
        CHECK(bank.value(key, s, a) <= 1.0);
      }
    }
  }

  TEST_CASE("values stay in [0,1] under arbitrary update orders") {
    for (TargetKind kind : {TargetKind::uniform_mean, TargetKind::max}) {
      const Maze m = maze_load(bundled_map_texts()[2]);
      GvfBank bank({kind, 0.99}, 1.0);
      bank.register_map(0, MapTopology::of(m, kMazeActions));
      Rng rng(3);
      for (int i = 0; i < 12; ++i) bank.ensure({0, m.corridor_cell(rng.below(m.corridor_count()))});
      for (int i = 0; i < 20000; ++i) {
        const std::size_t s = rng.below(m.corridor_count() * 4);
        const std::size_t a = rng.below(kMazeActions);
        bank.update_all({0, s, a, next_state(m, s, a)});
      }
      for (std::size_t slot = 0; slot < bank.size(); ++slot)
        for (double v : bank.at({0, slot}).table()) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
    }
  }

  TEST_CASE("parallel and serial fan-out agree bit for bit") {
    const Maze m = maze_load(bundled_map_texts()[0]);
    GvfBank a, b;
    a.register_map(0, MapTopology::of(m, kMazeActions));
    b.register_map(0, MapTopology::of(m, kMazeActions));
    for (std::size_t i = 0; i < m.corridor_count(); i += 3) {
      a.ensure({0, m.corridor_cell(i)});
      b.ensure({0, m.corridor_cell(i)});
    }
    Rng rng(8);
    for (int i = 0; i < 3000; ++i) {
      const std::size_t s = rng.below(m.corridor_count() * 4);
      const std::size_t act = rng.below(kMazeActions);
      const GvfTransition t{0, s, act, next_state(m, s, act)};
      a.update_all(t);
      b.update_all_serial(t);
    }
    for (std::size_t slot = 0; slot < a.size(); ++slot) {
      const auto x = a.at({0, slot}).table();
      const auto y = b.at({0, slot}).table();
      CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
    }
  }

  TEST_CASE("entry accounting and snapshots") {
    const Maze m = maze_load(kSmallMaze);
    GvfBank bank;
    bank.register_map(0, MapTopology::of(m, kMazeActions));
    bank.register_map(1, MapTopology::open_grid(2, 2, 4));
    bank.ensure({0, Cell{1, 1}});
    bank.ensure({0, Cell{3, 3}});
    bank.ensure({1, Cell{0, 1}});
    CHECK(bank.size() == 3);
    CHECK(bank.size(0) == 2);
    CHECK(bank.entry_count() == 2 * m.corridor_count() * 4 * kMazeActions + 4 * 4);
    bank.update_all({0, 0, 1, next_state(m, 0, 1)});

    std::stringstream ss;
    write_bank(ss, bank);
    const GvfBank back = read_bank(ss);
    CHECK(back.size() == bank.size());
    CHECK(back.created_order() == bank.created_order());
    for (std::size_t slot = 0; slot < 2; ++slot) {
      const auto x = bank.at({0, slot}).table();
      const auto y = back.at({0, slot}).table();
      CHECK(std::equal(x.begin(), x.end(), y.begin(), y.end()));
    }
  }
}
