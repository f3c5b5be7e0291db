#include <doctest.h>

#include <cmath>

#include "hra/agent.hpp"
#include "hra/errors.hpp"
#include "hra/maze.hpp"
#include "hra/maze_agent.hpp"

using namespace hra;

namespace {

// A 1x5 open strip with a GVF at its east end, trained once from the cell next to it.
struct Strip {
  GvfBank bank{TargetRule{TargetKind::uniform_mean, 0.99}, 1.0};
  Strip() {
    bank.register_map(0, MapTopology::open_grid(1, 5, kMazeActions));
    bank.ensure({0, Cell{0, 4}});
    bank.update_all({0, 3, 1, 4});
  }
};

HeadMatrix matrix(std::initializer_list<std::pair<ObjectKind, std::vector<double>>> rows) {
  HeadMatrix m;
  for (const auto& [kind, values] : rows) m.push_back({kind, values});
  return m;
}

}  // namespace

TEST_SUITE("agent") {
  TEST_CASE("head values scale GVF values by the object multiplier") {
    Strip strip;
    const ObjectHead pellet{ObjectKind::pellet, Cell{0, 4}, 10.0};
    const HeadMatrix rows = head_values({&strip.bank, &strip.bank}, 0, 3, std::span(&pellet, 1), kMazeActions);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].values[1] == 10.0);
    for (std::size_t a = 0; a < kMazeActions; ++a)
      CHECK(rows[0].values[a] == 10.0 * strip.bank.value({0, Cell{0, 4}}, 3, a));
  }

  TEST_CASE("no objects gives an empty matrix and zero aggregate") {
    Strip strip;
    const HeadMatrix rows = head_values({&strip.bank, &strip.bank}, 0, 3, {}, kMazeActions);
    CHECK(rows.empty());
    for (AggregatorKind k : {AggregatorKind::linear_sum, AggregatorKind::normalized})
      CHECK(aggregate(rows, {k, -10.0}, kMazeActions) == std::vector<double>(kMazeActions, 0.0));
  }

  TEST_CASE("objects without a GVF produce zero rows") {
    Strip strip;
    const ObjectHead fruit{ObjectKind::fruit, Cell{0, 0}, 200.0};
    const HeadMatrix rows = head_values({&strip.bank, &strip.bank}, 0, 3, std::span(&fruit, 1), kMazeActions);
    CHECK(rows[0].values == std::vector<double>(kMazeActions, 0.0));
  }

  TEST_CASE("linear sum") {
    const HeadMatrix m = matrix({{ObjectKind::pellet, {1, 2}}, {ObjectKind::ghost, {3, 4}}});
    CHECK(aggregate(m, {AggregatorKind::linear_sum}, 2) == std::vector<double>{4, 6});
    const HeadMatrix single = matrix({{ObjectKind::fruit, {7, -1, 3}}});
    CHECK(aggregate(single, {AggregatorKind::linear_sum}, 3) == std::vector<double>{7, -1, 3});
  }

  TEST_CASE("linear sum is additive over head sets") {
    Rng rng(4);
    HeadMatrix a, b;
    for (int i = 0; i < 6; ++i) {
      HeadRow r{ObjectKind::pellet, {}};
      for (int j = 0; j < 5; ++j) r.values.push_back(double(rng.below(100)) - 50.0);
      (i % 2 ? a : b).push_back(r);
    }
    HeadMatrix both = a;
    both.insert(both.end(), b.begin(), b.end());
    const auto sa = aggregate(a, {}, 5);
    const auto sb = aggregate(b, {}, 5);
    const auto sab = aggregate(both, {}, 5);
    for (std::size_t i = 0; i < 5; ++i) CHECK(sab[i] == sa[i] + sb[i]);
  }

  TEST_CASE("normalized aggregator") {
    const HeadMatrix m = matrix({{ObjectKind::pellet, {5, 10, 0}}, {ObjectKind::ghost, {0, 0, 0}}});
    CHECK(aggregate(m, {AggregatorKind::normalized, -10.0}, 3) == std::vector<double>{0.5, 1.0, 0.0});
    const HeadMatrix flat = matrix({{ObjectKind::pellet, {3, 3, 3}}});
    CHECK(aggregate(flat, {AggregatorKind::normalized, -10.0}, 3) == std::vector<double>{0, 0, 0});
    const HeadMatrix ghost = matrix({{ObjectKind::pellet, {0, 1}}, {ObjectKind::ghost, {0.5, 0.0}}});
    CHECK(aggregate(ghost, {AggregatorKind::normalized, -10.0}, 2) == std::vector<double>{-5.0, 1.0});
    const HeadMatrix blue = matrix({{ObjectKind::blue_ghost, {1000, 0}}, {ObjectKind::pellet, {0, 10}}});
    CHECK(aggregate(blue, {AggregatorKind::normalized, -10.0}, 2) == std::vector<double>{1.0, 0.0});
  }

  TEST_CASE("normalized score part stays in [0,1]") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
      HeadMatrix m;
      for (int i = 0; i < 1 + int(rng.below(6)); ++i) {
        HeadRow r{rng.bernoulli(0.5) ? ObjectKind::pellet : ObjectKind::fruit, {}};
        for (int j = 0; j < 5; ++j) r.values.push_back(rng.uniform(-1000.0, 1000.0));
        m.push_back(r);
      }
      for (double v : aggregate(m, {AggregatorKind::normalized, -10.0}, 5)) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }

  TEST_CASE("in the normalized mode ghosts keep a unit multiplier") {
    MazeWorld world;
    world.reset(1);
    const auto normalized = maze_objects(world, {}, AggregatorKind::normalized);
    const auto linear = maze_objects(world, {}, AggregatorKind::linear_sum);
    std::size_t ghosts = 0;
    for (std::size_t i = 0; i < normalized.size(); ++i) {
      if (normalized[i].kind != ObjectKind::ghost) continue;
      ++ghosts;
      CHECK(normalized[i].multiplier == 1.0);
      CHECK(linear[i].multiplier == -1000.0);
    }
    CHECK(ghosts == kGhosts);
    CHECK(normalized.size() == world.maze().pellets().size() + world.maze().power_pellets().size() + kGhosts);
  }

  TEST_CASE("diversification") {
    Rng a(3), b(3);
    const auto early = diversification_values(49, a, 5);
    for (double v : early) {
      CHECK(v >= 0.0);
      CHECK(v <= 20.0);
    }
    CHECK(diversification_values(49, b, 5) == early);
    CHECK(diversification_values(50, a, 5) == std::vector<double>(5, 0.0));
  }

  TEST_CASE("exploration bonus") {
    ExplorationState zero(0.0);
    CHECK(exploration_bonus(zero, 0, 4) == std::vector<double>(4, 0.0));

    ExplorationState es(1.0);
    es.set_total(16);
    es.set(7, 2, 2);
    CHECK(exploration_bonus(es, 7, 5)[2] == doctest::Approx(1.0));

    ExplorationState unit(1.0);
    unit.set_total(1);
    CHECK(exploration_bonus(unit, 0, 1)[0] == doctest::Approx(1.0));

    ExplorationState counted(1.0);
    counted.record(3, 1);
    counted.record(3, 1);
    CHECK(counted.count(3, 1) == 3);
    CHECK(counted.count(3, 0) == 1);
    CHECK(counted.total_actions() == 2);
    CHECK_THROWS_AS(ExplorationState(-1.0), InvalidArgument);
  }

  TEST_CASE("executive memory") {
    ExecutiveMemory mem;
    CHECK(memory_step(mem, 1, 0, 5) == std::vector<double>(5, 0.0));

    mem.begin_episode();
    for (std::size_t a : {2u, 0u, 4u}) mem.record(a);
    mem.on_level_complete(1);
    CHECK(memory_step(mem, 1, 0, 5) == std::vector<double>{0, 0, kMemoryForce, 0, 0});
    CHECK(memory_step(mem, 1, 2, 5)[4] == kMemoryForce);
    CHECK(memory_step(mem, 1, 3, 5) == std::vector<double>(5, 0.0));

    mem.record(1);
    mem.on_death();
    mem.record(3);
    mem.on_level_complete(2);
    CHECK_FALSE(mem.has(2));
    CHECK(mem.clean());

    mem.record(1);
    mem.on_level_complete(1);
    CHECK(mem.recorded().at(1) == std::vector<std::size_t>{2, 0, 4});
  }

  TEST_CASE("action selection") {
    const std::vector<double> zeros(5, 0.0);
    CHECK(select_action(zeros, zeros, zeros, zeros) == 0);
    const std::vector<double> agg{3, 900, -2, 5, 1};
    std::vector<double> force(5, 0.0);
    force[2] = kMemoryForce;
    CHECK(select_action(agg, std::vector<double>{20, 0, 0, 20, 0}, std::vector<double>{1, 1, 1, 1, 1}, force) == 2);
    CHECK(select_action(agg, zeros, zeros, zeros) == 1);
    std::vector<double> scaled = agg;
    for (double& v : scaled) v *= 7.5;
    CHECK(select_action(scaled, zeros, zeros, zeros) == 1);
    CHECK_THROWS_AS(select_action(agg, std::vector<double>(4, 0.0), zeros, zeros), InvalidArgument);
  }

  TEST_CASE("the first move creates GVFs for exactly the visited cells") {
    MazeWorld world;
    world.reset(1);
    world.clear_freeze();
    MazeAgentConfig config;
    MazeAgent agent(config, world);
    CHECK(agent.gvf_count() == 0);
    MazeEpisode ep = agent.begin_episode(1, true);
    const Cell before = world.player();
    const std::size_t map = world.map_id();
    const int level = world.level();
    const auto t = world.step(ActionId{static_cast<std::size_t>(Direction::west)});
    agent.observe(t, map, level, world, ep, true);
    const Cell after = world.player();
    REQUIRE(before != after);
    CHECK(agent.gvf_count() == 2);
    CHECK(agent.score_bank().contains({map, before}));
    CHECK(agent.score_bank().contains({map, after}));
    CHECK(agent.exploration().total_actions() == 1);
  }

  TEST_CASE("greedy choice is a pure function of the bank and object positions") {
    MazeWorld world;
    world.reset(2);
    world.clear_freeze();
    MazeAgentConfig config;
    config.kappa = 0.0;
    config.targeted_exploration = false;
    config.diversification = false;
    MazeAgent agent(config, world);
    MazeEpisode train = agent.begin_episode(2, true);
    for (int i = 0; i < 200 && !world.done(); ++i) {
      const std::size_t map = world.map_id();
      const int level = world.level();
      const auto t = world.step(ActionId{agent.act(world, train, true)});
      agent.observe(t, map, level, world, train, true);
    }
    MazeEpisode e1 = agent.begin_episode(5, false);
    MazeEpisode e2 = agent.begin_episode(99, false);
    e2.step = 3;
    CHECK(agent.act(world, e1, false) == agent.act(world, e2, false));
  }
}
