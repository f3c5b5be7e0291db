#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <string>

#include "criteria.hpp"
#include "gradcheck.hpp"
#include "hra/errors.hpp"
#include "hra/gvf.hpp"
#include "hra/maze.hpp"
#include "hra/net.hpp"
#include "hra/oracle.hpp"
#include "hra/rng.hpp"
#include "reference.hpp"

namespace acceptance {

using namespace hra;

namespace {

std::string format(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

// Sweeps every non-target (state, action) of a deterministic topology until
// no value moves by more than 1e-13.
template <typename Next>
void sweep(GvfBank& bank, const GvfKey& key, std::size_t states, std::size_t actions, Next next,
           bool (*is_target)(std::size_t, std::size_t), std::size_t target) {
  for (double change = 1.0; change >= 1e-13;) {
    change = 0.0;
    for (std::size_t s = 0; s < states; ++s) {
      if (is_target(s, target)) continue;
      for (std::size_t a = 0; a < actions; ++a) {
        const double before = bank.value(key, s, a);
        bank.update_all({key.map_id, s, a, next(s, a)});
        change = std::max(change, std::abs(bank.value(key, s, a) - before));
      }
    }
  }
}

struct GvfCheck {
  double worst = 0.0;
  bool bounded = true;
};

void compare(const GvfBank& bank, const GvfKey& key, const QTable& expected, std::size_t target_states_from,
             std::size_t target_states_to, GvfCheck& out) {
  for (std::size_t s = 0; s < expected.states; ++s)
    for (std::size_t a = 0; a < expected.actions; ++a) {
      const double v = bank.value(key, s, a);
      out.bounded = out.bounded && v >= 0.0 && v <= 1.0;
      if (s >= target_states_from && s < target_states_to) continue;
      out.worst = std::max(out.worst, std::abs(v - expected.at(s, a)));
    }
}

// Random 5x5 maze: border walls, a random interior, the player in a corner.
std::string random_small_maze(Rng& rng) {
  std::string text;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      if (r == 0 || c == 0 || r == 4 || c == 4) {
        text += '#';
      } else if (r == 1 && c == 1) {
        text += 'P';
      } else {
        text += rng.bernoulli(0.25) ? '#' : '.';
      }
    }
    text += '\n';
  }
  return text;
}

}  // namespace

Verdict upsilon_identity() {
  double library = 0.0;
  double independent = 0.0;
  std::size_t components = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const EnumeratedMdp mdp = random_mdp(1000 + seed, {20, 4, 5, 2});
    components += mdp.component_count();
    library = std::max(library, verify_upsilon_identity(mdp, 0.9));
    QTable sum(mdp.state_count(), mdp.action_count());
    for (std::size_t k = 0; k < mdp.component_count(); ++k)
      sum = sum + ref::uniform_q(mdp, 0.9, RewardSelector::only(k));
    independent = std::max(independent, max_abs_difference(sum, ref::uniform_q(mdp, 0.9)));
  }
  const double worst = std::max(library, independent);
  return {worst < 1e-8, format("max deviation %.3g (library) %.3g (dense reference), mean components %.1f", library,
                               independent, components / 50.0)};
}

Verdict optimal_decomposition_gap() {
  const EnumeratedMdp mdp = constructed_inconsistent_mdp();
  const OptimalDecompositionGap gap = hra::optimal_decomposition_gap(mdp, 0.9);
  return {gap.sup_norm > 0.1 && gap.differing_states >= 1,
          format("sup-norm gap %.4f, greedy policies differ in %.0f state(s)", gap.sup_norm,
                 static_cast<double>(gap.differing_states))};
}

Verdict location_gvf_sweeps() {
  const double gamma = 0.95;
  GvfCheck corridors;
  std::size_t corridor_targets = 0;
  for (int length = 2; length <= 12; ++length) {
    for (int target = 0; target < length; ++target) {
      GvfBank bank({TargetKind::uniform_mean, gamma}, 1.0);
      bank.register_map(0, MapTopology::open_grid(1, length, kCompassActions));
      const GvfKey key{0, Cell{0, target}};
      bank.ensure(key);
      const auto next = [length](std::size_t s, std::size_t a) -> std::size_t {
        if (a == static_cast<std::size_t>(Direction::east)) return std::min<std::size_t>(s + 1, length - 1);
        if (a == static_cast<std::size_t>(Direction::west)) return s == 0 ? 0 : s - 1;
        return s;
      };
      const auto is_target = [](std::size_t s, std::size_t t) { return s == t; };
      sweep(bank, key, length, kCompassActions, next, is_target, target);

      EnumeratedMdp mdp(length, kCompassActions, 1);
      for (std::size_t s = 0; s < static_cast<std::size_t>(length); ++s) {
        if (s == static_cast<std::size_t>(target)) {
          mdp.set_terminal(s);
          continue;
        }
        for (std::size_t a = 0; a < kCompassActions; ++a)
          mdp.add_outcome(s, a, next(s, a), 1.0, {next(s, a) == static_cast<std::size_t>(target) ? 1.0 : 0.0});
      }
      compare(bank, key, ref::uniform_q(mdp, gamma), target, target + 1, corridors);
      ++corridor_targets;
    }
  }

  GvfCheck mazes;
  double oracle_gap = 0.0;
  std::size_t maze_targets = 0;
  Rng rng(77);
  std::size_t built = 0;
  while (built < 10) {
    std::optional<Maze> parsed;
    try {
      parsed = maze_load(random_small_maze(rng));
    } catch (const ParseError&) {
      continue;
    }
    ++built;
    const Maze& m = *parsed;
    const std::size_t states = m.corridor_count() * 4;
    const auto next = [&m](std::size_t s, std::size_t a) -> std::size_t {
      const std::size_t cell = s / 4;
      if (a >= kCompassActions || !m.open(cell, static_cast<Direction>(a))) return s;
      return m.neighbor(cell, static_cast<Direction>(a)) * 4 + a;
    };
    const auto is_target = [](std::size_t s, std::size_t t) { return s / 4 == t; };
    for (std::size_t target = 0; target < m.corridor_count(); ++target) {
      GvfBank bank({TargetKind::uniform_mean, gamma}, 1.0);
      bank.register_map(0, MapTopology::of(m, kMazeActions));
      const GvfKey key{0, m.corridor_cell(target)};
      bank.ensure(key);
      sweep(bank, key, states, kMazeActions, next, is_target, target);

      EnumeratedMdp mdp(states, kMazeActions, 1);
      for (std::size_t s = 0; s < states; ++s) {
        if (s / 4 == target) {
          mdp.set_terminal(s);
          continue;
        }
        for (std::size_t a = 0; a < kMazeActions; ++a)
          mdp.add_outcome(s, a, next(s, a), 1.0, {next(s, a) / 4 == target ? 1.0 : 0.0});
      }
      const QTable expected = ref::uniform_q(mdp, gamma);
      const QTable library = policy_eval_exact(maze_target_mdp(m, m.corridor_cell(target)), PolicySpec::uniform(), gamma);
      oracle_gap = std::max(oracle_gap, max_abs_difference(expected, library));
      compare(bank, key, expected, target * 4, target * 4 + 4, mazes);
      ++maze_targets;
    }
  }
  const double worst = std::max({corridors.worst, mazes.worst, oracle_gap});
  const bool bounded = corridors.bounded && mazes.bounded;
  return {worst < 1e-6 && bounded,
          format("worst |GVF - oracle| %.3g over %.0f targets, library/reference oracle gap %.3g", worst,
                 static_cast<double>(corridor_targets + maze_targets), oracle_gap) +
              (bounded ? ", all values in [0,1]" : ", values left [0,1]")};
}

Verdict network_gradients() {
  Rng rng(404);
  double worst = 0.0;
  std::size_t checked = 0;
  bool weights_fixed = true;
  for (int i = 0; i < 20; ++i) {
    const std::size_t heads = 1 + rng.below(4);
    const NetShape shape{4 + rng.below(12), heads * (1 + rng.below(6)), heads, 2 + rng.below(3)};
    const bool blocks = i % 2 == 1;
    std::vector<std::vector<std::size_t>> inputs(heads);
    for (std::size_t k = 0; k < heads; ++k)
      for (std::size_t j = 0; j < shape.input_size; ++j)
        if (j % heads == k || rng.bernoulli(0.3)) inputs[k].push_back(j);
    SharedTrunkNet net = blocks ? SharedTrunkNet(shape, inputs, rng.next()) : SharedTrunkNet(shape, rng.next());
    for (UpdateMode mode : {UpdateMode::multi_head, UpdateMode::single_head}) {
      const auto batch = ref::random_batch(net, mode, 4, rng);
      const ref::GradCheck g = ref::check_gradient(net, batch, mode);
      worst = std::max(worst, g.worst_relative);
      checked += g.checked;
      const std::vector<double> before(net.aggregation_weights().begin(), net.aggregation_weights().end());
      for (int it = 0; it < 25; ++it) net_update(net, batch, mode, 0.01);
      const auto after = net.aggregation_weights();
      weights_fixed = weights_fixed && std::equal(before.begin(), before.end(), after.begin(), after.end()) &&
                      std::all_of(after.begin(), after.end(), [](double w) { return w == 1.0; });
    }
  }
  return {worst < 1e-4 && weights_fixed,
          format("worst relative error %.3g over %.0f derivatives", worst, static_cast<double>(checked)) +
              (weights_fixed ? ", aggregation weights bit-identical" : ", aggregation weights changed")};
}

}  // namespace acceptance
