// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "hra/gvf.hpp"
#include "hra/maze.hpp"
#include "hra/oracle.hpp"

namespace {

using namespace hra;

GvfBank full_bank(const Maze& maze) {
  GvfBank bank;
  bank.register_map(0, MapTopology::of(maze, kMazeActions));
  for (std::size_t i = 0; i < maze.corridor_count(); ++i) bank.ensure({0, maze.corridor_cell(i)});
  return bank;
}

template <bool Parallel>
void gvf_fan_out(benchmark::State& state) {
  const Maze maze = maze_load(bundled_map_texts()[0]);
  GvfBank bank = full_bank(maze);
  const std::size_t from = 0;
  const std::size_t to = maze.neighbor(0, Direction::east) * 4 + 1;
  for (auto _ : state) {
    const GvfTransition t{0, from * 4, 1, to};
    if constexpr (Parallel)
      bank.update_all(t);
    else
      bank.update_all_serial(t);
    benchmark::ClobberMemory();
  }
  state.counters["gvfs"] = static_cast<double>(bank.size());
}

template <bool Parallel>
void value_iteration_fruit(benchmark::State& state) {
  const std::vector<std::size_t> slots{0, 3, 4, 7, 9};
  const FruitJointMdp joint = fruit_joint_mdp(default_fruit_layout(), slots, true);
  for (auto _ : state) {
    const QTable q = Parallel ? value_iteration(joint.mdp, 1.0, 0.5) : value_iteration_serial(joint.mdp, 1.0, 0.5);
    benchmark::DoNotOptimize(q.q.data());
  }
}

template <bool Parallel>
void policy_evaluation_maze(benchmark::State& state) {
  const Maze maze = maze_load(bundled_map_texts()[1]);
  const EnumeratedMdp mdp = maze_target_mdp(maze, maze.pellets().front());
  const PolicyMatrix pi = uniform_policy(mdp);
  for (auto _ : state) {
    const QTable q = Parallel ? policy_eval_iterative(mdp, pi, 0.99, 1e-8)
                              : policy_eval_iterative_serial(mdp, pi, 0.99, 1e-8);
    benchmark::DoNotOptimize(q.q.data());
  }
}

BENCHMARK(gvf_fan_out<false>)->Name("gvf_update_all/serial");
BENCHMARK(gvf_fan_out<true>)->Name("gvf_update_all/openmp");
BENCHMARK(value_iteration_fruit<false>)->Name("value_iteration_fruit/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(value_iteration_fruit<true>)->Name("value_iteration_fruit/openmp")->Unit(benchmark::kMillisecond);
BENCHMARK(policy_evaluation_maze<false>)->Name("policy_eval_maze/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(policy_evaluation_maze<true>)->Name("policy_eval_maze/openmp")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
