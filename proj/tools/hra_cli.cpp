// Command-line front end: train, eval, verify, sweep, plot.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "hra/errors.hpp"
#include "hra/harness.hpp"
#include "hra/oracle.hpp"

namespace {

using namespace hra;

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed, std::string output) {
  const ExperimentConfig config = load_config(config_path);
  if (output.empty()) output = config.output.empty() ? "runs/" + config.agent.method : config.output;
  const std::vector<std::uint64_t> seeds = seed ? std::vector<std::uint64_t>{*seed} : config.seeds;
  for (const std::uint64_t s : seeds) {
    const RunOutput run = run_experiment(config, s, output);
    std::printf("seed %llu: %zu episodes, final eval score %.3f, final train score %.3f\n",
                static_cast<unsigned long long>(s), run.log.size(), run.log.final_eval_score(),
                run.log.final_train_score());
    std::printf("  metrics    %s\n  checkpoint %s\n", run.metrics_path.c_str(), run.checkpoint_path.c_str());
  }
  return 0;
}

int cmd_eval(const std::string& checkpoint, const std::string& protocol, std::size_t episodes,
             const std::string& reference, const std::string& record) {
  Checkpoint ckpt = load_checkpoint(checkpoint);
  if (!reference.empty()) ckpt.config.eval.reference = reference;
  const EvalKind kind = eval_kind_from_string(protocol);
  const EvalSummary s = evaluate_checkpoint(ckpt, kind, episodes);
  std::printf("protocol %s, %zu episodes: mean %.2f  min %.2f  max %.2f\n", std::string(to_string(kind)).c_str(),
              s.episodes.size(), s.mean, s.min, s.max);
  for (std::size_t i = 0; i < s.episodes.size(); ++i) {
    const EvalEpisode& e = s.episodes[i];
    std::printf("  episode %zu: score %.1f, steps %zu, levels %d, deaths %d, start %zu\n", i, e.score, e.steps,
                e.levels_completed, e.deaths, e.start_index);
  }
  if (!record.empty()) {
    if (!ckpt.maze) throw ConfigError("--record needs a maze checkpoint");
    const EpisodeLog log = record_maze_episode(*ckpt.maze, ckpt.config, ckpt.seed);
    save_episode_log(record, log);
    std::printf("recorded %zu transitions (score %.0f) to %s\n", log.transitions.size(), log.total_score,
                record.c_str());
  }
  return 0;
}

int cmd_verify(std::size_t count, std::uint64_t seed) {
  std::printf("%-34s %-6s %s\n", "check", "result", "deviation");
  bool all = true;
  const auto line = [&](const std::string& name, bool ok, double dev) {
    all = all && ok;
    std::printf("%-34s %-6s %.3e\n", name.c_str(), ok ? "pass" : "FAIL", dev);
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const EnumeratedMdp mdp = random_mdp(derive_seed(seed, 0, i));
    const double d = verify_upsilon_identity(mdp, 0.9);
    worst = std::max(worst, d);
    line("upsilon identity, random MDP " + std::to_string(i), d < 1e-10, d);
  }
  const OptimalDecompositionGap gap = optimal_decomposition_gap(constructed_inconsistent_mdp(), 0.9);
  line("optimal values differ (constructed)", gap.sup_norm > 0.1 && gap.differing_states > 0, gap.sup_norm);

  const EnumeratedMdp chain = [] {
    EnumeratedMdp m(3, 1, 1);
    m.add_outcome(0, 0, 1, 1.0, {0.0});
    m.add_outcome(1, 0, 2, 1.0, {1.0});
    m.set_terminal(2);
    return m;
  }();
  const QTable q = value_iteration(chain, 0.9, 1e-12);
  line("two-step chain value", std::abs(q.at(0, 0) - 0.9) < 1e-12, std::abs(q.at(0, 0) - 0.9));
  std::printf("worst identity deviation %.3e over %zu MDPs: %s\n", worst, count, all ? "all pass" : "FAILURES");
  return all ? 0 : 1;
}

int cmd_sweep(const std::string& grid_path, std::size_t jobs, const std::string& output) {
  const SweepGrid grid = load_grid(grid_path);
  const std::vector<SweepRow> rows = sweep(grid, jobs);
  if (output.empty() || output == "-") {
    write_sweep_csv(std::cout, grid, rows);
  } else {
    std::ofstream out(output);
    if (!out) throw InvalidArgument("cannot write " + output);
    write_sweep_csv(out, grid, rows);
    std::printf("%zu cells written to %s\n", rows.size(), output.c_str());
  }
  return 0;
}

int cmd_plot(const std::string& log_path, std::size_t window, const std::string& output) {
  const MetricsLog log = MetricsLog::load(log_path);
  if (output.empty() || output == "-") {
    write_plot_csv(std::cout, log, window);
  } else {
    std::ofstream out(output);
    if (!out) throw InvalidArgument("cannot write " + output);
    write_plot_csv(out, log, window);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid reward agents: fruit grid and maze experiments"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "train an agent from a JSON experiment config");
  std::string config_path;
  std::uint64_t seed_value = 0;
  std::string train_output;
  train->add_option("--config", config_path, "experiment config file")->required()->check(CLI::ExistingFile);
  auto* seed_opt = train->add_option("--seed", seed_value, "run seed (default: every seed listed in the config)");
  train->add_option("--output", train_output, "output directory (default: config output)");

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint greedily");
  std::string checkpoint;
  std::string protocol = "fixed";
  std::size_t episodes = 10;
  std::string reference;
  std::string record;
  eval->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval->add_option("--protocol", protocol, "fixed or random")->check(CLI::IsMember({"fixed", "random", "fixed-start", "random-start"}));
  eval->add_option("--episodes", episodes, "evaluation episodes");
  eval->add_option("--reference", reference, "reference trajectory for random starts");
  eval->add_option("--record", record, "write one greedy fixed-start trajectory to this file (maze)");

  auto* verify = app.add_subcommand("verify", "check the value-decomposition identities on random MDPs");
  std::size_t verify_count = 50;
  std::uint64_t verify_seed = 1;
  verify->add_option("--count", verify_count, "number of random MDPs");
  verify->add_option("--seed", verify_seed, "generator seed");

  auto* sweep_cmd = app.add_subcommand("sweep", "run a hyperparameter grid");
  std::string grid_path;
  std::size_t jobs = 1;
  std::string sweep_output;
  sweep_cmd->add_option("--grid", grid_path, "sweep grid file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--jobs", jobs, "parallel workers")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--output", sweep_output, "merged CSV (default: stdout)");

  auto* plot = app.add_subcommand("plot", "emit plot-ready smoothed curves from a metrics log");
  std::string log_path;
  std::size_t window = 100;
  std::string plot_output;
  plot->add_option("--log", log_path, "metrics CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--smooth", window, "trailing window")->check(CLI::PositiveNumber);
  plot->add_option("--output", plot_output, "output CSV (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train)
      return cmd_train(config_path, *seed_opt ? std::optional<std::uint64_t>(seed_value) : std::nullopt, train_output);
    if (*eval) return cmd_eval(checkpoint, protocol, episodes, reference, record);
    if (*verify) return cmd_verify(verify_count, verify_seed);
    if (*sweep_cmd) return cmd_sweep(grid_path, jobs, sweep_output);
    if (*plot) return cmd_plot(log_path, window, plot_output);
  } catch (const hra::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
