#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "hra/errors.hpp"
#include "hra/fruit.hpp"
#include "hra/harness.hpp"

using namespace hra;
using nlohmann::json;

namespace {

ExperimentConfig fruit_config(const char* method, std::size_t episodes) {
  json doc = {{"env", {{"kind", "fruit"}}},
              {"agent", {{"method", method}, {"step_size", 0.05}}},
              {"episodes", episodes},
              {"eval", {{"every", 5}, {"episodes", 2}}}};
  return parse_config(doc);
}

ExperimentConfig maze_config(std::size_t episodes) {
  json doc = {{"env", {{"kind", "maze"}, {"step_limit", 400}}},
              {"agent", {{"method", "full-maze-hra"}}},
              {"episodes", episodes},
              {"eval", {{"every", 2}, {"episodes", 1}, {"max_steps", 300}}}};
  return parse_config(doc);
}

bool same_log(const MetricsLog& a, const MetricsLog& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a.rows()[i].same_result(b.rows()[i])) return false;
  return true;
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hra_unit_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("a (config, seed) pair determines the fruit log") {
    const ExperimentConfig c = fruit_config("hra", 20);
    const FruitRun a = train_fruit(c, 7);
    const FruitRun b = train_fruit(c, 7);
    CHECK(a.log.size() == 20);
    CHECK(same_log(a.log, b.log));
    const FruitRun other = train_fruit(c, 8);
    CHECK_FALSE(same_log(a.log, other.log));
  }

  TEST_CASE("methods differ under the same seed") {
    const FruitRun hra = train_fruit(fruit_config("hra", 20), 3);
    const FruitRun dqn = train_fruit(fruit_config("dqn", 20), 3);
    CHECK_FALSE(same_log(hra.log, dqn.log));
  }

  TEST_CASE("zero episodes give an empty log") {
    CHECK(train_fruit(fruit_config("hra+3", 0), 1).log.empty());
    CHECK(train_maze(maze_config(0), 1).log.empty());
  }

  TEST_CASE("evaluation runs on the configured schedule") {
    const FruitRun run = train_fruit(fruit_config("hra+2", 12), 2);
    for (const MetricsRow& row : run.log.rows()) {
      CHECK(row.eval_score.has_value() == ((row.episode + 1) % 5 == 0));
      CHECK(row.steps <= kFruitStepLimit);
      if (row.eval_steps) CHECK(*row.eval_steps <= kFruitStepLimit);
    }
  }

  TEST_CASE("evaluation does not change the agent") {
    const FruitRun run = train_fruit(fruit_config("hra+3", 30), 4);
    EvalSpec eval;
    const EvalSummary a = evaluate_fruit(*run.agent, eval, EvalKind::fixed_start, 5, 4);
    const EvalSummary b = evaluate_fruit(*run.agent, eval, EvalKind::fixed_start, 5, 4);
    REQUIRE(a.episodes.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(a.episodes[i].score == b.episodes[i].score);
      CHECK(a.episodes[i].steps == b.episodes[i].steps);
    }
    CHECK(a.min <= a.mean);
    CHECK(a.mean <= a.max);
  }

  TEST_CASE("random start from an empty reference equals a plain start") {
    const FruitRun run = train_fruit(fruit_config("hra+3", 30), 5);
    EpisodeLog reference;
    reference.seed = 99;
    EvalSpec eval;
    const EvalSummary random = evaluate_fruit(*run.agent, eval, EvalKind::random_start, 3, 5, 0, &reference);
    const EvalEpisode plain = fruit_greedy_episode(*run.agent, 99);
    for (const EvalEpisode& ep : random.episodes) {
      CHECK(ep.start_index == 0);
      CHECK(ep.score == plain.score);
      CHECK(ep.steps == plain.steps);
    }
    CHECK_THROWS_AS(evaluate_fruit(*run.agent, eval, EvalKind::random_start, 1, 5), ConfigError);
  }

  TEST_CASE("maze training is deterministic and evaluation is pure") {
    const ExperimentConfig c = maze_config(3);
    const MazeRun a = train_maze(c, 11);
    const MazeRun b = train_maze(c, 11);
    CHECK(a.log.size() == 3);
    CHECK(same_log(a.log, b.log));
    CHECK(a.log.rows().back().gvf_count > 0);
    const EvalSummary e1 = evaluate_maze(*a.agent, c, EvalKind::fixed_start, 2, 11);
    const EvalSummary e2 = evaluate_maze(*a.agent, c, EvalKind::fixed_start, 2, 11);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(e1.episodes[i].score == e2.episodes[i].score);
      CHECK(e1.episodes[i].steps <= 300);
    }
  }

  TEST_CASE("random starts replay the shipped maze reference") {
    const EpisodeLog reference = load_episode_log(std::string(HRA_TEST_DATA) + "/maze_reference.csv");
    REQUIRE(reference.transitions.size() == reference.steps);
    REQUIRE(reference.steps > 100);
    CHECK(reference.total_score > 0.0);
    const ExperimentConfig c = maze_config(2);
    const MazeRun run = train_maze(c, 4);
    const EvalSummary a = evaluate_maze(*run.agent, c, EvalKind::random_start, 4, 4, 0, &reference);
    const EvalSummary b = evaluate_maze(*run.agent, c, EvalKind::random_start, 4, 4, 0, &reference);
    REQUIRE(a.episodes.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(a.episodes[i].start_index < reference.steps);
      CHECK(a.episodes[i].start_index == b.episodes[i].start_index);
      CHECK(a.episodes[i].score == b.episodes[i].score);
    }
    CHECK_THROWS_AS(evaluate_maze(*run.agent, c, EvalKind::random_start, 1, 4), ConfigError);
  }

  TEST_CASE("metrics CSV round trip") {
    MetricsLog log;
    log.append({0, 1.5, 2.0, 10, 12.0, 0, 3, 4, 0.25});
    log.append({1, -3.0, std::nullopt, 20, std::nullopt, 1, 5, 6, 0.5});
    std::stringstream ss;
    log.write_csv(ss);
    CHECK(ss.str().rfind(std::string(MetricsLog::kHeader), 0) == 0);
    const MetricsLog back = MetricsLog::read_csv(ss);
    CHECK(same_log(log, back));
    CHECK_FALSE(back.rows()[1].eval_score.has_value());
    CHECK(log.final_eval_score() == 2.0);
    CHECK(log.final_train_score() == doctest::Approx(-0.75));

    std::stringstream bad("episode,score\n1,2\n");
    CHECK_THROWS_AS(MetricsLog::read_csv(bad), ParseError);
  }

  TEST_CASE("plot CSV smooths scores") {
    MetricsLog log;
    for (std::size_t i = 0; i < 4; ++i) log.append({i, double(i), std::nullopt, 1, std::nullopt, 0, 0, 0, 0.0});
    std::stringstream ss;
    write_plot_csv(ss, log, 2);
    std::string header, line;
    std::getline(ss, header);
    std::size_t lines = 0;
    while (std::getline(ss, line)) ++lines;
    CHECK(lines == 4);
  }

  TEST_CASE("checkpoints round trip") {
    const ExperimentConfig c = fruit_config("hra+1", 5);
    const FruitRun run = train_fruit(c, 6);
    const auto path = scratch("fruit.bin").string();
    save_checkpoint(path, c, 6, run.agent.get(), nullptr);
    const Checkpoint ck = load_checkpoint(path);
    CHECK(ck.seed == 6);
    CHECK(ck.config.to_json() == c.to_json());
    REQUIRE(ck.fruit);
    for (StateId s : {StateId{0}, StateId{17}, StateId{3000}})
      CHECK(ck.fruit->action_values(s) == run.agent->action_values(s));

    const ExperimentConfig m = maze_config(2);
    const MazeRun mrun = train_maze(m, 2);
    const auto mpath = scratch("maze.bin").string();
    save_checkpoint(mpath, m, 2, nullptr, mrun.agent.get());
    const Checkpoint mck = load_checkpoint(mpath);
    REQUIRE(mck.maze);
    const EvalSummary before = evaluate_maze(*mrun.agent, m, EvalKind::fixed_start, 1, 2);
    const EvalSummary after = evaluate_checkpoint(mck, EvalKind::fixed_start, 1);
    CHECK(before.episodes[0].score == after.episodes[0].score);
    CHECK(before.episodes[0].steps == after.episodes[0].steps);

    CHECK_THROWS(load_checkpoint(scratch("missing.bin").string()));
  }

  TEST_CASE("run_experiment writes its files") {
    const auto dir = scratch("run").string();
    const RunOutput out = run_experiment(fruit_config("hra+2", 4), 9, dir);
    CHECK(std::filesystem::exists(out.metrics_path));
    CHECK(std::filesystem::exists(out.checkpoint_path));
    CHECK(same_log(MetricsLog::load(out.metrics_path), out.log));
  }

  TEST_CASE("sweep over three gammas and three seeds") {
    json doc = {{"base", fruit_config("hra+2", 3).to_json()},
                {"axes", {{"agent.gamma", {0.5, 0.9, 0.99}}, {"agent.step_size", {0.5, 1.0, 2.0}}}},
                {"seeds", {1, 2, 3}}};
    const SweepGrid grid = parse_grid(doc);
    const std::vector<SweepRow> serial = sweep(grid, 1);
    CHECK(serial.size() == 27);
    const std::vector<SweepRow> parallel = sweep(grid, 8);
    REQUIRE(parallel.size() == 27);
    std::size_t failed = 0;
    for (std::size_t i = 0; i < 27; ++i) {
      CHECK(serial[i].values == parallel[i].values);
      CHECK(serial[i].seed == parallel[i].seed);
      CHECK(serial[i].status == parallel[i].status);
      CHECK(serial[i].final_eval_score == parallel[i].final_eval_score);
      if (serial[i].status != "ok") ++failed;
    }
    // Step size 2 is out of range for tabular heads.
    CHECK(failed == 9);

    std::stringstream ss;
    write_sweep_csv(ss, grid, serial);
    std::string line;
    std::size_t lines = 0;
    while (std::getline(ss, line)) ++lines;
    CHECK(lines == 28);
    CHECK_THROWS_AS(sweep(grid, 0), InvalidArgument);
    CHECK_THROWS_AS(parse_grid(json{{"axes", json::object()}}), ConfigError);
  }

  TEST_CASE("the full maze agent beats the random policy fivefold") {
    json doc = {{"env", {{"kind", "maze"}}},
                {"agent", {{"method", "full-maze-hra"}}},
                {"episodes", 500},
                {"eval", {{"every", 50}, {"episodes", 1}}}};
    const ExperimentConfig c = parse_config(doc);
    const MazeRun run = train_maze(c, 1);
    const double random = maze_random_policy_score(c, 20, 1);
    CHECK(random > 0.0);
    CHECK(run.log.final_eval_score(3) >= 5.0 * random);
  }

  TEST_CASE("random policy score on the maze is reproducible") {
    const ExperimentConfig c = maze_config(0);
    CHECK(maze_random_policy_score(c, 2, 1) == maze_random_policy_score(c, 2, 1));
  }
}
