#include "hra/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "hra/errors.hpp"
#include "hra/stats.hpp"

namespace hra {

using nlohmann::json;

namespace {

enum Stream : std::uint64_t {
  kFruitTrain = 11,
  kFruitBehavior,
  kFruitEval,
  kAgentInit,
  kGame,
  kEvalGame,
  kAgentEpisode,
  kEvalStart,
  kRandomPolicy,
};

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad number '" + s + "'", line, 0);
  }
}

EpisodeLog load_reference(const EvalSpec& eval) {
  if (eval.reference.empty()) throw ConfigError("random-start evaluation needs a reference trajectory");
  return load_episode_log(eval.reference);
}

/// Reference index to restore: uniform over the states the trajectory
/// visits, excluding a final game-over state.
std::size_t draw_start_index(const EpisodeLog& reference, Rng& rng) {
  const std::size_t n = reference.transitions.size();
  const bool ends_terminal = n > 0 && reference.transitions.back().terminal;
  const std::size_t choices = ends_terminal ? n : n + 1;
  return choices == 0 ? 0 : static_cast<std::size_t>(rng.below(choices));
}

}  // namespace

bool MetricsRow::same_result(const MetricsRow& o) const {
  return episode == o.episode && train_score == o.train_score && eval_score == o.eval_score && steps == o.steps &&
         eval_steps == o.eval_steps && levels_completed == o.levels_completed && head_count == o.head_count &&
         gvf_count == o.gvf_count;
}

namespace {

double tail_mean(const std::vector<MetricsRow>& rows, std::size_t window,
                 const std::function<std::optional<double>(const MetricsRow&)>& field) {
  std::vector<double> values;
  for (auto it = rows.rbegin(); it != rows.rend() && values.size() < window; ++it)
    if (const auto v = field(*it)) values.push_back(*v);
  return mean(values);
}

}  // namespace

double MetricsLog::final_eval_score(std::size_t window) const {
  const bool any_eval = std::any_of(rows_.begin(), rows_.end(), [](const MetricsRow& r) { return r.eval_score.has_value(); });
  if (!any_eval) return final_train_score(window);
  return tail_mean(rows_, window, [](const MetricsRow& r) { return r.eval_score; });
}

double MetricsLog::final_eval_steps(std::size_t window) const {
  return tail_mean(rows_, window, [](const MetricsRow& r) { return r.eval_steps; });
}

double MetricsLog::final_train_score(std::size_t window) const {
  return tail_mean(rows_, window, [](const MetricsRow& r) { return std::optional<double>(r.train_score); });
}

void MetricsLog::write_csv(std::ostream& os) const {
  os << kHeader << '\n';
  const auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
  for (const MetricsRow& r : rows_) {
    os << r.episode << ',' << format_number(r.train_score) << ',' << opt(r.eval_score) << ',' << r.steps << ','
       << opt(r.eval_steps) << ',' << r.levels_completed << ',' << r.head_count << ',' << r.gvf_count << ','
       << format_number(r.wall_time_ms) << '\n';
  }
}

MetricsLog MetricsLog::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader) throw ParseError("metrics log header mismatch", 1, 1);
  MetricsLog log;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 9) throw ParseError("metrics row needs 9 fields", line_no, 1);
    const auto opt = [&](const std::string& s) {
      return s.empty() ? std::nullopt : std::optional<double>(parse_double(s, line_no));
    };
    MetricsRow r;
    r.episode = static_cast<std::size_t>(parse_double(cells[0], line_no));
    r.train_score = parse_double(cells[1], line_no);
    r.eval_score = opt(cells[2]);
    r.steps = static_cast<std::size_t>(parse_double(cells[3], line_no));
    r.eval_steps = opt(cells[4]);
    r.levels_completed = static_cast<int>(parse_double(cells[5], line_no));
    r.head_count = static_cast<std::size_t>(parse_double(cells[6], line_no));
    r.gvf_count = static_cast<std::size_t>(parse_double(cells[7], line_no));
    r.wall_time_ms = parse_double(cells[8], line_no);
    log.append(r);
  }
  return log;
}

void MetricsLog::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_csv(out);
}

MetricsLog MetricsLog::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  return read_csv(in);
}

EvalSummary summarize(std::vector<EvalEpisode> episodes) {
  EvalSummary s;
  s.episodes = std::move(episodes);
  if (s.episodes.empty()) return s;
  s.min = s.max = s.episodes.front().score;
  double total = 0.0;
  for (const EvalEpisode& e : s.episodes) {
    total += e.score;
    s.min = std::min(s.min, e.score);
    s.max = std::max(s.max, e.score);
  }
  s.mean = total / static_cast<double>(s.episodes.size());
  return s;
}

std::uint64_t fruit_train_seed(std::uint64_t seed, std::size_t episode) {
  return derive_seed(seed, kFruitTrain, episode);
}

std::uint64_t fruit_eval_seed(std::uint64_t seed, std::size_t round, std::size_t repeat) {
  return derive_seed(derive_seed(seed, kFruitEval, round), kFruitEval, repeat);
}

std::uint64_t maze_game_seed(const EnvSpec& env, std::uint64_t seed, std::size_t episode) {
  return env.fixed_game_seed ? derive_seed(seed, kGame) : derive_seed(seed, kGame, episode + 1);
}

// ---------------------------------------------------------------- fruit

FruitRun train_fruit(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.env.kind != EnvKind::fruit) throw ConfigError("train_fruit needs the fruit environment");
  FruitRun run;
  run.agent = make_fruit_agent(config.agent.fruit, derive_seed(seed, kAgentInit));
  std::optional<EpisodeLog> reference;
  if (config.eval.protocol == EvalKind::random_start) reference = load_reference(config.eval);

  FruitGrid grid;
  Rng behavior(derive_seed(seed, kFruitBehavior));
  for (std::size_t e = 0; e < config.episodes; ++e) {
    const auto start = std::chrono::steady_clock::now();
    MetricsRow row;
    row.episode = e;
    grid.reset(fruit_train_seed(seed, e));
    while (!grid.done()) {
      const DecomposedTransition t = grid.step(ActionId{static_cast<std::size_t>(behavior.below(kCompassActions))});
      run.agent->learn(t);
      row.train_score += t.r_env;
      ++row.steps;
    }
    if ((e + 1) % config.eval.every == 0 && config.eval.episodes > 0) {
      const EvalSummary s = evaluate_fruit(*run.agent, config.eval, config.eval.protocol, config.eval.episodes, seed,
                                           e, reference ? &*reference : nullptr);
      row.eval_score = s.mean;
      double steps = 0.0;
      for (const EvalEpisode& ep : s.episodes) steps += static_cast<double>(ep.steps);
      row.eval_steps = steps / static_cast<double>(s.episodes.size());
    }
    row.head_count = kFruitSlots;
    row.gvf_count = config.agent.fruit.method == FruitMethod::hra_plus3 ? kFruitSlots : 0;
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    run.log.append(row);
  }
  return run;
}

namespace {

EvalEpisode play_fruit_greedy(const FruitAgent& agent, FruitGrid& grid, std::size_t max_steps) {
  EvalEpisode ep;
  while (!grid.done() && ep.steps < max_steps) {
    const auto q = agent.action_values(grid.state());
    const DecomposedTransition t = grid.step(ActionId{argmax(q)});
    ep.score += t.r_env;
    ++ep.steps;
  }
  ep.finished = grid.active().none();
  return ep;
}

}  // namespace

EvalEpisode fruit_greedy_episode(const FruitAgent& agent, std::uint64_t env_seed, std::size_t max_steps) {
  FruitGrid grid;
  grid.reset(env_seed);
  return play_fruit_greedy(agent, grid, max_steps);
}

EvalSummary evaluate_fruit(const FruitAgent& agent, const EvalSpec& eval, EvalKind protocol, std::size_t episodes,
                           std::uint64_t seed, std::size_t round, const EpisodeLog* reference) {
  const std::size_t max_steps = eval.max_steps == 0 ? kFruitStepLimit : eval.max_steps;
  std::vector<EvalEpisode> out;
  if (protocol == EvalKind::fixed_start) {
    for (std::size_t i = 0; i < episodes; ++i)
      out.push_back(fruit_greedy_episode(agent, fruit_eval_seed(seed, round, i), max_steps));
    return summarize(std::move(out));
  }
  if (!reference) throw ConfigError("random-start evaluation needs a reference trajectory");
  for (std::size_t i = 0; i < episodes; ++i) {
    Rng rng(derive_seed(seed, kEvalStart, round * 65536 + i));
    const std::size_t j = draw_start_index(*reference, rng);
    FruitGrid grid;
    grid.reset(reference->seed);
    for (std::size_t k = 0; k < j && !grid.done(); ++k) grid.step(reference->transitions[k].a);
    EvalEpisode ep = play_fruit_greedy(agent, grid, max_steps);
    ep.start_index = j;
    out.push_back(std::move(ep));
  }
  return summarize(std::move(out));
}

// ---------------------------------------------------------------- maze

namespace {

void note_step(EvalEpisode& ep, const DecomposedTransition& t, int level_before) {
  ep.score += t.r_env;
  if (t.has(Event::ghost_contact)) {
    ++ep.deaths;
    if (ep.level_deaths.size() < static_cast<std::size_t>(level_before)) ep.level_deaths.resize(level_before, 0);
    ++ep.level_deaths[static_cast<std::size_t>(level_before - 1)];
  }
}

/// Plays greedily from the world's current state until game over or the
/// step budget is spent.
void play_maze_greedy(const MazeAgent& agent, MazeWorld& world, MazeEpisode& episode, std::size_t max_steps,
                      EvalEpisode& ep, EpisodeLog* record = nullptr) {
  while (!world.done() && ep.steps < max_steps) {
    const std::size_t a = agent.act(world, episode, false);
    const int level_before = world.level();
    const DecomposedTransition t = world.step(ActionId{a});
    MazeAgent::track(t, episode);
    note_step(ep, t, level_before);
    ++ep.steps;
    if (record) {
      record->total_score += t.r_env;
      record->transitions.push_back(t);
    }
  }
  if (record) record->steps = record->transitions.size();
}

std::size_t maze_max_steps(const EvalSpec& eval) { return eval.max_steps == 0 ? 10'000 : eval.max_steps; }

}  // namespace

MazeRun train_maze(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.env.kind != EnvKind::maze || config.agent.method != kMazeMethod)
    throw ConfigError("train_maze needs the maze environment and method full-maze-hra");
  MazeWorld world = make_maze_world(config.env);
  MazeRun run;
  run.agent = std::make_unique<MazeAgent>(config.agent.maze, world);
  std::optional<EpisodeLog> reference;
  if (config.eval.protocol == EvalKind::random_start) reference = load_reference(config.eval);

  for (std::size_t e = 0; e < config.episodes; ++e) {
    const auto start = std::chrono::steady_clock::now();
    MetricsRow row;
    row.episode = e;
    world.reset(maze_game_seed(config.env, seed, e));
    MazeEpisode episode = run.agent->begin_episode(derive_seed(seed, kAgentEpisode, e), true);
    while (!world.done() && row.steps < config.env.step_limit) {
      const std::size_t a = run.agent->act(world, episode, true);
      const std::size_t map_before = world.map_id();
      const int level_before = world.level();
      const DecomposedTransition t = world.step(ActionId{a});
      run.agent->observe(t, map_before, level_before, world, episode, true);
      row.train_score += t.r_env;
      ++row.steps;
    }
    row.levels_completed = world.levels_completed();
    if ((e + 1) % config.eval.every == 0 && config.eval.episodes > 0) {
      const EvalSummary s = evaluate_maze(*run.agent, config, config.eval.protocol, config.eval.episodes, seed, e,
                                          reference ? &*reference : nullptr);
      row.eval_score = s.mean;
      double steps = 0.0;
      for (const EvalEpisode& ep : s.episodes) steps += static_cast<double>(ep.steps);
      row.eval_steps = steps / static_cast<double>(s.episodes.size());
    }
    row.head_count = run.agent->head_count();
    row.gvf_count = run.agent->gvf_count();
    row.wall_time_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    run.log.append(row);
  }
  return run;
}

EvalSummary evaluate_maze(const MazeAgent& agent, const ExperimentConfig& config, EvalKind protocol,
                          std::size_t episodes, std::uint64_t seed, std::size_t round, const EpisodeLog* reference) {
  if (protocol == EvalKind::random_start && !reference)
    throw ConfigError("random-start evaluation needs a reference trajectory");
  MazeWorld world = make_maze_world(config.env);
  const std::size_t max_steps = maze_max_steps(config.eval);
  std::vector<EvalEpisode> out;
  for (std::size_t i = 0; i < episodes; ++i) {
    Rng rng(derive_seed(seed, kEvalStart, round * 65536 + i));
    MazeEpisode episode = MazeEpisode{0, 0, Rng(derive_seed(seed, kAgentEpisode, round * 65536 + i))};
    EvalEpisode ep;
    if (protocol == EvalKind::fixed_start) {
      const std::uint64_t game = config.env.fixed_game_seed ? maze_game_seed(config.env, seed, 0)
                                                            : derive_seed(seed, kEvalGame, round * 65536 + i);
      world.reset(game);
      const std::size_t noops = static_cast<std::size_t>(rng.below(config.eval.noop_max + 1));
      for (std::size_t k = 0; k < noops && !world.done(); ++k) {
        const int level_before = world.level();
        const DecomposedTransition t = world.step(ActionId{kNoop});
        MazeAgent::track(t, episode);
        note_step(ep, t, level_before);
        ++ep.steps;
      }
      ep.start_index = noops;
    } else {
      const std::size_t j = draw_start_index(*reference, rng);
      world.reset(reference->seed);
      for (std::size_t k = 0; k < j && !world.done(); ++k) {
        MazeAgent::track(world.step(reference->transitions[k].a), episode);
      }
      ep.start_index = j;
    }
    play_maze_greedy(agent, world, episode, max_steps, ep);
    ep.levels_completed = world.levels_completed();
    out.push_back(std::move(ep));
  }
  return summarize(std::move(out));
}

EpisodeLog record_maze_episode(const MazeAgent& agent, const ExperimentConfig& config, std::uint64_t seed) {
  MazeWorld world = make_maze_world(config.env);
  EpisodeLog log;
  log.seed = maze_game_seed(config.env, seed, 0);
  world.reset(log.seed);
  MazeEpisode episode{0, 0, Rng(derive_seed(seed, kAgentEpisode))};
  EvalEpisode ep;
  play_maze_greedy(agent, world, episode, maze_max_steps(config.eval), ep, &log);
  return log;
}

double maze_random_policy_score(const ExperimentConfig& config, std::size_t episodes, std::uint64_t seed) {
  MazeWorld world = make_maze_world(config.env);
  Rng rng(derive_seed(seed, kRandomPolicy));
  std::vector<double> scores;
  for (std::size_t i = 0; i < episodes; ++i) {
    world.reset(config.env.fixed_game_seed ? maze_game_seed(config.env, seed, 0)
                                           : derive_seed(seed, kEvalGame, i));
    double score = 0.0;
    std::size_t steps = 0;
    while (!world.done() && steps < maze_max_steps(config.eval)) {
      score += world.step(ActionId{static_cast<std::size_t>(rng.below(kMazeActions))}).r_env;
      ++steps;
    }
    scores.push_back(score);
  }
  return mean(scores);
}

// ---------------------------------------------------------------- checkpoints

void save_checkpoint(const std::string& path, const ExperimentConfig& config, std::uint64_t seed,
                     const FruitAgent* fruit, const MazeAgent* maze) {
  bin::Sections sections;
  sections["CONF"] = config.to_json().dump();
  std::ostringstream s(std::ios::binary);
  bin::put_u64(s, seed);
  sections["SEED"] = s.str();
  if (fruit) fruit->save(sections);
  if (maze) maze->save(sections);
  bin::save_container(path, sections);
}

Checkpoint load_checkpoint(const std::string& path) {
  const bin::Sections sections = bin::load_container(path);
  const auto conf = sections.find("CONF");
  const auto seed = sections.find("SEED");
  if (conf == sections.end() || seed == sections.end()) throw ParseError("checkpoint lacks config or seed", 0, 0);
  Checkpoint ckpt;
  ckpt.config = parse_config(json::parse(conf->second));
  std::istringstream s(seed->second, std::ios::binary);
  ckpt.seed = bin::get_u64(s);
  if (ckpt.config.env.kind == EnvKind::fruit) {
    ckpt.fruit = make_fruit_agent(ckpt.config.agent.fruit, derive_seed(ckpt.seed, kAgentInit));
    ckpt.fruit->load(sections);
  } else {
    const MazeWorld world = make_maze_world(ckpt.config.env);
    ckpt.maze = std::make_unique<MazeAgent>(ckpt.config.agent.maze, world);
    ckpt.maze->load(sections);
  }
  return ckpt;
}

EvalSummary evaluate_checkpoint(const Checkpoint& ckpt, EvalKind protocol, std::size_t episodes) {
  std::optional<EpisodeLog> reference;
  if (protocol == EvalKind::random_start) reference = load_reference(ckpt.config.eval);
  const EpisodeLog* ref = reference ? &*reference : nullptr;
  if (ckpt.fruit) return evaluate_fruit(*ckpt.fruit, ckpt.config.eval, protocol, episodes, ckpt.seed, 0, ref);
  return evaluate_maze(*ckpt.maze, ckpt.config, protocol, episodes, ckpt.seed, 0, ref);
}

RunOutput run_experiment(const ExperimentConfig& config, std::uint64_t seed, const std::string& output_dir) {
  RunOutput out;
  const FruitAgent* fruit = nullptr;
  const MazeAgent* maze = nullptr;
  FruitRun fruit_run;
  MazeRun maze_run;
  if (config.env.kind == EnvKind::fruit) {
    fruit_run = train_fruit(config, seed);
    out.log = fruit_run.log;
    fruit = fruit_run.agent.get();
  } else {
    maze_run = train_maze(config, seed);
    out.log = maze_run.log;
    maze = maze_run.agent.get();
  }
  if (!output_dir.empty()) {
    std::filesystem::create_directories(output_dir);
    const std::string stem = output_dir + "/";
    out.metrics_path = stem + "metrics_seed" + std::to_string(seed) + ".csv";
    out.checkpoint_path = stem + "checkpoint_seed" + std::to_string(seed) + ".bin";
    out.log.save(out.metrics_path);
    save_checkpoint(out.checkpoint_path, config, seed, fruit, maze);
  }
  return out;
}

// ---------------------------------------------------------------- sweeps

SweepGrid parse_grid(const json& doc) {
  if (!doc.is_object()) throw ConfigError("sweep grid must be a JSON object");
  SweepGrid grid;
  for (const auto& item : doc.items())
    if (item.key() != "base" && item.key() != "axes" && item.key() != "seeds")
      throw ConfigError("unknown key '" + item.key() + "' in sweep grid");
  if (!doc.contains("base")) throw ConfigError("sweep grid needs a base config");
  grid.base = doc.at("base");
  if (doc.contains("axes")) {
    const json& axes = doc.at("axes");
    if (!axes.is_object()) throw ConfigError("sweep axes must be an object of arrays");
    for (const auto& item : axes.items()) {
      if (!item.value().is_array() || item.value().empty())
        throw ConfigError("sweep axis '" + item.key() + "' needs a non-empty array");
      grid.axes.emplace_back(item.key(), std::vector<json>(item.value().begin(), item.value().end()));
    }
  }
  if (doc.contains("seeds")) {
    for (const json& s : doc.at("seeds")) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0) throw ConfigError("sweep seeds must be non-negative integers");
      grid.seeds.push_back(s.get<std::uint64_t>());
    }
  } else {
    grid.seeds = parse_config(grid.base).seeds;
  }
  if (grid.seeds.empty()) throw ConfigError("sweep needs at least one seed");
  return grid;
}

SweepGrid load_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sweep grid " + path);
  try {
    return parse_grid(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

namespace {

json::json_pointer pointer_of(const std::string& dotted) {
  std::string p;
  std::istringstream in(dotted);
  std::string part;
  while (std::getline(in, part, '.')) p += "/" + part;
  return json::json_pointer(p);
}

std::string csv_safe(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepGrid& grid, std::size_t jobs) {
  if (jobs == 0) throw InvalidArgument("sweep needs at least one worker");
  std::size_t combos = 1;
  for (const auto& [name, values] : grid.axes) combos *= values.size();
  const std::size_t cells = combos * grid.seeds.size();
  std::vector<SweepRow> rows(cells);

  const auto n = static_cast<std::ptrdiff_t>(cells);
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(jobs))
  for (std::ptrdiff_t ci = 0; ci < n; ++ci) {
    const auto cell = static_cast<std::size_t>(ci);
    SweepRow& row = rows[cell];
    std::size_t combo = cell / grid.seeds.size();
    row.seed = grid.seeds[cell % grid.seeds.size()];
    json doc = grid.base;
    // Last axis varies fastest.
    std::vector<std::size_t> pick(grid.axes.size());
    for (std::size_t a = grid.axes.size(); a-- > 0;) {
      pick[a] = combo % grid.axes[a].second.size();
      combo /= grid.axes[a].second.size();
    }
    try {
      for (std::size_t a = 0; a < grid.axes.size(); ++a) {
        const json& v = grid.axes[a].second[pick[a]];
        row.values.push_back(v.dump());
        doc[pointer_of(grid.axes[a].first)] = v;
      }
      const ExperimentConfig config = parse_config(doc);
      const RunOutput out = run_experiment(config, row.seed, "");
      row.final_eval_score = out.log.final_eval_score();
      row.final_train_score = out.log.final_train_score();
      row.episodes = out.log.size();
      row.status = "ok";
    } catch (const std::exception& e) {
      row.values.resize(grid.axes.size());
      for (std::size_t a = 0; a < grid.axes.size(); ++a) row.values[a] = grid.axes[a].second[pick[a]].dump();
      row.status = csv_safe(std::string("error: ") + e.what());
    }
  }
  return rows;
}

void write_sweep_csv(std::ostream& os, const SweepGrid& grid, const std::vector<SweepRow>& rows) {
  for (const auto& [name, values] : grid.axes) os << name << ',';
  os << "seed,status,final_eval_score,final_train_score,episodes\n";
  for (const SweepRow& r : rows) {
    for (const std::string& v : r.values) os << csv_safe(v) << ',';
    os << r.seed << ',' << r.status << ',' << format_number(r.final_eval_score) << ','
       << format_number(r.final_train_score) << ',' << r.episodes << '\n';
  }
}

// ---------------------------------------------------------------- plotting

void write_plot_csv(std::ostream& os, const MetricsLog& log, std::size_t window) {
  std::vector<double> train;
  std::vector<double> eval;
  for (const MetricsRow& r : log.rows()) {
    train.push_back(r.train_score);
    if (r.eval_score) eval.push_back(*r.eval_score);
  }
  const std::vector<double> train_smooth = moving_average(train, window);
  const std::vector<double> eval_smooth = moving_average(eval, window);
  os << "episode,train_score,train_smoothed,eval_score,eval_smoothed\n";
  std::size_t k = 0;
  for (std::size_t i = 0; i < log.rows().size(); ++i) {
    const MetricsRow& r = log.rows()[i];
    os << r.episode << ',' << format_number(r.train_score) << ',' << format_number(train_smooth[i]) << ',';
    if (r.eval_score) {
      os << format_number(*r.eval_score) << ',' << format_number(eval_smooth[k]);
      ++k;
    } else {
      os << ',';
    }
    os << '\n';
  }
}

}  // namespace hra
