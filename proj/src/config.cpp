#include "hra/config.hpp"

#include <fstream>
#include <set>

#include "hra/errors.hpp"

namespace hra {

using nlohmann::json;

std::string_view to_string(EvalKind k) { return k == EvalKind::fixed_start ? "fixed-start" : "random-start"; }

EvalKind eval_kind_from_string(std::string_view name) {
  if (name == "fixed-start" || name == "fixed") return EvalKind::fixed_start;
  if (name == "random-start" || name == "random") return EvalKind::random_start;
  throw ConfigError("unknown evaluation protocol '" + std::string(name) + "'");
}

namespace {

/// Reads the members of one JSON object and remembers which keys were used.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + " must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json* raw(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  void get(const char* key, double& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + " must be a number");
      out = v->get<double>();
    }
  }
  void get(const char* key, std::size_t& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer() || v->get<std::int64_t>() < 0)
        throw ConfigError(where(key) + " must be a non-negative integer");
      out = v->get<std::size_t>();
    }
  }
  void get(const char* key, int& out) {
    if (const json* v = raw(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + " must be an integer");
      out = v->get<int>();
    }
  }
  void get(const char* key, bool& out) {
    if (const json* v = raw(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + " must be true or false");
      out = v->get<bool>();
    }
  }
  void get(const char* key, std::string& out) {
    if (const json* v = raw(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  void reject(const char* key, const char* reason) {
    if (has(key)) throw ConfigError(where(key) + ": " + reason);
  }

  /// Throws on any key that no getter asked for.
  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.count(item.key())) throw ConfigError("unknown key '" + where(item.key().c_str()) + "'");
  }

  std::string where(const char* key = nullptr) const {
    if (!key) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

TargetKind target_from_string(const std::string& s, const std::string& where) {
  if (s == "max") return TargetKind::max;
  if (s == "mean") return TargetKind::uniform_mean;
  throw ConfigError(where + " must be \"max\" or \"mean\"");
}

const char* target_name(TargetKind k) { return k == TargetKind::max ? "max" : "mean"; }

void check_gamma(double g, const std::string& where) {
  if (!(g >= 0.0 && g <= 1.0)) throw ConfigError(where + " must lie in [0,1]");
}

void parse_env(const json& j, EnvSpec& env) {
  ObjectReader r(j, "env");
  std::string kind = "fruit";
  r.get("kind", kind);
  if (kind == "fruit") {
    env.kind = EnvKind::fruit;
  } else if (kind == "maze") {
    env.kind = EnvKind::maze;
  } else {
    throw ConfigError("env.kind must be \"fruit\" or \"maze\"");
  }
  if (env.kind == EnvKind::fruit) {
    for (const char* key : {"lives", "blue_duration", "fruit_duration", "start_delay", "ghost_release_interval",
                            "ghost_chase_prob", "ghost_skip_every", "blue_skip_every", "maps", "fixed_game_seed", "step_limit"})
      r.reject(key, "only applies to the maze environment");
  } else {
    r.get("lives", env.maze.lives);
    r.get("blue_duration", env.maze.blue_duration);
    r.get("fruit_duration", env.maze.fruit_duration);
    r.get("start_delay", env.maze.start_delay);
    r.get("ghost_release_interval", env.maze.ghost_release_interval);
    r.get("ghost_chase_prob", env.maze.ghost_chase_prob);
    r.get("ghost_skip_every", env.maze.ghost_skip_every);
    r.get("blue_skip_every", env.maze.blue_skip_every);
    r.get("fixed_game_seed", env.fixed_game_seed);
    r.get("step_limit", env.step_limit);
    if (const json* maps = r.raw("maps")) {
      if (!maps->is_array() || maps->size() != 4) throw ConfigError("env.maps must list exactly four files");
      for (const json& m : *maps) {
        if (!m.is_string()) throw ConfigError("env.maps entries must be strings");
        env.map_files.push_back(m.get<std::string>());
      }
    }
    if (env.maze.lives <= 0) throw ConfigError("env.lives must be positive");
    if (env.maze.start_delay < 0 || env.maze.blue_duration < 0 || env.maze.fruit_duration < 0 ||
        env.maze.ghost_release_interval < 0 || env.maze.ghost_skip_every < 0 || env.maze.blue_skip_every < 0)
      throw ConfigError("env durations must be non-negative");
    if (!(env.maze.ghost_chase_prob >= 0.0 && env.maze.ghost_chase_prob <= 1.0))
      throw ConfigError("env.ghost_chase_prob must lie in [0,1]");
    if (env.step_limit == 0) throw ConfigError("env.step_limit must be positive");
  }
  r.finish();
}

constexpr const char* kFruitOnlyKeys[] = {"gamma", "target_sync", "replay_capacity", "batch_size"};
constexpr const char* kMazeOnlyKeys[] = {"gamma_score",   "gamma_ghosts",          "aggregator",
                                         "ghost_weight",  "diversification",       "diversification_window",
                                         "diversification_high", "targeted_exploration", "kappa",
                                         "memory",        "multipliers"};

void parse_agent(const json& j, EnvKind env, AgentSpec& agent) {
  ObjectReader r(j, "agent");
  r.get("method", agent.method);
  std::string target;
  r.get("target", target);

  if (env == EnvKind::fruit) {
    if (agent.method == kMazeMethod) throw ConfigError("method full-maze-hra needs the maze environment");
    for (const char* key : kMazeOnlyKeys) r.reject(key, "maze-only agent setting on the fruit environment");
    FruitAgentConfig& f = agent.fruit;
    f.method = fruit_method_from_string(agent.method);
    const bool single = f.method == FruitMethod::dqn || f.method == FruitMethod::dqn_plus1;
    const bool tabular = f.method == FruitMethod::hra_plus2 || f.method == FruitMethod::hra_plus3;
    f.rule.kind = target.empty() ? (single ? TargetKind::max : TargetKind::uniform_mean)
                                 : target_from_string(target, "agent.target");
    f.rule.gamma = f.rule.kind == TargetKind::max ? 0.95 : 0.99;
    f.step_size = tabular ? 1.0 : 0.001;
    r.get("gamma", f.rule.gamma);
    r.get("step_size", f.step_size);
    r.get("target_sync", f.target_sync);
    r.get("replay_capacity", f.replay_capacity);
    r.get("batch_size", f.batch_size);
    check_gamma(f.rule.gamma, "agent.gamma");
    if (!(f.step_size > 0.0)) throw ConfigError("agent.step_size must be positive");
    if (tabular && f.step_size > 1.0) throw ConfigError("agent.step_size must not exceed 1 for tabular heads");
    if (f.target_sync == 0) throw ConfigError("agent.target_sync must be at least 1");
    if (f.replay_capacity > 0 && (f.batch_size == 0 || f.batch_size > f.replay_capacity))
      throw ConfigError("agent.batch_size must lie in [1, replay_capacity]");
  } else {
    if (agent.method != kMazeMethod)
      throw ConfigError("method '" + agent.method + "' is not available on the maze environment");
    for (const char* key : kFruitOnlyKeys) r.reject(key, "fruit-only agent setting on the maze environment");
    MazeAgentConfig& m = agent.maze;
    m.gvf_target = target.empty() ? TargetKind::uniform_mean : target_from_string(target, "agent.target");
    r.get("step_size", m.gvf_alpha);
    r.get("gamma_score", m.gamma_score);
    r.get("gamma_ghosts", m.gamma_ghost);
    std::string aggregator = "normalized";
    r.get("aggregator", aggregator);
    if (aggregator == "normalized") {
      m.aggregator.kind = AggregatorKind::normalized;
    } else if (aggregator == "linear-sum") {
      m.aggregator.kind = AggregatorKind::linear_sum;
    } else {
      throw ConfigError("agent.aggregator must be \"normalized\" or \"linear-sum\"");
    }
    r.get("ghost_weight", m.aggregator.ghost_weight);
    r.get("diversification", m.diversification);
    r.get("diversification_window", m.diversification_window);
    r.get("diversification_high", m.diversification_high);
    r.get("targeted_exploration", m.targeted_exploration);
    r.get("kappa", m.kappa);
    r.get("memory", m.executive_memory);
    if (const json* mult = r.raw("multipliers")) {
      ObjectReader mr(*mult, "agent.multipliers");
      mr.get("pellet", m.multipliers.pellet);
      mr.get("power_pellet", m.multipliers.power_pellet);
      mr.get("fruit", m.multipliers.fruit);
      mr.get("blue_ghost", m.multipliers.blue_ghost);
      mr.get("ghost", m.multipliers.ghost);
      mr.finish();
    }
    check_gamma(m.gamma_score, "agent.gamma_score");
    check_gamma(m.gamma_ghost, "agent.gamma_ghosts");
    if (!(m.gvf_alpha > 0.0 && m.gvf_alpha <= 1.0)) throw ConfigError("agent.step_size must lie in (0,1]");
    if (!(m.kappa >= 0.0)) throw ConfigError("agent.kappa must be non-negative");
    if (!(m.diversification_high >= 0.0)) throw ConfigError("agent.diversification_high must be non-negative");
  }
  r.finish();
}

void parse_eval(const json& j, EvalSpec& eval) {
  ObjectReader r(j, "eval");
  std::string protocol(to_string(eval.protocol));
  r.get("protocol", protocol);
  eval.protocol = eval_kind_from_string(protocol);
  r.get("every", eval.every);
  r.get("episodes", eval.episodes);
  r.get("reference", eval.reference);
  r.get("max_steps", eval.max_steps);
  r.get("noop_max", eval.noop_max);
  r.finish();
  if (eval.every == 0) throw ConfigError("eval.every must be at least 1");
  if (eval.protocol == EvalKind::random_start && eval.reference.empty())
    throw ConfigError("random-start evaluation needs eval.reference");
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  ExperimentConfig c;
  ObjectReader r(doc, "");
  const json* env = r.raw("env");
  if (!env) throw ConfigError("config needs an env block");
  parse_env(*env, c.env);
  const json* agent = r.raw("agent");
  if (!agent) throw ConfigError("config needs an agent block");
  parse_agent(*agent, c.env.kind, c.agent);
  r.get("episodes", c.episodes);
  if (const json* eval = r.raw("eval")) parse_eval(*eval, c.eval);
  if (const json* seeds = r.raw("seeds")) {
    if (!seeds->is_array() || seeds->empty()) throw ConfigError("seeds must be a non-empty array");
    c.seeds.clear();
    for (const json& s : *seeds) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 0)
        throw ConfigError("seeds must be non-negative integers");
      c.seeds.push_back(s.get<std::uint64_t>());
    }
  }
  r.get("output", c.output);
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return parse_config(doc);
}

json ExperimentConfig::to_json() const {
  json j;
  json& e = j["env"];
  if (env.kind == EnvKind::fruit) {
    e["kind"] = "fruit";
  } else {
    e["kind"] = "maze";
    e["lives"] = env.maze.lives;
    e["blue_duration"] = env.maze.blue_duration;
    e["fruit_duration"] = env.maze.fruit_duration;
    e["start_delay"] = env.maze.start_delay;
    e["ghost_release_interval"] = env.maze.ghost_release_interval;
    e["ghost_chase_prob"] = env.maze.ghost_chase_prob;
    e["ghost_skip_every"] = env.maze.ghost_skip_every;
    e["blue_skip_every"] = env.maze.blue_skip_every;
    e["fixed_game_seed"] = env.fixed_game_seed;
    e["step_limit"] = env.step_limit;
    if (!env.map_files.empty()) e["maps"] = env.map_files;
  }

  json& a = j["agent"];
  a["method"] = agent.method;
  if (env.kind == EnvKind::fruit) {
    const FruitAgentConfig& f = agent.fruit;
    a["target"] = target_name(f.rule.kind);
    a["gamma"] = f.rule.gamma;
    a["step_size"] = f.step_size;
    a["target_sync"] = f.target_sync;
    a["replay_capacity"] = f.replay_capacity;
    a["batch_size"] = f.batch_size;
  } else {
    const MazeAgentConfig& m = agent.maze;
    a["target"] = target_name(m.gvf_target);
    a["step_size"] = m.gvf_alpha;
    a["gamma_score"] = m.gamma_score;
    a["gamma_ghosts"] = m.gamma_ghost;
    a["aggregator"] = m.aggregator.kind == AggregatorKind::normalized ? "normalized" : "linear-sum";
    a["ghost_weight"] = m.aggregator.ghost_weight;
    a["diversification"] = m.diversification;
    a["diversification_window"] = m.diversification_window;
    a["diversification_high"] = m.diversification_high;
    a["targeted_exploration"] = m.targeted_exploration;
    a["kappa"] = m.kappa;
    a["memory"] = m.executive_memory;
    a["multipliers"] = {{"pellet", m.multipliers.pellet},
                        {"power_pellet", m.multipliers.power_pellet},
                        {"fruit", m.multipliers.fruit},
                        {"blue_ghost", m.multipliers.blue_ghost},
                        {"ghost", m.multipliers.ghost}};
  }

  j["episodes"] = episodes;
  json& ev = j["eval"];
  ev["protocol"] = std::string(to_string(eval.protocol));
  ev["every"] = eval.every;
  ev["episodes"] = eval.episodes;
  if (!eval.reference.empty()) ev["reference"] = eval.reference;
  ev["max_steps"] = eval.max_steps;
  ev["noop_max"] = eval.noop_max;
  j["seeds"] = seeds;
  if (!output.empty()) j["output"] = output;
  return j;
}

MazeWorld make_maze_world(const EnvSpec& env) {
  if (env.map_files.empty()) return MazeWorld(env.maze);
  std::vector<std::shared_ptr<const Maze>> maps;
  for (const std::string& path : env.map_files) maps.push_back(std::make_shared<const Maze>(maze_load_file(path)));
  return MazeWorld(std::move(maps), env.maze);
}

}  // namespace hra
