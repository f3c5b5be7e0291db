#include "hra/mdp.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "hra/errors.hpp"

namespace hra {

namespace {

constexpr std::array<std::string_view, 8> kEventNames = {
    "fruit-eaten",    "pellet-eaten",   "power-pellet-eaten", "blue-ghost-eaten",
    "ghost-contact",  "level-complete", "fruit-spawned",      "inactive",
};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::string_view to_string(Event e) { return kEventNames.at(static_cast<std::size_t>(e)); }

Event event_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kEventNames.size(); ++i)
    if (kEventNames[i] == name) return static_cast<Event>(i);
  throw InvalidArgument("unknown event tag '" + std::string(name) + "'");
}

bool DecomposedTransition::has(Event e) const {
  for (Event x : events)
    if (x == e) return true;
  return false;
}

double DecomposedTransition::component_sum() const {
  double sum = 0.0;
  for (double r : r_components) sum += r;
  return sum;
}

PolicySpec PolicySpec::epsilon_greedy(double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("epsilon must lie in [0,1]");
  return {PolicyKind::epsilon_greedy, eps, TieBreak::lowest_index};
}

std::size_t argmax(std::span<const double> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::vector<double> PolicySpec::probabilities(std::span<const double> values) const {
  const std::size_t n = values.size();
  std::vector<double> p(n, 0.0);
  if (n == 0) return p;
  const double uniform = 1.0 / static_cast<double>(n);
  if (kind == PolicyKind::uniform_random) {
    std::fill(p.begin(), p.end(), uniform);
    return p;
  }
  const double best = values[argmax(values)];
  std::size_t ties = 0;
  for (double v : values) ties += (v == best);
  const double greedy_mass = kind == PolicyKind::greedy ? 1.0 : 1.0 - epsilon;
  for (std::size_t a = 0; a < n; ++a) {
    p[a] = (1.0 - greedy_mass) * uniform;
    if (values[a] == best) {
      if (tie_break == TieBreak::seeded_random)
        p[a] += greedy_mass / static_cast<double>(ties);
      else if (a == argmax(values))
        p[a] += greedy_mass;
    }
  }
  return p;
}

namespace {

std::size_t greedy_choice(const PolicySpec& policy, std::span<const double> values, Rng& rng) {
  if (policy.tie_break == TieBreak::lowest_index) return argmax(values);
  const double best = values[argmax(values)];
  std::vector<std::size_t> ties;
  for (std::size_t a = 0; a < values.size(); ++a)
    if (values[a] == best) ties.push_back(a);
  return ties[rng.below(ties.size())];
}

}  // namespace

std::size_t select_with_policy(const PolicySpec& policy, std::span<const double> values,
                               std::size_t action_count, Rng& rng) {
  switch (policy.kind) {
    case PolicyKind::uniform_random:
      return rng.below(action_count);
    case PolicyKind::greedy:
      if (values.size() != action_count) throw InvalidArgument("value count != action count");
      return greedy_choice(policy, values, rng);
    case PolicyKind::epsilon_greedy:
      if (values.size() != action_count) throw InvalidArgument("value count != action count");
      if (rng.bernoulli(policy.epsilon)) return rng.below(action_count);
      return greedy_choice(policy, values, rng);
  }
  return 0;
}

std::vector<ActionId> EpisodeLog::actions() const {
  std::vector<ActionId> out;
  out.reserve(transitions.size());
  for (const auto& t : transitions) out.push_back(t.a);
  return out;
}

EpisodeLog rollout(Environment& env, const PolicySpec& policy, const ValueSource& values,
                   std::size_t max_steps, std::uint64_t seed) {
  if (max_steps == 0) throw InvalidArgument("rollout: max_steps must be positive");
  if (policy.kind != PolicyKind::uniform_random && !values)
    throw InvalidArgument("rollout: greedy policy requires a value source");

  EpisodeLog log;
  log.seed = seed;
  Rng rng(derive_seed(seed, 1));
  StateId s = env.reset(seed);
  const std::size_t actions = env.action_count();
  while (!env.done() && log.steps < max_steps) {
    std::vector<double> q;
    if (policy.kind != PolicyKind::uniform_random) q = values(s);
    const ActionId a{select_with_policy(policy, q, actions, rng)};
    DecomposedTransition t = env.step(a);
    log.total_score += t.r_env;
    s = t.s_next;
    log.transitions.push_back(std::move(t));
    ++log.steps;
  }
  return log;
}

std::vector<StateId> replay_states(Environment& env, std::uint64_t seed,
                                   std::span<const ActionId> actions) {
  std::vector<StateId> states;
  states.push_back(env.reset(seed));
  for (ActionId a : actions) {
    if (env.done()) break;
    states.push_back(env.step(a).s_next);
  }
  return states;
}

void write_episode_log(std::ostream& os, const EpisodeLog& log) {
  std::size_t n = 0;
  for (const auto& t : log.transitions) n = std::max(n, t.r_components.size());
  os << "# seed=" << log.seed << '\n';
  os << "s,a,s_next,r_env,shaping,terminal,truncated,events";
  for (std::size_t k = 0; k < n; ++k) os << ",r" << k;
  os << '\n';
  os << std::setprecision(17);
  for (const auto& t : log.transitions) {
    os << t.s.index << ',' << t.a.index << ',' << t.s_next.index << ',' << t.r_env << ','
       << t.shaping << ',' << int(t.terminal) << ',' << int(t.truncated) << ',';
    for (std::size_t i = 0; i < t.events.size(); ++i) os << (i ? "|" : "") << to_string(t.events[i]);
    for (double r : t.r_components) os << ',' << r;
    os << '\n';
  }
}

EpisodeLog read_episode_log(std::istream& is) {
  EpisodeLog log;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.rfind("# seed=", 0) == 0) {
      log.seed = std::stoull(line.substr(7));
      continue;
    }
    if (!header_seen) {
      if (line.rfind("s,a,s_next,", 0) != 0) throw ParseError("missing episode log header", line_no, 1);
      header_seen = true;
      continue;
    }
    const auto fields = split(line, ',');
    if (fields.size() < 8) throw ParseError("truncated transition row", line_no, 1);
    DecomposedTransition t;
    try {
      t.s.index = std::stoull(fields[0]);
      t.a.index = std::stoull(fields[1]);
      t.s_next.index = std::stoull(fields[2]);
      t.r_env = std::stod(fields[3]);
      t.shaping = std::stod(fields[4]);
      t.terminal = fields[5] == "1";
      t.truncated = fields[6] == "1";
      if (!fields[7].empty())
        for (const auto& name : split(fields[7], '|')) t.events.push_back(event_from_string(name));
      for (std::size_t k = 8; k < fields.size(); ++k) t.r_components.push_back(std::stod(fields[k]));
    } catch (const std::logic_error& e) {
      throw ParseError(std::string("bad transition field: ") + e.what(), line_no, 1);
    }
    log.total_score += t.r_env;
    log.transitions.push_back(std::move(t));
  }
  log.steps = log.transitions.size();
  return log;
}

void save_episode_log(const std::string& path, const EpisodeLog& log) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot write " + path);
  write_episode_log(out, log);
}

EpisodeLog load_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read " + path);
  return read_episode_log(in);
}

}  // namespace hra
