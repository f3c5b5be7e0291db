#include "hra/maze_agent.hpp"

#include <algorithm>
#include <sstream>

#include "hra/errors.hpp"

namespace hra {

std::vector<ObjectHead> maze_objects(const MazeWorld& world, const HeadMultipliers& multipliers,
                                     AggregatorKind aggregator) {
  const Maze& m = world.maze();
  std::vector<ObjectHead> out;
  out.reserve(world.dots_remaining() + kGhosts + 1);
  for (std::size_t i = 0; i < m.pellets().size(); ++i)
    if (world.pellet_alive()[i]) out.push_back({ObjectKind::pellet, m.pellets()[i], multipliers.pellet});
  for (std::size_t i = 0; i < m.power_pellets().size(); ++i)
    if (world.power_alive()[i])
      out.push_back({ObjectKind::power_pellet, m.power_pellets()[i], multipliers.power_pellet});
  if (world.fruit()) out.push_back({ObjectKind::fruit, world.fruit()->cell, multipliers.fruit});
  const double ghost_multiplier = aggregator == AggregatorKind::normalized ? 1.0 : multipliers.ghost;
  for (const Ghost& g : world.ghosts()) {
    if (g.blue())
      out.push_back({ObjectKind::blue_ghost, g.cell, multipliers.blue_ghost});
    else
      out.push_back({ObjectKind::ghost, g.cell, ghost_multiplier});
  }
  return out;
}

MazeAgent::MazeAgent(const MazeAgentConfig& config, const MazeWorld& world)
    : config_(config), exploration_(config.kappa) {
  score_ = std::make_unique<GvfBank>(TargetRule{config.gvf_target, config.gamma_score}, config.gvf_alpha);
  if (config.gamma_ghost != config.gamma_score)
    ghost_ = std::make_unique<GvfBank>(TargetRule{config.gvf_target, config.gamma_ghost}, config.gvf_alpha);
  for (std::size_t id = 0; id < world.map_count(); ++id) {
    maps_.push_back(world.maze(id));
    score_->register_map(id, MapTopology::of(maps_.back(), kMazeActions));
    if (ghost_) ghost_->register_map(id, MapTopology::of(maps_.back(), kMazeActions));
  }
}

MazeEpisode MazeAgent::begin_episode(std::uint64_t seed, bool learning) {
  if (learning && config_.executive_memory) memory_.begin_episode();
  return MazeEpisode{0, 0, Rng(derive_seed(seed, 0xd1f))};
}

MazeAgent::Decision MazeAgent::decide(const MazeWorld& world, MazeEpisode& episode, bool learning) const {
  const std::size_t n = kMazeActions;
  Decision d;
  const auto objects = maze_objects(world, config_.multipliers, config_.aggregator.kind);
  const auto rows = head_values(sources(), world.map_id(), world.player_state(), objects, n);
  d.aggregated = aggregate(rows, config_.aggregator, n);
  d.diversification = learning && config_.diversification
                          ? diversification_values(episode.step, episode.rng, n, config_.diversification_window,
                                                   config_.diversification_high)
                          : std::vector<double>(n, 0.0);
  d.bonus = config_.targeted_exploration
                ? exploration_bonus(exploration_, count_key(world.map_id(), world.player_state()), n)
                : std::vector<double>(n, 0.0);
  d.memory = config_.executive_memory ? memory_step(memory_, world.level(), episode.level_step, n)
                                      : std::vector<double>(n, 0.0);
  return d;
}

std::size_t MazeAgent::act(const MazeWorld& world, MazeEpisode& episode, bool learning) const {
  if (world.frozen()) return kNoop;
  const Decision d = decide(world, episode, learning);
  return select_action(d.aggregated, d.diversification, d.bonus, d.memory);
}

void MazeAgent::observe(const DecomposedTransition& t, std::size_t map_before, int level_before,
                        const MazeWorld& after, MazeEpisode& episode, bool learning) {
  (void)after;
  if (t.has(Event::inactive)) return;
  const bool died = t.has(Event::ghost_contact);
  const bool cleared = t.has(Event::level_complete);

  if (learning) {
    if (config_.targeted_exploration) exploration_.record(count_key(map_before, t.s.index), t.a.index);
    if (config_.executive_memory) memory_.record(t.a.index);

    // Deaths and level changes teleport the player; they are not moves.
    if (!died && !cleared) {
      const GvfTransition move{map_before, t.s.index, t.a.index, t.s_next.index};
      const Maze& m = maps_[map_before];
      for (GvfBank* bank : {score_.get(), ghost_.get()}) {
        if (!bank) continue;
        const auto& topo = bank->topology(map_before);
        bank->ensure({map_before, m.corridor_cell(topo.cell_of_state(t.s.index))});
        bank->ensure({map_before, m.corridor_cell(topo.cell_of_state(t.s_next.index))});
        bank->update_all(move);
      }
    }
    if (config_.executive_memory) {
      if (died) memory_.on_death();
      if (cleared) memory_.on_level_complete(level_before);
    }
  }

  track(t, episode);
}

void MazeAgent::track(const DecomposedTransition& t, MazeEpisode& episode) {
  if (t.has(Event::inactive)) return;
  ++episode.step;
  episode.level_step = t.has(Event::level_complete) ? 0 : episode.level_step + 1;
}

std::size_t MazeAgent::gvf_count() const { return score_->size() + (ghost_ ? ghost_->size() : 0); }

std::size_t MazeAgent::head_count() const {
  std::size_t heads = 2 * kGhosts;
  for (const GvfKey& key : score_->created_order()) {
    const Maze& m = maps_[key.map_id];
    const auto is = [&](const std::vector<Cell>& cells) {
      return std::find(cells.begin(), cells.end(), key.target) != cells.end();
    };
    if (is(m.pellets()) || is(m.power_pellets()) || (m.fruit_spawn() && *m.fruit_spawn() == key.target)) ++heads;
  }
  return heads;
}

void MazeAgent::save(bin::Sections& sections) const {
  std::ostringstream gs(std::ios::binary);
  write_bank(gs, *score_);
  sections["GVFS"] = gs.str();
  if (ghost_) {
    std::ostringstream gg(std::ios::binary);
    write_bank(gg, *ghost_);
    sections["GVFG"] = gg.str();
  }

  std::ostringstream cs(std::ios::binary);
  bin::put_f64(cs, exploration_.kappa());
  bin::put_u64(cs, exploration_.total_actions());
  const std::map<std::uint64_t, std::uint64_t> ordered(exploration_.raw().begin(), exploration_.raw().end());
  bin::put_u64(cs, ordered.size());
  for (const auto& [k, v] : ordered) {
    bin::put_u64(cs, k);
    bin::put_u64(cs, v);
  }
  sections["CNTS"] = cs.str();

  std::ostringstream ms(std::ios::binary);
  bin::put_u32(ms, static_cast<std::uint32_t>(memory_.recorded().size()));
  for (const auto& [level, seq] : memory_.recorded()) {
    bin::put_u32(ms, static_cast<std::uint32_t>(level));
    bin::put_u64(ms, seq.size());
    for (std::size_t a : seq) bin::put_u32(ms, static_cast<std::uint32_t>(a));
  }
  sections["EMEM"] = ms.str();
}

void MazeAgent::load(const bin::Sections& sections) {
  const auto section = [&](const char* tag) -> const std::string& {
    const auto it = sections.find(tag);
    if (it == sections.end()) throw ParseError(std::string("checkpoint lacks section ") + tag, 0, 0);
    return it->second;
  };
  {
    std::istringstream is(section("GVFS"), std::ios::binary);
    score_ = std::make_unique<GvfBank>(read_bank(is));
  }
  if (ghost_) {
    std::istringstream is(section("GVFG"), std::ios::binary);
    ghost_ = std::make_unique<GvfBank>(read_bank(is));
  }
  {
    std::istringstream is(section("CNTS"), std::ios::binary);
    ExplorationState es(bin::get_f64(is));
    es.set_total(bin::get_u64(is));
    const std::uint64_t n = bin::get_u64(is);
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint64_t key = bin::get_u64(is);
      const std::uint64_t extra = bin::get_u64(is);
      es.set(key / 8, key % 8, extra + 1);
    }
    exploration_ = es;
  }
  {
    std::istringstream is(section("EMEM"), std::ios::binary);
    std::map<int, std::vector<std::size_t>> recorded;
    const std::uint32_t levels = bin::get_u32(is);
    for (std::uint32_t i = 0; i < levels; ++i) {
      const int level = static_cast<int>(bin::get_u32(is));
      auto& seq = recorded[level];
      seq.resize(bin::get_u64(is));
      for (std::size_t& a : seq) a = bin::get_u32(is);
    }
    ExecutiveMemory mem;
    mem.restore(std::move(recorded));
    memory_ = mem;
  }
}

}  // namespace hra
