#include "hra/maze.hpp"

#include <deque>
#include <fstream>
#include <sstream>

#include "hra/errors.hpp"

namespace hra {

namespace {

Direction reverse(Direction d) { return static_cast<Direction>((static_cast<std::size_t>(d) + 2) % 4); }

}  // namespace

Maze maze_load(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string line;
    std::istringstream in{std::string(text)};
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
  }
  if (lines.empty()) throw ParseError("empty map", 1, 1);

  Maze m;
  m.height_ = static_cast<int>(lines.size());
  m.width_ = static_cast<int>(lines.front().size());
  if (m.width_ == 0) throw ParseError("empty map row", 1, 1);
  m.index_.assign(static_cast<std::size_t>(m.width_ * m.height_), Maze::kWall);

  bool have_player = false;
  for (int r = 0; r < m.height_; ++r) {
    const std::string& row = lines[static_cast<std::size_t>(r)];
    if (static_cast<int>(row.size()) != m.width_)
      throw ParseError("non-rectangular map: expected " + std::to_string(m.width_) + " columns, found " +
                           std::to_string(row.size()),
                       static_cast<std::size_t>(r + 1), std::min(row.size(), static_cast<std::size_t>(m.width_)) + 1);
    for (int c = 0; c < m.width_; ++c) {
      const char glyph = row[static_cast<std::size_t>(c)];
      const Cell cell{r, c};
      const auto line_no = static_cast<std::size_t>(r + 1);
      const auto col_no = static_cast<std::size_t>(c + 1);
      switch (glyph) {
        case '#':
          continue;
        case '.':
          m.pellets_.push_back(cell);
          break;
        case 'o':
          m.power_pellets_.push_back(cell);
          break;
        case 'P':
          if (have_player) throw ParseError("duplicate player spawn 'P'", line_no, col_no);
          have_player = true;
          m.player_spawn_ = cell;
          break;
        case 'G':
          m.ghost_house_.push_back(cell);
          break;
        case 'F':
          if (m.fruit_spawn_) throw ParseError("duplicate fruit spawn 'F'", line_no, col_no);
          m.fruit_spawn_ = cell;
          break;
        case ' ':
          break;
        default:
          throw ParseError(std::string("unknown glyph '") + glyph + "'", line_no, col_no);
      }
      m.index_[m.flat(cell)] = static_cast<int>(m.cells_.size());
      m.cells_.push_back(cell);
    }
  }
  if (!have_player) throw ParseError("map has no player spawn 'P'", 1, 1);

  const std::size_t n = m.cells_.size();
  m.moves_.resize(n * 4);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < 4; ++d) {
      const Cell next = moved(m.cells_[i], static_cast<Direction>(d));
      m.moves_[i * 4 + d] = m.is_wall(next) ? i : static_cast<std::size_t>(m.corridor_index(next));
    }

  m.dist_.assign(n * n, -1);
  for (std::size_t src = 0; src < n; ++src) {
    int* dist = &m.dist_[src * n];
    std::deque<std::size_t> frontier{src};
    dist[src] = 0;
    while (!frontier.empty()) {
      const std::size_t at = frontier.front();
      frontier.pop_front();
      for (std::size_t d = 0; d < 4; ++d) {
        const std::size_t next = m.moves_[at * 4 + d];
        if (dist[next] < 0) {
          dist[next] = dist[at] + 1;
          frontier.push_back(next);
        }
      }
    }
  }

  const std::size_t spawn = static_cast<std::size_t>(m.corridor_index(m.player_spawn_));
  auto check_reachable = [&](const std::vector<Cell>& cells, const char* what) {
    for (const Cell c : cells)
      if (m.distance(spawn, static_cast<std::size_t>(m.corridor_index(c))) < 0)
        throw ParseError(std::string("unreachable ") + what, static_cast<std::size_t>(c.row + 1),
                         static_cast<std::size_t>(c.col + 1));
  };
  check_reachable(m.pellets_, "pellet");
  check_reachable(m.power_pellets_, "power pellet");
  return m;
}

Maze maze_load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read map file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return maze_load(buf.str());
}

std::size_t map_for_level(int level) {
  if (level < 1) throw InvalidArgument("levels start at 1");
  if (level <= 8) return static_cast<std::size_t>((level - 1) / 2);
  return level % 2 == 1 ? 2 : 3;
}

std::optional<FruitType> fruit_for_level(int level) {
  if (level < 1) throw InvalidArgument("levels start at 1");
  if (level <= 7) return static_cast<FruitType>(level - 1);
  return std::nullopt;
}

MazeWorld::MazeWorld(std::vector<std::shared_ptr<const Maze>> maps, MazeConfig config)
    : maps_(std::move(maps)), config_(config) {
  if (maps_.size() != 4) throw InvalidArgument("MazeWorld needs exactly four maps");
  for (const auto& m : maps_) {
    if (!m) throw InvalidArgument("null map");
    if (m->ghost_house().empty()) throw InvalidArgument("map has no ghost house");
  }
  if (config_.lives <= 0) throw InvalidArgument("lives must be positive");
}

MazeWorld::MazeWorld(MazeConfig config)
    : MazeWorld(
          [] {
            std::vector<std::shared_ptr<const Maze>> maps;
            for (auto text : bundled_map_texts()) maps.push_back(std::make_shared<const Maze>(maze_load(text)));
            return maps;
          }(),
          config) {}

std::size_t MazeWorld::component_count() const { return blue_ghost_component(kGhosts - 1) + 1; }

std::size_t MazeWorld::player_state() const {
  return static_cast<std::size_t>(maze().corridor_index(player_)) * 4 + static_cast<std::size_t>(orientation_);
}

StateId MazeWorld::state() const { return StateId{player_state()}; }

StateId MazeWorld::reset(std::uint64_t seed) {
  rng_.reseed(seed);
  level_ = 1;
  lives_ = config_.lives;
  freeze_ = config_.start_delay;
  ticks_ = 0;
  load_level();
  return state();
}

void MazeWorld::load_level() {
  map_id_ = map_for_level(level_);
  const Maze& m = maze();
  pellet_alive_.assign(m.pellets().size(), true);
  power_alive_.assign(m.power_pellets().size(), true);
  dots_total_ = dots_remaining_ = m.pellets().size() + m.power_pellets().size();
  fruit_spawns_ = 0;
  fruit_.reset();
  reset_positions();
}

void MazeWorld::reset_positions() {
  const Maze& m = maze();
  player_ = m.player_spawn();
  orientation_ = Direction::west;
  for (std::size_t g = 0; g < kGhosts; ++g) {
    ghosts_[g] = Ghost{m.ghost_house()[g % m.ghost_house().size()], Direction::north, 0,
                       static_cast<int>(g) * config_.ghost_release_interval};
  }
  blue_chain_ = 0;
}

void MazeWorld::place_player(Cell c, Direction orientation) {
  if (maze().is_wall(c)) throw InvalidArgument("player placed on a wall");
  player_ = c;
  orientation_ = orientation;
}

void MazeWorld::place_ghost(std::size_t g, Cell c, Direction heading, int blue_timer) {
  if (maze().is_wall(c)) throw InvalidArgument("ghost placed on a wall");
  ghosts_.at(g) = Ghost{c, heading, blue_timer, 0};
}

bool MazeWorld::try_move_player(std::size_t action) {
  if (action == kNoop) return false;
  const auto d = static_cast<Direction>(action);
  const Cell next = moved(player_, d);
  if (maze().is_wall(next)) return false;
  player_ = next;
  orientation_ = d;
  return true;
}

void MazeWorld::move_ghost(Ghost& g) {
  const Maze& m = maze();
  const auto at = static_cast<std::size_t>(m.corridor_index(g.cell));
  std::array<Direction, 4> options{};
  std::size_t count = 0;
  for (std::size_t d = 0; d < 4; ++d) {
    const auto dir = static_cast<Direction>(d);
    if (dir != reverse(g.heading) && m.open(at, dir)) options[count++] = dir;
  }
  if (count == 0) {
    if (!m.open(at, reverse(g.heading))) return;
    options[count++] = reverse(g.heading);
  }

  Direction choice = options[0];
  if (count > 1) {
    if (rng_.bernoulli(config_.ghost_chase_prob)) {
      const auto target = static_cast<std::size_t>(m.corridor_index(player_));
      int best = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const int dist = m.distance(m.neighbor(at, options[i]), target);
        const bool better = g.blue() ? dist > best : dist < best;
        if (i == 0 || better) {
          best = dist;
          choice = options[i];
        }
      }
    } else {
      choice = options[rng_.below(count)];
    }
  }
  g.heading = choice;
  g.cell = m.corridor_cell(m.neighbor(at, choice));
}

DecomposedTransition MazeWorld::step(ActionId a) {
  if (lives_ == 0) throw InvalidState("maze: no lives left");
  if (a.index >= kMazeActions) throw InvalidArgument("maze: action out of range");

  DecomposedTransition t;
  t.s = state();
  t.a = a;
  t.r_components.assign(component_count(), 0.0);

  if (freeze_ > 0) {
    --freeze_;
    t.events.push_back(Event::inactive);
    t.s_next = state();
    return t;
  }

  bool any_blue = false;
  for (Ghost& g : ghosts_) {
    if (g.blue_timer > 0) --g.blue_timer;
    any_blue = any_blue || g.blue();
  }
  if (!any_blue) blue_chain_ = 0;
  if (fruit_ && --fruit_->timer <= 0) fruit_.reset();

  auto award = [&](std::size_t component, int points, Event e) {
    t.r_env += points;
    t.r_components[component] += points;
    t.events.push_back(e);
  };

  const Cell player_before = player_;
  std::array<Cell, kGhosts> ghost_before{};
  try_move_player(a.index);
  ++ticks_;
  const auto sits_out = [this](int every) { return every > 0 && ticks_ % static_cast<std::uint64_t>(every) == 0; };
  for (std::size_t i = 0; i < kGhosts; ++i) {
    Ghost& g = ghosts_[i];
    ghost_before[i] = g.cell;
    if (g.release_in > 0) {
      --g.release_in;
      continue;
    }
    if (sits_out(g.blue() ? config_.blue_skip_every : config_.ghost_skip_every)) continue;
    move_ghost(g);
  }

  bool died = false;
  for (std::size_t i = 0; i < kGhosts && !died; ++i) {
    Ghost& g = ghosts_[i];
    const bool contact = g.cell == player_ || (g.cell == player_before && ghost_before[i] == player_);
    if (!contact) continue;
    if (g.blue()) {
      award(blue_ghost_component(i), PointsTable::blue_ghost_chain[static_cast<std::size_t>(blue_chain_)],
            Event::blue_ghost_eaten);
      blue_chain_ = std::min(blue_chain_ + 1, 4);
      const Maze& m = maze();
      g = Ghost{m.ghost_house()[i % m.ghost_house().size()], Direction::north, 0, 0};
    } else {
      t.shaping += kGhostContactShaping;
      t.r_components[ghost_component(i)] += kGhostContactShaping;
      t.events.push_back(Event::ghost_contact);
      died = true;
    }
  }

  if (died) {
    --lives_;
    if (lives_ > 0) reset_positions();
  } else {
    const Maze& m = maze();
    for (std::size_t i = 0; i < m.pellets().size(); ++i)
      if (pellet_alive_[i] && m.pellets()[i] == player_) {
        pellet_alive_[i] = false;
        --dots_remaining_;
        award(pellet_component(i), PointsTable::pellet, Event::pellet_eaten);
      }
    for (std::size_t i = 0; i < m.power_pellets().size(); ++i)
      if (power_alive_[i] && m.power_pellets()[i] == player_) {
        power_alive_[i] = false;
        --dots_remaining_;
        award(power_component(i), PointsTable::power_pellet, Event::power_pellet_eaten);
        for (Ghost& g : ghosts_) g.blue_timer = config_.blue_duration;
        blue_chain_ = 0;
      }
    if (fruit_ && fruit_->cell == player_) {
      award(fruit_component(), PointsTable::fruit_value(fruit_->type), Event::fruit_eaten);
      fruit_.reset();
    }

    if (m.fruit_spawn()) {
      const bool first = fruit_spawns_ == 0 && dots_remaining_ * 4 <= dots_total_ * 3;
      const bool second = fruit_spawns_ == 1 && dots_remaining_ * 4 <= dots_total_;
      if ((first || second) && dots_remaining_ > 0) {
        const auto fixed = fruit_for_level(level_);
        const FruitType type = fixed ? *fixed : static_cast<FruitType>(rng_.below(kFruitTypes));
        fruit_ = FruitOnBoard{*m.fruit_spawn(), type, config_.fruit_duration};
        ++fruit_spawns_;
        t.events.push_back(Event::fruit_spawned);
      }
    }

    if (dots_remaining_ == 0) {
      t.events.push_back(Event::level_complete);
      ++level_;
      load_level();
    }
  }

  t.terminal = lives_ == 0;
  t.s_next = state();
  return t;
}

}  // namespace hra
