#include "hra/gvf.hpp"

#include <istream>
#include <ostream>

#include "hra/checkpoint.hpp"
#include "hra/errors.hpp"
#include "hra/maze.hpp"

namespace hra {

MapTopology MapTopology::of(const Maze& maze, std::size_t action_count) {
  MapTopology t;
  t.cells.reserve(maze.corridor_count());
  for (std::size_t i = 0; i < maze.corridor_count(); ++i) t.cells.push_back(maze.corridor_cell(i));
  t.states_per_cell = 4;
  t.action_count = action_count;
  return t;
}

MapTopology MapTopology::open_grid(int rows, int cols, std::size_t action_count) {
  MapTopology t;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) t.cells.push_back({r, c});
  t.states_per_cell = 1;
  t.action_count = action_count;
  return t;
}

Gvf::Gvf(std::size_t target_cell, std::size_t state_count, std::size_t action_count)
    : target_(target_cell), actions_(action_count), table_(state_count * action_count, 0.0) {}

void Gvf::update(const MapTopology& topo, const TargetRule& rule, double alpha, const GvfTransition& t) {
  const bool reached = topo.cell_of_state(t.s_next) == target_;
  const double y = reached ? 1.0 : rule.gamma * bootstrap_value(rule.kind, row(t.s_next));
  double& q = table_[t.s * actions_ + t.a];
  q = alpha == 1.0 ? y : (1.0 - alpha) * q + alpha * y;
}

GvfBank::GvfBank(TargetRule rule, double alpha) : rule_(rule), alpha_(alpha) {
  rule_.validate();
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("GVF step size must lie in (0,1]");
}

void GvfBank::register_map(std::size_t map_id, MapTopology topology) {
  if (has_map(map_id)) return;
  if (topology.cells.empty() || topology.states_per_cell == 0 || topology.action_count == 0)
    throw InvalidArgument("empty map topology");
  MapGvfs m;
  for (std::size_t i = 0; i < topology.cells.size(); ++i) m.cell_index[topology.cells[i]] = i;
  m.slot_of_cell.assign(topology.cells.size(), -1);
  m.topology = std::move(topology);
  maps_.emplace(map_id, std::move(m));
}

const GvfBank::MapGvfs& GvfBank::map(std::size_t map_id) const {
  const auto it = maps_.find(map_id);
  if (it == maps_.end()) throw InvalidArgument("unknown map id " + std::to_string(map_id));
  return it->second;
}

const MapTopology& GvfBank::topology(std::size_t map_id) const { return map(map_id).topology; }

GvfHandle GvfBank::ensure(const GvfKey& key) {
  auto it = maps_.find(key.map_id);
  if (it == maps_.end()) throw InvalidArgument("unknown map id " + std::to_string(key.map_id));
  MapGvfs& m = it->second;
  const auto cell = m.cell_index.find(key.target);
  if (cell == m.cell_index.end())
    throw InvalidArgument("GVF target (" + std::to_string(key.target.row) + "," + std::to_string(key.target.col) +
                          ") is not a corridor cell");
  int& slot = m.slot_of_cell[cell->second];
  if (slot < 0) {
    slot = static_cast<int>(m.gvfs.size());
    m.gvfs.emplace_back(cell->second, m.topology.state_count(), m.topology.action_count);
    created_.push_back(key);
  }
  return {key.map_id, static_cast<std::size_t>(slot)};
}

int GvfBank::find_slot(const GvfKey& key) const {
  const auto it = maps_.find(key.map_id);
  if (it == maps_.end()) return -1;
  const auto cell = it->second.cell_index.find(key.target);
  if (cell == it->second.cell_index.end()) return -1;
  return it->second.slot_of_cell[cell->second];
}

bool GvfBank::contains(const GvfKey& key) const { return find_slot(key) >= 0; }

const Gvf& GvfBank::at(GvfHandle h) const { return map(h.map_id).gvfs.at(h.slot); }

double GvfBank::value(const GvfKey& key, std::size_t state, std::size_t action) const {
  const int slot = find_slot(key);
  if (slot < 0) return 0.0;
  return maps_.at(key.map_id).gvfs[static_cast<std::size_t>(slot)].value(state, action);
}

void GvfBank::values(const GvfKey& key, std::size_t state, std::span<double> out) const {
  const int slot = find_slot(key);
  if (slot < 0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const auto row = maps_.at(key.map_id).gvfs[static_cast<std::size_t>(slot)].row(state);
  std::copy(row.begin(), row.end(), out.begin());
}

void GvfBank::update_all(const GvfTransition& t) {
  auto it = maps_.find(t.map_id);
  if (it == maps_.end()) return;
  MapGvfs& m = it->second;
  const auto n = static_cast<std::ptrdiff_t>(m.gvfs.size());
#pragma omp parallel for schedule(static) if (n > 64)
  for (std::ptrdiff_t i = 0; i < n; ++i) m.gvfs[static_cast<std::size_t>(i)].update(m.topology, rule_, alpha_, t);
}

void GvfBank::update_all_serial(const GvfTransition& t) {
  auto it = maps_.find(t.map_id);
  if (it == maps_.end()) return;
  MapGvfs& m = it->second;
  for (Gvf& g : m.gvfs) g.update(m.topology, rule_, alpha_, t);
}

std::size_t GvfBank::size() const {
  std::size_t n = 0;
  for (const auto& [id, m] : maps_) n += m.gvfs.size();
  return n;
}

std::size_t GvfBank::size(std::size_t map_id) const {
  const auto it = maps_.find(map_id);
  return it == maps_.end() ? 0 : it->second.gvfs.size();
}

std::size_t GvfBank::entry_count() const {
  std::size_t n = 0;
  for (const auto& [id, m] : maps_)
    for (const Gvf& g : m.gvfs) n += g.table().size();
  return n;
}

void write_bank(std::ostream& os, const GvfBank& bank) {
  os.write("HRAGVF01", 8);
  bin::put_u32(os, bank.rule_.kind == TargetKind::max ? 0 : 1);
  bin::put_f64(os, bank.rule_.gamma);
  bin::put_f64(os, bank.alpha_);
  bin::put_u32(os, static_cast<std::uint32_t>(bank.maps_.size()));
  for (const auto& [id, m] : bank.maps_) {
    bin::put_u32(os, static_cast<std::uint32_t>(id));
    bin::put_u32(os, static_cast<std::uint32_t>(m.topology.states_per_cell));
    bin::put_u32(os, static_cast<std::uint32_t>(m.topology.action_count));
    bin::put_u32(os, static_cast<std::uint32_t>(m.topology.cells.size()));
    for (const Cell c : m.topology.cells) {
      bin::put_u32(os, static_cast<std::uint32_t>(c.row));
      bin::put_u32(os, static_cast<std::uint32_t>(c.col));
    }
  }
  bin::put_u32(os, static_cast<std::uint32_t>(bank.created_.size()));
  for (const GvfKey& key : bank.created_) {
    bin::put_u32(os, static_cast<std::uint32_t>(key.map_id));
    bin::put_u32(os, static_cast<std::uint32_t>(key.target.row));
    bin::put_u32(os, static_cast<std::uint32_t>(key.target.col));
    const Gvf& g = bank.maps_.at(key.map_id).gvfs[static_cast<std::size_t>(bank.find_slot(key))];
    bin::put_u64(os, g.table().size());
    for (double v : g.table()) bin::put_f64(os, v);
  }
}

GvfBank read_bank(std::istream& is) {
  if (bin::get_bytes(is, 8) != "HRAGVF01") throw ParseError("not a GVF bank snapshot", 0, 0);
  TargetRule rule;
  rule.kind = bin::get_u32(is) == 0 ? TargetKind::max : TargetKind::uniform_mean;
  rule.gamma = bin::get_f64(is);
  const double alpha = bin::get_f64(is);
  GvfBank bank(rule, alpha);
  const std::uint32_t maps = bin::get_u32(is);
  for (std::uint32_t i = 0; i < maps; ++i) {
    const std::uint32_t id = bin::get_u32(is);
    MapTopology topo;
    topo.states_per_cell = bin::get_u32(is);
    topo.action_count = bin::get_u32(is);
    topo.cells.resize(bin::get_u32(is));
    for (Cell& c : topo.cells) {
      c.row = static_cast<int>(bin::get_u32(is));
      c.col = static_cast<int>(bin::get_u32(is));
    }
    bank.register_map(id, std::move(topo));
  }
  const std::uint32_t count = bin::get_u32(is);
  for (std::uint32_t i = 0; i < count; ++i) {
    GvfKey key;
    key.map_id = bin::get_u32(is);
    key.target.row = static_cast<int>(bin::get_u32(is));
    key.target.col = static_cast<int>(bin::get_u32(is));
    const GvfHandle h = bank.ensure(key);
    auto table = bank.maps_.at(h.map_id).gvfs[h.slot].table();
    if (bin::get_u64(is) != table.size()) throw ParseError("GVF table size mismatch", 0, 0);
    for (double& v : table) v = bin::get_f64(is);
  }
  return bank;
}

}  // namespace hra
