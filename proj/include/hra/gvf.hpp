#pragma once

// Location GVFs: one tabular pseudo Q-function per (map, target cell), with
// pseudo-reward 1 on entering the target and no bootstrap past it. The bank
// grows as new cells are discovered and trains every member off-policy on
// each movement transition.

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include "hra/grid.hpp"
#include "hra/value_heads.hpp"

namespace hra {

class Maze;

struct GvfKey {
  std::size_t map_id = 0;
  Cell target;
  friend auto operator<=>(const GvfKey&, const GvfKey&) = default;
};

/// State space of one map as seen by its GVFs: each cell owns
/// `states_per_cell` consecutive player states (e.g. four orientations).
struct MapTopology {
  std::vector<Cell> cells;
  std::size_t states_per_cell = 1;
  std::size_t action_count = 4;

  std::size_t state_count() const { return cells.size() * states_per_cell; }
  std::size_t cell_of_state(std::size_t s) const { return s / states_per_cell; }

  static MapTopology of(const Maze& maze, std::size_t action_count);
  static MapTopology open_grid(int rows, int cols, std::size_t action_count);
};

struct GvfHandle {
  std::size_t map_id = 0;
  std::size_t slot = 0;
  friend bool operator==(GvfHandle, GvfHandle) = default;
};

/// One player move on a given map.
struct GvfTransition {
  std::size_t map_id = 0;
  std::size_t s = 0;
  std::size_t a = 0;
  std::size_t s_next = 0;
};

class Gvf {
 public:
  Gvf(std::size_t target_cell, std::size_t state_count, std::size_t action_count);

  std::size_t target_cell() const { return target_; }
  double value(std::size_t s, std::size_t a) const { return table_[s * actions_ + a]; }
  std::span<const double> row(std::size_t s) const { return {table_.data() + s * actions_, actions_}; }
  std::span<const double> table() const { return table_; }
  std::span<double> table() { return table_; }

  void update(const MapTopology& topo, const TargetRule& rule, double alpha, const GvfTransition& t);

 private:
  std::size_t target_;
  std::size_t actions_;
  std::vector<double> table_;
};

class GvfBank {
 public:
  explicit GvfBank(TargetRule rule = {TargetKind::uniform_mean, 0.99}, double alpha = 1.0);

  const TargetRule& rule() const { return rule_; }
  double alpha() const { return alpha_; }

  void register_map(std::size_t map_id, MapTopology topology);
  bool has_map(std::size_t map_id) const { return maps_.count(map_id) != 0; }
  const MapTopology& topology(std::size_t map_id) const;

  /// Idempotent. Throws InvalidArgument for unknown maps and wall cells.
  GvfHandle ensure(const GvfKey& key);
  bool contains(const GvfKey& key) const;
  const Gvf& at(GvfHandle h) const;

  /// Pure reads; a missing GVF reads 0 everywhere.
  double value(const GvfKey& key, std::size_t state, std::size_t action) const;
  /// Copies the action values of `state` into `out` (zeros when missing).
  void values(const GvfKey& key, std::size_t state, std::span<double> out) const;

  /// Updates every GVF of the transition's map; parallel across GVFs.
  void update_all(const GvfTransition& t);
  /// Serial reference of update_all; results are bit-identical.
  void update_all_serial(const GvfTransition& t);

  std::size_t size() const;
  std::size_t size(std::size_t map_id) const;
  /// Total stored table entries across all GVFs.
  std::size_t entry_count() const;
  const std::vector<GvfKey>& created_order() const { return created_; }

  friend void write_bank(std::ostream& os, const GvfBank& bank);
  friend GvfBank read_bank(std::istream& is);

 private:
  struct MapGvfs {
    MapTopology topology;
    std::map<Cell, std::size_t> cell_index;
    std::vector<int> slot_of_cell;  // -1 when absent
    std::vector<Gvf> gvfs;
  };

  const MapGvfs& map(std::size_t map_id) const;
  int find_slot(const GvfKey& key) const;

  TargetRule rule_;
  double alpha_;
  std::map<std::size_t, MapGvfs> maps_;
  std::vector<GvfKey> created_;
};

// Snapshot: rule, alpha, topologies, then per GVF a (map_id, row, col) header
// followed by its dense table.
void write_bank(std::ostream& os, const GvfBank& bank);
GvfBank read_bank(std::istream& is);

}  // namespace hra
