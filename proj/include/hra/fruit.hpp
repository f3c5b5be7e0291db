#pragma once

// The 10x10 fruit-collection grid: five of ten fixed slots hold a fruit at
// reset, each eaten fruit pays +1 to the component of its slot.

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <vector>

#include "hra/grid.hpp"
#include "hra/mdp.hpp"

namespace hra {

inline constexpr int kFruitGridSize = 10;
inline constexpr std::size_t kFruitCells = 100;
inline constexpr std::size_t kFruitSlots = 10;
inline constexpr std::size_t kFruitsPerEpisode = 5;
inline constexpr std::size_t kFruitStepLimit = 300;

using FruitLayout = std::array<Cell, kFruitSlots>;

FruitLayout default_fruit_layout();

enum class FeatureProjection { full, per_head_reduced, one_hot_joint };

inline constexpr std::size_t kFullFeatureCount = kFruitCells + kFruitSlots;

class FruitGrid : public Environment {
 public:
  explicit FruitGrid(FruitLayout layout = default_fruit_layout());

  std::size_t action_count() const override { return kCompassActions; }
  /// agent cell x presence bitmask over all ten slots
  std::size_t state_count() const override { return kFruitCells << kFruitSlots; }
  std::size_t component_count() const override { return kFruitSlots; }

  StateId reset(std::uint64_t seed) override;
  StateId state() const override;
  bool done() const override { return done_; }
  DecomposedTransition step(ActionId a) override;

  /// Places the agent and fruits explicitly; used by tests and the oracle.
  void set_state(Cell agent, std::bitset<kFruitSlots> active);

  const FruitLayout& layout() const { return layout_; }
  Cell agent() const { return agent_; }
  std::bitset<kFruitSlots> active() const { return active_; }
  bool fruit_active(std::size_t slot) const { return active_.test(slot); }
  std::size_t step_count() const { return steps_; }

  std::optional<std::size_t> slot_at(Cell c) const;

 private:
  FruitLayout layout_;
  Cell agent_{};
  std::bitset<kFruitSlots> active_;
  std::size_t steps_ = 0;
  bool done_ = true;
};

inline std::size_t cell_index(Cell c) { return static_cast<std::size_t>(c.row * kFruitGridSize + c.col); }
inline Cell cell_at(std::size_t index) {
  return {static_cast<int>(index) / kFruitGridSize, static_cast<int>(index) % kFruitGridSize};
}

StateId encode_fruit_state(Cell agent, std::bitset<kFruitSlots> active);
std::pair<Cell, std::bitset<kFruitSlots>> decode_fruit_state(StateId s);

/// Binary features of a grid state.
///  full:             100 position bits + 10 fruit-presence bits
///  per_head_reduced: 100 position bits + the presence bit of `head`
///  one_hot_joint:    100 position bits
std::vector<double> fruit_features(const FruitGrid& grid, FeatureProjection projection,
                                   std::optional<std::size_t> head = std::nullopt);
std::vector<double> fruit_features(StateId s, FeatureProjection projection,
                                   std::optional<std::size_t> head = std::nullopt);

}  // namespace hra
