#include "hra/fruit.hpp"

#include <numeric>

#include "hra/errors.hpp"
#include "hra/rng.hpp"

namespace hra {

FruitLayout default_fruit_layout() {
  return {Cell{0, 2}, Cell{0, 7}, Cell{2, 0}, Cell{2, 9}, Cell{4, 4},
          Cell{5, 5}, Cell{7, 0}, Cell{7, 9}, Cell{9, 2}, Cell{9, 7}};
}

FruitGrid::FruitGrid(FruitLayout layout) : layout_(layout) {
  for (std::size_t i = 0; i < kFruitSlots; ++i) {
    const Cell c = layout_[i];
    if (c.row < 0 || c.row >= kFruitGridSize || c.col < 0 || c.col >= kFruitGridSize)
      throw InvalidArgument("fruit slot outside the 10x10 grid");
    for (std::size_t j = 0; j < i; ++j)
      if (layout_[j] == c) throw InvalidArgument("duplicate fruit slot");
  }
}

std::optional<std::size_t> FruitGrid::slot_at(Cell c) const {
  for (std::size_t i = 0; i < kFruitSlots; ++i)
    if (layout_[i] == c) return i;
  return std::nullopt;
}

StateId FruitGrid::reset(std::uint64_t seed) {
  Rng rng(seed);
  std::array<std::size_t, kFruitSlots> order;
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t i = 0; i < kFruitsPerEpisode; ++i) {
    const std::size_t j = i + rng.below(kFruitSlots - i);
    std::swap(order[i], order[j]);
  }
  active_.reset();
  for (std::size_t i = 0; i < kFruitsPerEpisode; ++i) active_.set(order[i]);

  while (true) {
    agent_ = cell_at(rng.below(kFruitCells));
    const auto slot = slot_at(agent_);
    if (!slot || !active_.test(*slot)) break;
  }
  steps_ = 0;
  done_ = false;
  return state();
}

void FruitGrid::set_state(Cell agent, std::bitset<kFruitSlots> active) {
  if (agent.row < 0 || agent.row >= kFruitGridSize || agent.col < 0 || agent.col >= kFruitGridSize)
    throw InvalidArgument("agent outside the grid");
  agent_ = agent;
  active_ = active;
  steps_ = 0;
  done_ = active_.none();
}

StateId FruitGrid::state() const { return encode_fruit_state(agent_, active_); }

DecomposedTransition FruitGrid::step(ActionId a) {
  if (done_) throw InvalidState("fruit grid: episode already finished");
  if (a.index >= kCompassActions) throw InvalidArgument("fruit grid: action out of range");

  DecomposedTransition t;
  t.s = state();
  t.a = a;
  t.r_components.assign(kFruitSlots, 0.0);

  const Cell next = moved(agent_, static_cast<Direction>(a.index));
  if (next.row >= 0 && next.row < kFruitGridSize && next.col >= 0 && next.col < kFruitGridSize) agent_ = next;
  ++steps_;

  if (const auto slot = slot_at(agent_); slot && active_.test(*slot)) {
    active_.reset(*slot);
    t.r_env = 1.0;
    t.r_components[*slot] = 1.0;
    t.events.push_back(Event::fruit_eaten);
  }

  if (active_.none()) {
    done_ = true;
    t.terminal = true;
  } else if (steps_ >= kFruitStepLimit) {
    done_ = true;
    t.terminal = true;
    t.truncated = true;
  }
  t.s_next = state();
  return t;
}

StateId encode_fruit_state(Cell agent, std::bitset<kFruitSlots> active) {
  return StateId{cell_index(agent) + kFruitCells * active.to_ulong()};
}

std::pair<Cell, std::bitset<kFruitSlots>> decode_fruit_state(StateId s) {
  return {cell_at(s.index % kFruitCells), std::bitset<kFruitSlots>(s.index / kFruitCells)};
}

std::vector<double> fruit_features(StateId s, FeatureProjection projection, std::optional<std::size_t> head) {
  const bool wants_head = projection == FeatureProjection::per_head_reduced;
  if (wants_head != head.has_value())
    throw InvalidArgument("fruit_features: a head index is required exactly for the per-head projection");
  if (head && *head >= kFruitSlots) throw InvalidArgument("fruit_features: head index out of range");

  const auto [agent, active] = decode_fruit_state(s);
  std::vector<double> f;
  switch (projection) {
    case FeatureProjection::full:
      f.assign(kFullFeatureCount, 0.0);
      for (std::size_t k = 0; k < kFruitSlots; ++k) f[kFruitCells + k] = active.test(k) ? 1.0 : 0.0;
      break;
    case FeatureProjection::per_head_reduced:
      f.assign(kFruitCells + 1, 0.0);
      f[kFruitCells] = active.test(*head) ? 1.0 : 0.0;
      break;
    case FeatureProjection::one_hot_joint:
      f.assign(kFruitCells, 0.0);
      break;
  }
  f[cell_index(agent)] = 1.0;
  return f;
}

std::vector<double> fruit_features(const FruitGrid& grid, FeatureProjection projection,
                                   std::optional<std::size_t> head) {
  return fruit_features(grid.state(), projection, head);
}

}  // namespace hra
