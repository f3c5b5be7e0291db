#pragma once

// Learners for the fruit-collection grid. All of them expose the same
// interface: aggregated action values for a state and one learning step per
// transition. They differ only in representation and update rule.
//
//   dqn     shared trunk, single-head loss on the aggregated output
//   dqn+1   per-head input blocks (position + own fruit bit), single-head loss
//   hra     shared trunk, one loss term per head
//   hra+1   per-head input blocks, one loss term per head
//   hra+2   tabular heads over the agent position; a head's episode ends when
//           its fruit is eaten
//   hra+3   location GVFs; a head copies its GVF while its fruit is present

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "hra/checkpoint.hpp"
#include "hra/fruit.hpp"
#include "hra/value_heads.hpp"

namespace hra {

enum class FruitMethod { dqn, dqn_plus1, hra, hra_plus1, hra_plus2, hra_plus3 };

std::string_view to_string(FruitMethod m);
/// Throws ConfigError for names that are not fruit methods.
FruitMethod fruit_method_from_string(std::string_view name);

struct FruitAgentConfig {
  FruitMethod method = FruitMethod::hra;
  TargetRule rule{TargetKind::uniform_mean, 0.99};
  double step_size = 0.001;
  /// Updates between target-network refreshes; 1 bootstraps from the live net.
  std::size_t target_sync = 1;
  /// 0 trains online on each transition; otherwise a FIFO replay buffer.
  std::size_t replay_capacity = 0;
  std::size_t batch_size = 1;
};

class FruitAgent {
 public:
  virtual ~FruitAgent() = default;

  virtual FruitMethod method() const = 0;
  /// Aggregated action values of a FruitGrid state.
  virtual std::vector<double> action_values(StateId s) const = 0;
  virtual void learn(const DecomposedTransition& t) = 0;

  virtual void save(bin::Sections& sections) const = 0;
  virtual void load(const bin::Sections& sections) = 0;
};

std::unique_ptr<FruitAgent> make_fruit_agent(const FruitAgentConfig& config, std::uint64_t seed);

}  // namespace hra
