#pragma once

// Feed-forward multi-head value network:
//   input -> fully connected rectifier layer -> n heads of |A| linear units
//   -> fixed aggregation layer (weight-1 connections) -> |A| summed outputs.
// The hidden layer may be split into per-head blocks that each read a subset
// of the inputs, which realises the per-head reduced feature projection.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace hra {

enum class UpdateMode {
  single_head,  // squared error on the aggregated output of the taken action
  multi_head,   // sum over heads of the squared error of each head's output
};

struct NetShape {
  std::size_t input_size = 110;
  std::size_t hidden_size = 250;
  std::size_t head_count = 10;
  std::size_t action_count = 4;
};

struct NetBlock {
  std::vector<std::size_t> inputs;  // indices into the feature vector
  std::size_t hidden = 0;
  std::size_t first_head = 0;
  std::size_t head_count = 0;
  // Offsets into the flat parameter vector.
  std::size_t w1 = 0;  // inputs x hidden, row-major
  std::size_t b1 = 0;  // hidden
  std::size_t w2 = 0;  // (head_count * actions) x hidden, row-major
  std::size_t b2 = 0;  // head_count * actions
};

struct NetOutput {
  std::vector<double> heads;       // head_count x actions, row-major
  std::vector<double> aggregated;  // actions
  std::size_t actions = 0;

  double head(std::size_t k, std::size_t a) const { return heads[k * actions + a]; }
  std::span<const double> head_row(std::size_t k) const { return {heads.data() + k * actions, actions}; }
};

/// One training example: the taken action and its target(s). Multi-head mode
/// needs one target per head, single-head mode exactly one.
struct TrainingSample {
  std::vector<double> features;
  std::size_t action = 0;
  std::vector<double> targets;
};

class SharedTrunkNet {
 public:
  /// One hidden layer shared by all heads.
  SharedTrunkNet(NetShape shape, std::uint64_t seed);
  /// Hidden layer split into one block per head; block k reads `head_inputs[k]`
  /// and owns hidden_size / head_count units.
  SharedTrunkNet(NetShape shape, std::vector<std::vector<std::size_t>> head_inputs, std::uint64_t seed);

  const NetShape& shape() const { return shape_; }
  const std::vector<NetBlock>& blocks() const { return blocks_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }

  /// Fixed aggregation weights, actions x heads; all exactly 1.
  std::span<const double> aggregation_weights() const { return aggregation_; }

  friend void write_net(std::ostream& os, const SharedTrunkNet& net);
  friend SharedTrunkNet read_net(std::istream& is);

 private:
  SharedTrunkNet() = default;
  void layout(std::vector<std::vector<std::size_t>> block_inputs, std::size_t heads_per_block);
  void initialize(std::uint64_t seed);

  NetShape shape_;
  std::vector<NetBlock> blocks_;
  std::vector<double> params_;
  std::vector<double> aggregation_;
};

/// Throws InvalidArgument on a feature-length mismatch.
NetOutput net_forward(const SharedTrunkNet& net, std::span<const double> features);

/// Squared-error loss summed over the batch.
double net_loss(const SharedTrunkNet& net, std::span<const TrainingSample> batch, UpdateMode mode);

/// Gradient of net_loss with respect to net.parameters().
std::vector<double> net_gradient(const SharedTrunkNet& net, std::span<const TrainingSample> batch, UpdateMode mode);

/// One plain gradient step on net_loss. The aggregation layer is never touched.
void net_update(SharedTrunkNet& net, std::span<const TrainingSample> batch, UpdateMode mode, double step_size);

/// Frozen copy of a live network used to compute bootstrap targets. With
/// sync_period == 1 the copy is refreshed after every update.
class TargetNetwork {
 public:
  TargetNetwork(const SharedTrunkNet& live, std::size_t sync_period);

  const SharedTrunkNet& frozen() const { return frozen_; }
  std::size_t sync_period() const { return period_; }

  void sync(const SharedTrunkNet& live);
  /// Counts one update of `live`; syncs when the period elapses. Returns true on sync.
  bool after_update(const SharedTrunkNet& live);

 private:
  SharedTrunkNet frozen_;
  std::size_t period_;
  std::size_t since_sync_ = 0;
};

// Flat binary checkpoint, little-endian:
//   "HRANET01" | u32 input, hidden, heads, actions, blocks
//   per block: u32 hidden, first_head, head_count, input_count, input_count x u32 index
//   u64 parameter count | parameter count x f64 (blocks in order: W1 [inputs x hidden], b1, W2 [outputs x hidden], b2)
void write_net(std::ostream& os, const SharedTrunkNet& net);
SharedTrunkNet read_net(std::istream& is);

}  // namespace hra
