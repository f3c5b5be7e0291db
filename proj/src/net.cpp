#include "hra/net.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "hra/checkpoint.hpp"
#include "hra/errors.hpp"
#include "hra/rng.hpp"

namespace hra {

// W1 is stored input-major (inputs x hidden) so a sparse binary input adds
// contiguous rows.

SharedTrunkNet::SharedTrunkNet(NetShape shape, std::uint64_t seed) : shape_(shape) {
  std::vector<std::size_t> all(shape_.input_size);
  std::iota(all.begin(), all.end(), 0);
  layout({all}, shape_.head_count);
  initialize(seed);
}

SharedTrunkNet::SharedTrunkNet(NetShape shape, std::vector<std::vector<std::size_t>> head_inputs, std::uint64_t seed)
    : shape_(shape) {
  if (head_inputs.size() != shape_.head_count) throw InvalidArgument("one input list per head is required");
  if (shape_.hidden_size % shape_.head_count != 0)
    throw InvalidArgument("hidden size must divide evenly across head blocks");
  layout(std::move(head_inputs), 1);
  initialize(seed);
}

void SharedTrunkNet::layout(std::vector<std::vector<std::size_t>> block_inputs, std::size_t heads_per_block) {
  if (shape_.input_size == 0 || shape_.hidden_size == 0 || shape_.head_count == 0 || shape_.action_count == 0)
    throw InvalidArgument("network dimensions must be positive");
  const std::size_t hidden_per_block = shape_.hidden_size / block_inputs.size();
  const std::size_t actions = shape_.action_count;
  std::size_t offset = 0;
  std::size_t head = 0;
  blocks_.clear();
  for (auto& inputs : block_inputs) {
    for (std::size_t i : inputs)
      if (i >= shape_.input_size) throw InvalidArgument("block input index out of range");
    NetBlock b;
    b.inputs = std::move(inputs);
    b.hidden = hidden_per_block;
    b.first_head = head;
    b.head_count = heads_per_block;
    b.w1 = offset;
    offset += b.inputs.size() * b.hidden;
    b.b1 = offset;
    offset += b.hidden;
    b.w2 = offset;
    offset += b.head_count * actions * b.hidden;
    b.b2 = offset;
    offset += b.head_count * actions;
    head += heads_per_block;
    blocks_.push_back(std::move(b));
  }
  params_.assign(offset, 0.0);
  aggregation_.assign(actions * shape_.head_count, 1.0);
}

void SharedTrunkNet::initialize(std::uint64_t seed) {
  Rng rng(seed);
  const std::size_t actions = shape_.action_count;
  for (const NetBlock& b : blocks_) {
    const double r1 = 1.0 / std::sqrt(static_cast<double>(b.inputs.size()));
    for (std::size_t i = 0; i < b.inputs.size() * b.hidden; ++i) params_[b.w1 + i] = rng.uniform(-r1, r1);
    const double r2 = 1.0 / std::sqrt(static_cast<double>(b.hidden));
    for (std::size_t i = 0; i < b.head_count * actions * b.hidden; ++i) params_[b.w2 + i] = rng.uniform(-r2, r2);
  }
}

namespace {

void forward_block(const SharedTrunkNet& net, const NetBlock& b, std::span<const double> x,
                   std::vector<double>& pre, std::span<double> heads) {
  const auto p = net.parameters();
  const std::size_t actions = net.shape().action_count;
  pre.assign(p.begin() + static_cast<std::ptrdiff_t>(b.b1), p.begin() + static_cast<std::ptrdiff_t>(b.b1 + b.hidden));
  for (std::size_t i = 0; i < b.inputs.size(); ++i) {
    const double xi = x[b.inputs[i]];
    if (xi == 0.0) continue;
    const double* w = &p[b.w1 + i * b.hidden];
    for (std::size_t j = 0; j < b.hidden; ++j) pre[j] += xi * w[j];
  }
  const std::size_t outputs = b.head_count * actions;
  for (std::size_t o = 0; o < outputs; ++o) {
    const double* w = &p[b.w2 + o * b.hidden];
    double sum = p[b.b2 + o];
    for (std::size_t j = 0; j < b.hidden; ++j) sum += w[j] * (pre[j] > 0.0 ? pre[j] : 0.0);
    heads[b.first_head * actions + o] = sum;
  }
}

void check_features(const SharedTrunkNet& net, std::span<const double> features) {
  if (features.size() != net.shape().input_size)
    throw InvalidArgument("feature length " + std::to_string(features.size()) + " != network input size " +
                          std::to_string(net.shape().input_size));
}

void aggregate_heads(const SharedTrunkNet& net, NetOutput& out) {
  const std::size_t n = net.shape().head_count;
  const std::size_t actions = net.shape().action_count;
  const auto w = net.aggregation_weights();
  out.aggregated.assign(actions, 0.0);
  for (std::size_t a = 0; a < actions; ++a) {
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += w[a * n + k] * out.heads[k * actions + a];
    out.aggregated[a] = sum;
  }
}

/// Output-layer error signal dL/dQ_k(s,a) for the taken action, per head.
std::vector<double> output_error(const SharedTrunkNet& net, const NetOutput& out, const TrainingSample& s,
                                 UpdateMode mode) {
  const std::size_t n = net.shape().head_count;
  std::vector<double> err(n, 0.0);
  if (mode == UpdateMode::multi_head) {
    for (std::size_t k = 0; k < n; ++k) err[k] = -2.0 * (s.targets[k] - out.head(k, s.action));
  } else {
    const double g = -2.0 * (s.targets[0] - out.aggregated[s.action]);
    const auto w = net.aggregation_weights();
    for (std::size_t k = 0; k < n; ++k) err[k] = w[s.action * n + k] * g;
  }
  return err;
}

void check_sample(const SharedTrunkNet& net, const TrainingSample& s, UpdateMode mode) {
  check_features(net, s.features);
  if (s.action >= net.shape().action_count) throw InvalidArgument("sample action out of range");
  const std::size_t expected = mode == UpdateMode::multi_head ? net.shape().head_count : 1;
  if (s.targets.size() != expected)
    throw InvalidArgument("target count " + std::to_string(s.targets.size()) + " does not match update mode (expected " +
                          std::to_string(expected) + ")");
}

/// Adds scale * dL/dtheta for one sample into `out` (which may alias the
/// network's own parameters).
void accumulate_gradient(const SharedTrunkNet& net, const TrainingSample& s, UpdateMode mode, double scale,
                         std::span<double> out) {
  const std::size_t actions = net.shape().action_count;
  NetOutput fwd;
  fwd.actions = actions;
  fwd.heads.assign(net.shape().head_count * actions, 0.0);
  std::vector<std::vector<double>> pre(net.blocks().size());
  for (std::size_t bi = 0; bi < net.blocks().size(); ++bi)
    forward_block(net, net.blocks()[bi], s.features, pre[bi], fwd.heads);
  aggregate_heads(net, fwd);
  const std::vector<double> err = output_error(net, fwd, s, mode);

  const auto p = net.parameters();
  std::vector<double> grad_hidden;
  for (std::size_t bi = 0; bi < net.blocks().size(); ++bi) {
    const NetBlock& b = net.blocks()[bi];
    const std::vector<double>& z = pre[bi];
    grad_hidden.assign(b.hidden, 0.0);
    for (std::size_t h = 0; h < b.head_count; ++h) {
      const double e = err[b.first_head + h];
      if (e == 0.0) continue;
      const double* w = &p[b.w2 + (h * actions + s.action) * b.hidden];
      for (std::size_t j = 0; j < b.hidden; ++j) grad_hidden[j] += e * w[j];
    }
    for (std::size_t j = 0; j < b.hidden; ++j)
      if (z[j] <= 0.0) grad_hidden[j] = 0.0;

    for (std::size_t h = 0; h < b.head_count; ++h) {
      const double e = scale * err[b.first_head + h];
      if (e == 0.0) continue;
      const std::size_t row = h * actions + s.action;
      double* gw = &out[b.w2 + row * b.hidden];
      for (std::size_t j = 0; j < b.hidden; ++j)
        if (z[j] > 0.0) gw[j] += e * z[j];
      out[b.b2 + row] += e;
    }
    for (std::size_t i = 0; i < b.inputs.size(); ++i) {
      const double xi = s.features[b.inputs[i]];
      if (xi == 0.0) continue;
      double* gw = &out[b.w1 + i * b.hidden];
      for (std::size_t j = 0; j < b.hidden; ++j) gw[j] += scale * xi * grad_hidden[j];
    }
    for (std::size_t j = 0; j < b.hidden; ++j) out[b.b1 + j] += scale * grad_hidden[j];
  }
}

}  // namespace

NetOutput net_forward(const SharedTrunkNet& net, std::span<const double> features) {
  check_features(net, features);
  NetOutput out;
  out.actions = net.shape().action_count;
  out.heads.assign(net.shape().head_count * out.actions, 0.0);
  std::vector<double> pre;
  for (const NetBlock& b : net.blocks()) forward_block(net, b, features, pre, out.heads);
  aggregate_heads(net, out);
  return out;
}

double net_loss(const SharedTrunkNet& net, std::span<const TrainingSample> batch, UpdateMode mode) {
  double loss = 0.0;
  for (const TrainingSample& s : batch) {
    check_sample(net, s, mode);
    const NetOutput out = net_forward(net, s.features);
    if (mode == UpdateMode::multi_head) {
      for (std::size_t k = 0; k < net.shape().head_count; ++k) {
        const double d = s.targets[k] - out.head(k, s.action);
        loss += d * d;
      }
    } else {
      const double d = s.targets[0] - out.aggregated[s.action];
      loss += d * d;
    }
  }
  return loss;
}

std::vector<double> net_gradient(const SharedTrunkNet& net, std::span<const TrainingSample> batch, UpdateMode mode) {
  std::vector<double> grad(net.parameters().size(), 0.0);
  for (const TrainingSample& s : batch) {
    check_sample(net, s, mode);
    accumulate_gradient(net, s, mode, 1.0, grad);
  }
  return grad;
}

void net_update(SharedTrunkNet& net, std::span<const TrainingSample> batch, UpdateMode mode, double step_size) {
  for (const TrainingSample& s : batch) check_sample(net, s, mode);
  if (batch.size() == 1) {
    accumulate_gradient(net, batch[0], mode, -step_size, net.parameters());
    return;
  }
  const std::vector<double> grad = net_gradient(net, batch, mode);
  auto p = net.parameters();
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= step_size * grad[i];
}

TargetNetwork::TargetNetwork(const SharedTrunkNet& live, std::size_t sync_period) : frozen_(live), period_(sync_period) {
  if (sync_period == 0) throw InvalidArgument("target sync period must be positive");
}

void TargetNetwork::sync(const SharedTrunkNet& live) {
  frozen_ = live;
  since_sync_ = 0;
}

bool TargetNetwork::after_update(const SharedTrunkNet& live) {
  if (++since_sync_ < period_) return false;
  sync(live);
  return true;
}

void write_net(std::ostream& os, const SharedTrunkNet& net) {
  os.write("HRANET01", 8);
  bin::put_u32(os, static_cast<std::uint32_t>(net.shape_.input_size));
  bin::put_u32(os, static_cast<std::uint32_t>(net.shape_.hidden_size));
  bin::put_u32(os, static_cast<std::uint32_t>(net.shape_.head_count));
  bin::put_u32(os, static_cast<std::uint32_t>(net.shape_.action_count));
  bin::put_u32(os, static_cast<std::uint32_t>(net.blocks_.size()));
  for (const NetBlock& b : net.blocks_) {
    bin::put_u32(os, static_cast<std::uint32_t>(b.hidden));
    bin::put_u32(os, static_cast<std::uint32_t>(b.first_head));
    bin::put_u32(os, static_cast<std::uint32_t>(b.head_count));
    bin::put_u32(os, static_cast<std::uint32_t>(b.inputs.size()));
    for (std::size_t i : b.inputs) bin::put_u32(os, static_cast<std::uint32_t>(i));
  }
  bin::put_u64(os, net.params_.size());
  for (double v : net.params_) bin::put_f64(os, v);
}

SharedTrunkNet read_net(std::istream& is) {
  if (bin::get_bytes(is, 8) != "HRANET01") throw ParseError("not a network checkpoint", 0, 0);
  SharedTrunkNet net;
  net.shape_.input_size = bin::get_u32(is);
  net.shape_.hidden_size = bin::get_u32(is);
  net.shape_.head_count = bin::get_u32(is);
  net.shape_.action_count = bin::get_u32(is);
  const std::uint32_t block_count = bin::get_u32(is);
  if (block_count == 0 || net.shape_.head_count % block_count != 0) throw ParseError("bad block count", 0, 0);
  std::vector<std::vector<std::size_t>> inputs(block_count);
  std::vector<std::size_t> hidden(block_count);
  for (std::uint32_t b = 0; b < block_count; ++b) {
    hidden[b] = bin::get_u32(is);
    bin::get_u32(is);  // first_head, implied by order
    bin::get_u32(is);  // head_count, implied by block count
    inputs[b].resize(bin::get_u32(is));
    for (auto& i : inputs[b]) i = bin::get_u32(is);
  }
  net.layout(std::move(inputs), net.shape_.head_count / block_count);
  if (net.blocks_.front().hidden != hidden.front()) throw ParseError("hidden size mismatch", 0, 0);
  const std::uint64_t count = bin::get_u64(is);
  if (count != net.params_.size()) throw ParseError("parameter count mismatch", 0, 0);
  for (double& v : net.params_) v = bin::get_f64(is);
  return net;
}

}  // namespace hra
