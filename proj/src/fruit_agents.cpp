#include "hra/fruit_agents.hpp"

#include <deque>
#include <numeric>
#include <optional>
#include <sstream>

#include "hra/errors.hpp"
#include "hra/gvf.hpp"
#include "hra/net.hpp"
#include "hra/rng.hpp"

namespace hra {

std::string_view to_string(FruitMethod m) {
  switch (m) {
    case FruitMethod::dqn:
      return "dqn";
    case FruitMethod::dqn_plus1:
      return "dqn+1";
    case FruitMethod::hra:
      return "hra";
    case FruitMethod::hra_plus1:
      return "hra+1";
    case FruitMethod::hra_plus2:
      return "hra+2";
    case FruitMethod::hra_plus3:
      return "hra+3";
  }
  return "?";
}

FruitMethod fruit_method_from_string(std::string_view name) {
  for (FruitMethod m : {FruitMethod::dqn, FruitMethod::dqn_plus1, FruitMethod::hra, FruitMethod::hra_plus1,
                        FruitMethod::hra_plus2, FruitMethod::hra_plus3})
    if (to_string(m) == name) return m;
  throw ConfigError("method '" + std::string(name) + "' is not available on the fruit environment");
}

namespace {

const std::string& section(const bin::Sections& sections, const char* tag) {
  const auto it = sections.find(tag);
  if (it == sections.end()) throw ParseError(std::string("checkpoint lacks section ") + tag, 0, 0);
  return it->second;
}

std::size_t position(StateId s) { return cell_index(decode_fruit_state(s).first); }
std::bitset<kFruitSlots> fruits(StateId s) { return decode_fruit_state(s).second; }

class NetFruitAgent final : public FruitAgent {
 public:
  NetFruitAgent(const FruitAgentConfig& config, std::uint64_t seed)
      : config_(config),
        mode_(config.method == FruitMethod::hra || config.method == FruitMethod::hra_plus1 ? UpdateMode::multi_head
                                                                                            : UpdateMode::single_head),
        net_(make_net(config.method, seed)),
        rng_(derive_seed(seed, 0x7e9)) {
    config_.rule.validate();
    if (!(config.step_size > 0.0)) throw ConfigError("step size must be positive");
    if (config.target_sync == 0) throw ConfigError("target_sync must be at least 1");
    if (config.replay_capacity > 0 && (config.batch_size == 0 || config.batch_size > config.replay_capacity))
      throw ConfigError("batch size must lie in [1, replay capacity]");
    if (config.target_sync > 1) target_.emplace(net_, config.target_sync);
  }

  FruitMethod method() const override { return config_.method; }

  std::vector<double> action_values(StateId s) const override {
    return net_forward(net_, fruit_features(s, FeatureProjection::full)).aggregated;
  }

  void learn(const DecomposedTransition& t) override {
    Stored x{t.s, t.a.index, t.r_env, t.r_components, t.s_next, t.terminal && !t.truncated};
    if (config_.replay_capacity == 0) {
      const TrainingSample sample = make_sample(x);
      net_update(net_, std::span(&sample, 1), mode_, config_.step_size);
    } else {
      replay_.push_back(std::move(x));
      if (replay_.size() > config_.replay_capacity) replay_.pop_front();
      if (replay_.size() < config_.batch_size) return;
      std::vector<TrainingSample> batch;
      batch.reserve(config_.batch_size);
      for (std::size_t i = 0; i < config_.batch_size; ++i) batch.push_back(make_sample(replay_[rng_.below(replay_.size())]));
      net_update(net_, batch, mode_, config_.step_size / static_cast<double>(batch.size()));
    }
    if (target_) target_->after_update(net_);
  }

  void save(bin::Sections& sections) const override {
    std::ostringstream os(std::ios::binary);
    write_net(os, net_);
    sections["NETW"] = os.str();
  }

  void load(const bin::Sections& sections) override {
    std::istringstream is(section(sections, "NETW"), std::ios::binary);
    SharedTrunkNet loaded = read_net(is);
    if (loaded.parameters().size() != net_.parameters().size()) throw ParseError("network layout mismatch", 0, 0);
    net_ = std::move(loaded);
    if (target_) target_->sync(net_);
  }

 private:
  struct Stored {
    StateId s;
    std::size_t a;
    double r_env;
    std::vector<double> r;
    StateId s_next;
    bool terminal;
  };

  static SharedTrunkNet make_net(FruitMethod m, std::uint64_t seed) {
    const NetShape shape{kFullFeatureCount, 250, kFruitSlots, kCompassActions};
    if (m == FruitMethod::hra_plus1 || m == FruitMethod::dqn_plus1) {
      std::vector<std::vector<std::size_t>> inputs(kFruitSlots);
      for (std::size_t k = 0; k < kFruitSlots; ++k) {
        inputs[k].resize(kFruitCells);
        std::iota(inputs[k].begin(), inputs[k].end(), 0);
        inputs[k].push_back(kFruitCells + k);
      }
      return SharedTrunkNet(shape, std::move(inputs), seed);
    }
    return SharedTrunkNet(shape, seed);
  }

  TrainingSample make_sample(const Stored& x) const {
    TrainingSample sample{fruit_features(x.s, FeatureProjection::full), x.a, {}};
    const SharedTrunkNet& bootstrap = target_ ? target_->frozen() : net_;
    std::optional<NetOutput> next;
    if (!x.terminal) next = net_forward(bootstrap, fruit_features(x.s_next, FeatureProjection::full));
    if (mode_ == UpdateMode::multi_head) {
      sample.targets.resize(kFruitSlots);
      for (std::size_t k = 0; k < kFruitSlots; ++k)
        sample.targets[k] =
            x.terminal ? x.r[k] : td_target(config_.rule, x.r[k], next->head_row(k), false);
    } else {
      sample.targets = {x.terminal ? x.r_env : td_target(config_.rule, x.r_env, next->aggregated, false)};
    }
    return sample;
  }

  FruitAgentConfig config_;
  UpdateMode mode_;
  SharedTrunkNet net_;
  std::optional<TargetNetwork> target_;
  std::deque<Stored> replay_;
  Rng rng_;
};

class TabularFruitAgent final : public FruitAgent {
 public:
  explicit TabularFruitAgent(const FruitAgentConfig& config) : config_(config) {
    config_.rule.validate();
    if (!(config.step_size > 0.0 && config.step_size <= 1.0)) throw ConfigError("tabular step size must lie in (0,1]");
    heads_.reserve(kFruitSlots);
    for (std::size_t k = 0; k < kFruitSlots; ++k)
      heads_.emplace_back(kFruitCells, kCompassActions, config.step_size, config.rule);
  }

  FruitMethod method() const override { return FruitMethod::hra_plus2; }

  std::vector<double> action_values(StateId s) const override {
    std::vector<double> q(kCompassActions, 0.0);
    const auto present = fruits(s);
    const std::size_t pos = position(s);
    for (std::size_t k = 0; k < kFruitSlots; ++k) {
      if (!present.test(k)) continue;
      const auto row = heads_[k].row(pos);
      for (std::size_t a = 0; a < kCompassActions; ++a) q[a] += row[a];
    }
    return q;
  }

  void learn(const DecomposedTransition& t) override {
    const auto before = fruits(t.s);
    const auto after = fruits(t.s_next);
    const bool episode_over = t.terminal && !t.truncated;
    for (std::size_t k = 0; k < kFruitSlots; ++k) {
      if (!before.test(k)) continue;
      const bool head_terminal = episode_over || !after.test(k);
      heads_[k].update(position(t.s), t.a.index, t.r_components[k], position(t.s_next), head_terminal);
    }
  }

  void save(bin::Sections& sections) const override {
    std::ostringstream os(std::ios::binary);
    for (const TabularHead& h : heads_)
      for (double v : h.table()) bin::put_f64(os, v);
    sections["TABH"] = os.str();
  }

  void load(const bin::Sections& sections) override {
    std::istringstream is(section(sections, "TABH"), std::ios::binary);
    for (TabularHead& h : heads_)
      for (std::size_t s = 0; s < h.state_count(); ++s)
        for (double& v : h.row(s)) v = bin::get_f64(is);
  }

 private:
  FruitAgentConfig config_;
  std::vector<TabularHead> heads_;
};

class GvfFruitAgent final : public FruitAgent {
 public:
  explicit GvfFruitAgent(const FruitAgentConfig& config) : bank_(config.rule, config.step_size) {
    if (!(config.step_size > 0.0 && config.step_size <= 1.0)) throw ConfigError("tabular step size must lie in (0,1]");
    bank_.register_map(0, MapTopology::open_grid(kFruitGridSize, kFruitGridSize, kCompassActions));
    for (const Cell c : default_fruit_layout()) bank_.ensure({0, c});
  }

  FruitMethod method() const override { return FruitMethod::hra_plus3; }

  std::vector<double> action_values(StateId s) const override {
    std::vector<double> q(kCompassActions, 0.0);
    std::vector<double> row(kCompassActions);
    const auto present = fruits(s);
    const std::size_t pos = position(s);
    const FruitLayout layout = default_fruit_layout();
    for (std::size_t k = 0; k < kFruitSlots; ++k) {
      if (!present.test(k)) continue;
      bank_.values({0, layout[k]}, pos, row);
      for (std::size_t a = 0; a < kCompassActions; ++a) q[a] += row[a];
    }
    return q;
  }

  void learn(const DecomposedTransition& t) override {
    bank_.update_all({0, position(t.s), t.a.index, position(t.s_next)});
  }

  const GvfBank& bank() const { return bank_; }

  void save(bin::Sections& sections) const override {
    std::ostringstream os(std::ios::binary);
    write_bank(os, bank_);
    sections["GVFS"] = os.str();
  }

  void load(const bin::Sections& sections) override {
    std::istringstream is(section(sections, "GVFS"), std::ios::binary);
    bank_ = read_bank(is);
  }

 private:
  GvfBank bank_;
};

}  // namespace

std::unique_ptr<FruitAgent> make_fruit_agent(const FruitAgentConfig& config, std::uint64_t seed) {
  switch (config.method) {
    case FruitMethod::hra_plus2:
      return std::make_unique<TabularFruitAgent>(config);
    case FruitMethod::hra_plus3:
      return std::make_unique<GvfFruitAgent>(config);
    default:
      return std::make_unique<NetFruitAgent>(config, seed);
  }
}

}  // namespace hra
