#pragma once

// Exact solvers for small enumerable MDPs with decomposed rewards: linear
// and iterative policy evaluation, value iteration, and the checks relating
// per-component values to whole-reward values.

#include <array>
#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hra/fruit.hpp"
#include "hra/maze.hpp"

namespace hra {

struct Outcome {
  std::size_t next = 0;
  double prob = 0.0;
  std::vector<double> rewards;  // one per component
};

/// P and the component rewards stored as sparse outcome lists per (s, a).
/// Terminal states have no outcomes and value 0.
class EnumeratedMdp {
 public:
  EnumeratedMdp(std::size_t states, std::size_t actions, std::size_t components);

  std::size_t state_count() const { return states_; }
  std::size_t action_count() const { return actions_; }
  std::size_t component_count() const { return components_; }

  void add_outcome(std::size_t s, std::size_t a, std::size_t next, double prob, std::vector<double> rewards);
  void set_terminal(std::size_t s, bool terminal = true);
  bool terminal(std::size_t s) const { return terminal_[s]; }
  std::span<const Outcome> outcomes(std::size_t s, std::size_t a) const { return outcomes_[s * actions_ + a]; }

  /// Throws InvalidArgument unless every non-terminal row sums to 1 within 1e-12.
  void validate() const;

 private:
  std::size_t states_;
  std::size_t actions_;
  std::size_t components_;
  std::vector<std::vector<Outcome>> outcomes_;
  std::vector<bool> terminal_;
};

/// Which reward a solver uses: one component, or their sum (the env reward).
struct RewardSelector {
  std::optional<std::size_t> component;

  static RewardSelector env() { return {}; }
  static RewardSelector only(std::size_t k) { return {k}; }
  double of(const Outcome& o) const;
};

struct QTable {
  std::size_t states = 0;
  std::size_t actions = 0;
  std::vector<double> q;

  QTable() = default;
  QTable(std::size_t s, std::size_t a) : states(s), actions(a), q(s * a, 0.0) {}
  double& at(std::size_t s, std::size_t a) { return q[s * actions + a]; }
  double at(std::size_t s, std::size_t a) const { return q[s * actions + a]; }
  std::span<const double> row(std::size_t s) const { return {q.data() + s * actions, actions}; }
};

double max_abs_difference(const QTable& a, const QTable& b);
QTable operator+(const QTable& a, const QTable& b);

/// Row-stochastic policy matrix, states x actions.
using PolicyMatrix = std::vector<double>;

PolicyMatrix uniform_policy(const EnumeratedMdp& mdp);
/// Deterministic lowest-index greedy policy of q.
PolicyMatrix greedy_policy(const QTable& q);
/// Expands a PolicySpec against q (q is ignored for the uniform policy).
PolicyMatrix policy_matrix(const PolicySpec& spec, const QTable& q);

/// Solves the evaluation equations with a sparse LU factorisation. Throws
/// NoFixedPoint when the system is singular (gamma == 1 without proper
/// termination).
QTable policy_eval_exact(const EnumeratedMdp& mdp, const PolicyMatrix& pi, double gamma,
                         RewardSelector reward = RewardSelector::env());
QTable policy_eval_exact(const EnumeratedMdp& mdp, const PolicySpec& policy, double gamma,
                         RewardSelector reward = RewardSelector::env());

/// Jacobi sweeps until the sup-norm change drops below tol.
QTable policy_eval_iterative(const EnumeratedMdp& mdp, const PolicyMatrix& pi, double gamma, double tol,
                             RewardSelector reward = RewardSelector::env(), std::size_t max_sweeps = 1'000'000);
QTable policy_eval_iterative_serial(const EnumeratedMdp& mdp, const PolicyMatrix& pi, double gamma, double tol,
                                    RewardSelector reward = RewardSelector::env(),
                                    std::size_t max_sweeps = 1'000'000);

/// Returns Q with sup-norm Bellman residual < tol. Throws NoFixedPoint when
/// max_sweeps is exhausted.
QTable value_iteration(const EnumeratedMdp& mdp, double gamma, double tol,
                       RewardSelector reward = RewardSelector::env(), std::size_t max_sweeps = 1'000'000);
QTable value_iteration_serial(const EnumeratedMdp& mdp, double gamma, double tol,
                              RewardSelector reward = RewardSelector::env(), std::size_t max_sweeps = 1'000'000);

/// Sup-norm Bellman optimality residual of q.
double bellman_residual(const EnumeratedMdp& mdp, const QTable& q, double gamma,
                        RewardSelector reward = RewardSelector::env());

/// max |sum_k Q^u_k - Q^u_env| under the uniform random policy.
double verify_upsilon_identity(const EnumeratedMdp& mdp, double gamma);

struct OptimalDecompositionGap {
  double sup_norm = 0.0;             // max |sum_k Q*_k - Q*_env|
  std::size_t differing_states = 0;  // non-terminal states whose greedy actions differ
};
OptimalDecompositionGap optimal_decomposition_gap(const EnumeratedMdp& mdp, double gamma, double tol = 1e-12);

struct RandomMdpParams {
  std::size_t max_states = 20;
  std::size_t max_actions = 4;
  std::size_t max_components = 5;
  std::size_t min_components = 2;
};

/// Seeded random decomposed MDP: dense transition rows with Dirichlet(1)
/// weights, env rewards uniform in [-1,1] split across components by
/// Dirichlet(1) fractions.
EnumeratedMdp random_mdp(std::uint64_t seed, const RandomMdpParams& params = {});

/// Two components whose optimal actions pull apart: state 0 chooses between
/// a state paying 1 to either component (action 0) and a state paying 0.8 to
/// both (action 1).
EnumeratedMdp constructed_inconsistent_mdp();

/// Joint (position x remaining fruit subset) MDP for one fruit placement.
/// State = position + 100 * mask over `active` (bit i = active[i] remains).
/// With step_cost the single component pays -1 per step; otherwise component
/// k pays +1 for eating the fruit of slot k.
struct FruitJointMdp {
  EnumeratedMdp mdp;
  std::vector<std::size_t> active;  // slot indices
  std::size_t state_of(Cell agent, std::uint32_t mask) const {
    return cell_index(agent) + kFruitCells * static_cast<std::size_t>(mask);
  }
};
FruitJointMdp fruit_joint_mdp(const FruitLayout& layout, std::span<const std::size_t> active_slots, bool step_cost);

/// Fewest steps to eat every fruit of a placement from `start`, by value
/// iteration on the step-cost joint MDP.
std::size_t fruit_optimal_steps(const FruitLayout& layout, std::span<const std::size_t> active_slots, Cell start);

/// Player-vs-static-target sub-MDP of a maze: states are (cell, orientation)
/// as in MazeWorld, pseudo-reward 1 on entering the target, whose states are
/// terminal.
EnumeratedMdp maze_target_mdp(const Maze& maze, Cell target, std::size_t action_count = kMazeActions);

}  // namespace hra
