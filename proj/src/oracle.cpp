#include "hra/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>

#include "hra/errors.hpp"
#include "hra/rng.hpp"

namespace hra {

EnumeratedMdp::EnumeratedMdp(std::size_t states, std::size_t actions, std::size_t components)
    : states_(states), actions_(actions), components_(components), outcomes_(states * actions), terminal_(states, false) {
  if (states == 0 || actions == 0 || components == 0) throw InvalidArgument("MDP dimensions must be positive");
}

void EnumeratedMdp::add_outcome(std::size_t s, std::size_t a, std::size_t next, double prob,
                                std::vector<double> rewards) {
  if (s >= states_ || next >= states_ || a >= actions_) throw InvalidArgument("outcome index out of range");
  if (rewards.size() != components_) throw InvalidArgument("outcome needs one reward per component");
  if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidArgument("outcome probability outside [0,1]");
  outcomes_[s * actions_ + a].push_back({next, prob, std::move(rewards)});
}

void EnumeratedMdp::set_terminal(std::size_t s, bool terminal) { terminal_.at(s) = terminal; }

void EnumeratedMdp::validate() const {
  for (std::size_t s = 0; s < states_; ++s) {
    if (terminal_[s]) continue;
    for (std::size_t a = 0; a < actions_; ++a) {
      double total = 0.0;
      for (const Outcome& o : outcomes(s, a)) total += o.prob;
      if (std::abs(total - 1.0) > 1e-12)
        throw InvalidArgument("transition row (" + std::to_string(s) + "," + std::to_string(a) + ") sums to " +
                              std::to_string(total));
    }
  }
}

double RewardSelector::of(const Outcome& o) const {
  if (component) return o.rewards.at(*component);
  double sum = 0.0;
  for (double r : o.rewards) sum += r;
  return sum;
}

double max_abs_difference(const QTable& a, const QTable& b) {
  if (a.q.size() != b.q.size()) throw InvalidArgument("Q tables differ in shape");
  double d = 0.0;
  for (std::size_t i = 0; i < a.q.size(); ++i) d = std::max(d, std::abs(a.q[i] - b.q[i]));
  return d;
}

QTable operator+(const QTable& a, const QTable& b) {
  if (a.q.size() != b.q.size()) throw InvalidArgument("Q tables differ in shape");
  QTable out = a;
  for (std::size_t i = 0; i < out.q.size(); ++i) out.q[i] += b.q[i];
  return out;
}

PolicyMatrix uniform_policy(const EnumeratedMdp& mdp) {
  return PolicyMatrix(mdp.state_count() * mdp.action_count(), 1.0 / static_cast<double>(mdp.action_count()));
}

PolicyMatrix greedy_policy(const QTable& q) {
  PolicyMatrix pi(q.q.size(), 0.0);
  for (std::size_t s = 0; s < q.states; ++s) pi[s * q.actions + argmax(q.row(s))] = 1.0;
  return pi;
}

PolicyMatrix policy_matrix(const PolicySpec& spec, const QTable& q) {
  PolicyMatrix pi(q.q.size(), 0.0);
  for (std::size_t s = 0; s < q.states; ++s) {
    const auto p = spec.probabilities(q.row(s));
    std::copy(p.begin(), p.end(), pi.begin() + static_cast<std::ptrdiff_t>(s * q.actions));
  }
  return pi;
}

namespace {

void check_policy(const EnumeratedMdp& mdp, const PolicyMatrix& pi) {
  if (pi.size() != mdp.state_count() * mdp.action_count()) throw InvalidArgument("policy matrix has the wrong shape");
}

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidArgument("gamma must lie in [0,1]");
}

/// Expected one-step backup of (s, a) given next-state values v.
double backup(const EnumeratedMdp& mdp, std::size_t s, std::size_t a, const std::vector<double>& v, double gamma,
              const RewardSelector& reward) {
  double q = 0.0;
  for (const Outcome& o : mdp.outcomes(s, a)) q += o.prob * (reward.of(o) + gamma * v[o.next]);
  return q;
}

enum class Reduce { policy, max };

/// State values of q: sum_a pi(s,a) q(s,a) or max_a q(s,a); 0 for terminals.
void state_values(const EnumeratedMdp& mdp, const QTable& q, const PolicyMatrix* pi, Reduce how,
                  std::vector<double>& v, bool parallel) {
  const auto S = static_cast<std::ptrdiff_t>(mdp.state_count());
  const std::size_t A = mdp.action_count();
#pragma omp parallel for schedule(static) if (parallel)
  for (std::ptrdiff_t si = 0; si < S; ++si) {
    const auto s = static_cast<std::size_t>(si);
    if (mdp.terminal(s)) {
      v[s] = 0.0;
      continue;
    }
    if (how == Reduce::max) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < A; ++a) best = std::max(best, q.at(s, a));
      v[s] = best;
    } else {
      double sum = 0.0;
      for (std::size_t a = 0; a < A; ++a) sum += (*pi)[s * A + a] * q.at(s, a);
      v[s] = sum;
    }
  }
}

/// Jacobi sweeps of q <- T q; returns once the sup-norm change is below tol.
QTable sweep_until(const EnumeratedMdp& mdp, const PolicyMatrix* pi, Reduce how, double gamma, double tol,
                   const RewardSelector& reward, std::size_t max_sweeps, bool parallel) {
  check_gamma(gamma);
  if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
  const std::size_t S = mdp.state_count();
  const std::size_t A = mdp.action_count();
  QTable q(S, A);
  QTable next(S, A);
  std::vector<double> v(S, 0.0);
  for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
    state_values(mdp, q, pi, how, v, parallel);
    double change = 0.0;
    const auto n = static_cast<std::ptrdiff_t>(S);
#pragma omp parallel for schedule(static) reduction(max : change) if (parallel)
    for (std::ptrdiff_t si = 0; si < n; ++si) {
      const auto s = static_cast<std::size_t>(si);
      for (std::size_t a = 0; a < A; ++a) {
        const double x = mdp.terminal(s) ? 0.0 : backup(mdp, s, a, v, gamma, reward);
        change = std::max(change, std::abs(x - q.at(s, a)));
        next.at(s, a) = x;
      }
    }
    std::swap(q, next);
    if (!std::isfinite(change)) break;
    if (change < tol) return q;
  }
  throw NoFixedPoint("no convergence within " + std::to_string(max_sweeps) + " sweeps");
}

}  // namespace

QTable policy_eval_exact(const EnumeratedMdp& mdp, const PolicyMatrix& pi, double gamma, RewardSelector reward) {
  check_gamma(gamma);
  check_policy(mdp, pi);
  const std::size_t S = mdp.state_count();
  const std::size_t A = mdp.action_count();
  const auto n = static_cast<Eigen::Index>(S * A);

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      const auto row = static_cast<Eigen::Index>(s * A + a);
      triplets.emplace_back(row, row, 1.0);
      if (mdp.terminal(s)) continue;
      for (const Outcome& o : mdp.outcomes(s, a)) {
        rhs[row] += o.prob * reward.of(o);
        if (mdp.terminal(o.next)) continue;
        for (std::size_t b = 0; b < A; ++b) {
          const double w = gamma * o.prob * pi[o.next * A + b];
          if (w != 0.0) triplets.emplace_back(row, static_cast<Eigen::Index>(o.next * A + b), -w);
        }
      }
    }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(m);
  if (lu.info() != Eigen::Success) throw NoFixedPoint("evaluation system is singular");
  Eigen::VectorXd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw NoFixedPoint("evaluation system has no unique solution");
  // One refinement step keeps the residual near machine precision.
  const Eigen::VectorXd r = rhs - m * x;
  x += lu.solve(r);
  const double residual = (rhs - m * x).cwiseAbs().maxCoeff();
  if (!std::isfinite(residual) || residual > 1e-9 * std::max(1.0, x.cwiseAbs().maxCoeff()))
    throw NoFixedPoint("evaluation system is ill-posed");

  QTable q(S, A);
  for (Eigen::Index i = 0; i < n; ++i) q.q[static_cast<std::size_t>(i)] = x[i];
  return q;
}

QTable policy_eval_exact(const EnumeratedMdp& mdp, const PolicySpec& policy, double gamma, RewardSelector reward) {
  if (policy.kind == PolicyKind::uniform_random) return policy_eval_exact(mdp, uniform_policy(mdp), gamma, reward);
  throw InvalidArgument("value-dependent policies need a policy matrix; use policy_matrix()");
}

QTable policy_eval_iterative(const EnumeratedMdp& mdp, const PolicyMatrix& pi, double gamma, double tol,
                             RewardSelector reward, std::size_t max_sweeps) {
  check_policy(mdp, pi);
  return sweep_until(mdp, &pi, Reduce::policy, gamma, tol, reward, max_sweeps, true);
}

QTable policy_eval_iterative_serial(const EnumeratedMdp& mdp, const PolicyMatrix& pi, double gamma, double tol,
                                    RewardSelector reward, std::size_t max_sweeps) {
  check_policy(mdp, pi);
  return sweep_until(mdp, &pi, Reduce::policy, gamma, tol, reward, max_sweeps, false);
}

QTable value_iteration(const EnumeratedMdp& mdp, double gamma, double tol, RewardSelector reward,
                       std::size_t max_sweeps) {
  return sweep_until(mdp, nullptr, Reduce::max, gamma, tol, reward, max_sweeps, true);
}

QTable value_iteration_serial(const EnumeratedMdp& mdp, double gamma, double tol, RewardSelector reward,
                              std::size_t max_sweeps) {
  return sweep_until(mdp, nullptr, Reduce::max, gamma, tol, reward, max_sweeps, false);
}

double bellman_residual(const EnumeratedMdp& mdp, const QTable& q, double gamma, RewardSelector reward) {
  std::vector<double> v(mdp.state_count());
  state_values(mdp, q, nullptr, Reduce::max, v, false);
  double worst = 0.0;
  for (std::size_t s = 0; s < mdp.state_count(); ++s)
    for (std::size_t a = 0; a < mdp.action_count(); ++a) {
      const double x = mdp.terminal(s) ? 0.0 : backup(mdp, s, a, v, gamma, reward);
      worst = std::max(worst, std::abs(x - q.at(s, a)));
    }
  return worst;
}

double verify_upsilon_identity(const EnumeratedMdp& mdp, double gamma) {
  const PolicyMatrix pi = uniform_policy(mdp);
  const QTable env = policy_eval_exact(mdp, pi, gamma, RewardSelector::env());
  QTable sum(mdp.state_count(), mdp.action_count());
  for (std::size_t k = 0; k < mdp.component_count(); ++k)
    sum = sum + policy_eval_exact(mdp, pi, gamma, RewardSelector::only(k));
  return max_abs_difference(sum, env);
}

OptimalDecompositionGap optimal_decomposition_gap(const EnumeratedMdp& mdp, double gamma, double tol) {
  const QTable env = value_iteration(mdp, gamma, tol, RewardSelector::env());
  QTable sum(mdp.state_count(), mdp.action_count());
  for (std::size_t k = 0; k < mdp.component_count(); ++k)
    sum = sum + value_iteration(mdp, gamma, tol, RewardSelector::only(k));
  OptimalDecompositionGap gap;
  gap.sup_norm = max_abs_difference(sum, env);
  for (std::size_t s = 0; s < mdp.state_count(); ++s)
    if (!mdp.terminal(s) && argmax(sum.row(s)) != argmax(env.row(s))) ++gap.differing_states;
  return gap;
}

EnumeratedMdp random_mdp(std::uint64_t seed, const RandomMdpParams& params) {
  if (params.max_states < 1 || params.max_actions < 1 || params.min_components < 1 ||
      params.max_components < params.min_components)
    throw InvalidArgument("invalid random MDP parameters");
  Rng rng(seed);
  const std::size_t S = 1 + rng.below(params.max_states);
  const std::size_t A = 1 + rng.below(params.max_actions);
  const std::size_t n =
      params.min_components + rng.below(params.max_components - params.min_components + 1);
  EnumeratedMdp mdp(S, A, n);

  auto dirichlet = [&](std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (double& x : w) {
      x = -std::log(1.0 - rng.uniform());
      total += x;
    }
    for (double& x : w) x /= total;
    return w;
  };

  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < A; ++a) {
      std::vector<double> p = dirichlet(S);
      // Exact normalisation: the last outcome absorbs the rounding error.
      double head = 0.0;
      for (std::size_t i = 0; i + 1 < S; ++i) head += p[i];
      p[S - 1] = 1.0 - head;
      for (std::size_t next = 0; next < S; ++next) {
        const double r = rng.uniform(-1.0, 1.0);
        const std::vector<double> split = dirichlet(n);
        std::vector<double> rewards(n);
        for (std::size_t k = 0; k < n; ++k) rewards[k] = r * split[k];
        mdp.add_outcome(s, a, next, std::max(p[next], 0.0), std::move(rewards));
      }
    }
  return mdp;
}

EnumeratedMdp constructed_inconsistent_mdp() {
  // 0: choice, 1: split reward, 2: shared reward, 3: terminal
  EnumeratedMdp mdp(4, 2, 2);
  mdp.add_outcome(0, 0, 1, 1.0, {0.0, 0.0});
  mdp.add_outcome(0, 1, 2, 1.0, {0.0, 0.0});
  mdp.add_outcome(1, 0, 3, 1.0, {1.0, 0.0});
  mdp.add_outcome(1, 1, 3, 1.0, {0.0, 1.0});
  mdp.add_outcome(2, 0, 3, 1.0, {0.8, 0.8});
  mdp.add_outcome(2, 1, 3, 1.0, {0.8, 0.8});
  mdp.set_terminal(3);
  return mdp;
}

FruitJointMdp fruit_joint_mdp(const FruitLayout& layout, std::span<const std::size_t> active_slots, bool step_cost) {
  const std::size_t m = active_slots.size();
  if (m == 0 || m > kFruitSlots) throw InvalidArgument("fruit placement needs 1..10 active slots");
  for (std::size_t i = 0; i < m; ++i) {
    if (active_slots[i] >= kFruitSlots) throw InvalidArgument("fruit slot out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (active_slots[i] == active_slots[j]) throw InvalidArgument("duplicate fruit slot");
  }
  const std::size_t masks = std::size_t{1} << m;
  const std::size_t components = step_cost ? 1 : kFruitSlots;
  FruitJointMdp out{EnumeratedMdp(kFruitCells * masks, kCompassActions, components),
                    std::vector<std::size_t>(active_slots.begin(), active_slots.end())};

  for (std::uint32_t mask = 0; mask < masks; ++mask)
    for (std::size_t pos = 0; pos < kFruitCells; ++pos) {
      const Cell at = cell_at(pos);
      const std::size_t s = out.state_of(at, mask);
      if (mask == 0) {
        out.mdp.set_terminal(s);
        continue;
      }
      for (std::size_t a = 0; a < kCompassActions; ++a) {
        Cell next = moved(at, static_cast<Direction>(a));
        if (next.row < 0 || next.row >= kFruitGridSize || next.col < 0 || next.col >= kFruitGridSize) next = at;
        std::uint32_t next_mask = mask;
        std::vector<double> rewards(components, 0.0);
        for (std::size_t i = 0; i < m; ++i)
          if ((mask >> i & 1u) && layout[active_slots[i]] == next) {
            next_mask &= ~(1u << i);
            if (!step_cost) rewards[active_slots[i]] = 1.0;
          }
        if (step_cost) rewards[0] = -1.0;
        out.mdp.add_outcome(s, a, out.state_of(next, next_mask), 1.0, std::move(rewards));
      }
    }
  return out;
}

std::size_t fruit_optimal_steps(const FruitLayout& layout, std::span<const std::size_t> active_slots, Cell start) {
  const FruitJointMdp joint = fruit_joint_mdp(layout, active_slots, true);
  std::uint32_t mask = (1u << active_slots.size()) - 1;
  for (std::size_t i = 0; i < active_slots.size(); ++i)
    if (layout[active_slots[i]] == start) mask &= ~(1u << i);
  const QTable q = value_iteration(joint.mdp, 1.0, 0.5);
  const std::size_t s = joint.state_of(start, mask);
  if (joint.mdp.terminal(s)) return 0;
  const auto row = q.row(s);
  return static_cast<std::size_t>(std::llround(-*std::max_element(row.begin(), row.end())));
}

EnumeratedMdp maze_target_mdp(const Maze& maze, Cell target, std::size_t action_count) {
  if (action_count != kCompassActions && action_count != kMazeActions)
    throw InvalidArgument("maze sub-MDP supports 4 or 5 actions");
  const int target_index = maze.corridor_index(target);
  if (target_index == Maze::kWall) throw InvalidArgument("target is not a corridor cell");
  const std::size_t cells = maze.corridor_count();
  EnumeratedMdp mdp(cells * 4, action_count, 1);
  for (std::size_t c = 0; c < cells; ++c)
    for (std::size_t o = 0; o < 4; ++o) {
      const std::size_t s = c * 4 + o;
      if (c == static_cast<std::size_t>(target_index)) {
        mdp.set_terminal(s);
        continue;
      }
      for (std::size_t a = 0; a < action_count; ++a) {
        std::size_t next = s;
        if (a < kCompassActions && maze.open(c, static_cast<Direction>(a))) next = maze.neighbor(c, static_cast<Direction>(a)) * 4 + a;
        const bool reached = next / 4 == static_cast<std::size_t>(target_index);
        mdp.add_outcome(s, a, next, 1.0, {reached ? 1.0 : 0.0});
      }
    }
  return mdp;
}

}  // namespace hra
