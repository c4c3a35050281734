#include "eigenopt/options.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <set>

#include <Eigen/LU>

#include "eigenopt/errors.hpp"
#include "eigenopt/summation.hpp"
#include "parallel.hpp"

namespace eigenopt {

namespace {

Eigen::VectorXd evaluate_policy(const AugmentedMdp& m, const std::vector<Action>& policy) {
  const auto n = static_cast<Eigen::Index>(m.num_states());
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  for (State s = 0; s < m.num_states(); ++s) {
    const Action act = policy[s];
    if (act == Action::kTerminate) continue;
    const State t = m.env().step(s, act);
    a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) -= m.gamma();
    b[static_cast<Eigen::Index>(s)] = m.reward(s, act);
  }
  return a.partialPivLu().solve(b);
}

QTable q_from_values(const AugmentedMdp& m, const Eigen::VectorXd& v) {
  QTable q = QTable::Zero(static_cast<Eigen::Index>(m.num_states()), kNumAugmentedActions);
  for (State s = 0; s < m.num_states(); ++s) {
    for (Action a : kPrimitiveActions) {
      const State t = m.env().step(s, a);
      q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(action_index(a))) =
          m.reward(s, a) + m.gamma() * v[static_cast<Eigen::Index>(t)];
    }
  }
  return q;
}

// Saturating |A u {terminate}|^|S|.
std::size_t policy_count_bound(std::size_t num_states) {
  std::size_t bound = 1;
  for (std::size_t i = 0; i < num_states; ++i) {
    if (bound > std::numeric_limits<std::size_t>::max() / kNumAugmentedActions) {
      return std::numeric_limits<std::size_t>::max();
    }
    bound *= kNumAugmentedActions;
  }
  return bound;
}

}  // namespace

double eigenpurpose_reward(std::span<const double> e, std::span<const double> phi_s,
                           std::span<const double> phi_next) {
  if (e.size() != phi_s.size() || e.size() != phi_next.size()) {
    throw PreconditionError("eigenpurpose_reward: dimension mismatch");
  }
  double r = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double d = phi_next[i] - phi_s[i];
    if (d != 0.0) r += e[i] * d;
  }
  return r;
}

std::size_t Option::initiation_size() const {
  return static_cast<std::size_t>(std::count(initiation.begin(), initiation.end(), true));
}

AugmentedMdp::AugmentedMdp(const GridWorld& env, const FeatureMap& features, Eigenpurpose purpose,
                           double gamma)
    : env_(&env), purpose_(std::move(purpose)), gamma_(gamma) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw PreconditionError("AugmentedMdp: gamma must be in [0, 1)");
  if (features.num_states() != env.num_states()) {
    throw PreconditionError("AugmentedMdp: feature map built for a different world");
  }
  if (static_cast<std::size_t>(purpose_.vector.size()) != features.dim()) {
    throw PreconditionError("AugmentedMdp: purpose length differs from feature dimension");
  }
  const std::span<const double> e(purpose_.vector.data(), features.dim());
  rewards_.resize(env.num_states());
  for (State s = 0; s < env.num_states(); ++s) {
    for (Action a : kPrimitiveActions) {
      rewards_[s][action_index(a)] = eigenpurpose_reward(e, features(s), features(env.step(s, a)));
    }
  }
}

double AugmentedMdp::reward(State s, Action a) const {
  if (a == Action::kTerminate) return 0.0;
  return rewards_.at(s)[action_index(a)];
}

Action greedy_augmented_action(const QTable& q, State s) {
  const auto row = static_cast<Eigen::Index>(s);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < kNumPrimitiveActions; ++a) {
    best = std::max(best, q(row, static_cast<Eigen::Index>(a)));
  }
  if (best <= kValueTolerance) return Action::kTerminate;
  for (Action a : kPrimitiveActions) {
    if (q(row, static_cast<Eigen::Index>(action_index(a))) >= best - kTieTolerance) return a;
  }
  return Action::kTerminate;
}

double bellman_residual(const AugmentedMdp& m, const QTable& q) {
  double worst = 0.0;
  for (State s = 0; s < m.num_states(); ++s) {
    for (Action a : kPrimitiveActions) {
      const State t = m.env().step(s, a);
      const double next_value = q.row(static_cast<Eigen::Index>(t)).maxCoeff();
      const double target = m.reward(s, a) + m.gamma() * next_value;
      worst = std::max(worst, std::abs(q(static_cast<Eigen::Index>(s),
                                         static_cast<Eigen::Index>(action_index(a))) -
                                       target));
    }
  }
  return worst;
}

QTable solve_eigenbehavior(const AugmentedMdp& m, double tol, SolveStats* stats) {
  const std::size_t n = m.num_states();
  std::vector<Action> policy(n, Action::kTerminate);
  const std::size_t max_iterations = policy_count_bound(n);

  QTable q;
  std::size_t iteration = 0;
  while (true) {
    if (iteration++ >= max_iterations) {
      throw InvariantError("solve_eigenbehavior: policy iteration exceeded the policy count");
    }
    q = q_from_values(m, evaluate_policy(m, policy));
    bool changed = false;
    for (State s = 0; s < n; ++s) {
      const Action candidate = greedy_augmented_action(q, s);
      const auto row = static_cast<Eigen::Index>(s);
      const double current = q(row, static_cast<Eigen::Index>(action_index(policy[s])));
      const double proposed = q(row, static_cast<Eigen::Index>(action_index(candidate)));
      if (proposed > current + kTieTolerance) {
        policy[s] = candidate;
        changed = true;
      }
    }
    if (!changed) break;
  }

  const double residual = bellman_residual(m, q);
  if (stats) {
    stats->iterations = iteration;
    stats->bellman_residual = residual;
  }
  if (residual > tol) {
    throw NumericalError("solve_eigenbehavior: Bellman residual above tolerance", residual);
  }
  return q;
}

Eigenoption build_eigenoption(const AugmentedMdp& m, QTable q) {
  const std::size_t n = m.num_states();
  Eigenoption out;
  out.purpose = m.purpose();
  out.gamma = m.gamma();
  out.option.label = "eigenoption-r" + std::to_string(m.purpose().rank) +
                     (m.purpose().sign > 0 ? "+" : "-");
  out.option.policy.resize(n);
  out.option.initiation.assign(n, false);
  out.option.termination.assign(n, false);
  bool any_terminal = false;
  for (State s = 0; s < n; ++s) {
    const Action a = greedy_augmented_action(q, s);
    out.option.policy[s] = a;
    out.option.initiation[s] = a != Action::kTerminate;
    out.option.termination[s] = a == Action::kTerminate;
    any_terminal = any_terminal || a == Action::kTerminate;
  }
  if (!any_terminal) {
    throw InvariantError("build_eigenoption: empty termination set for " + out.option.label);
  }
  out.q = std::move(q);
  return out;
}

std::vector<Eigenoption> discover_eigenoptions(const GridWorld& g, const FeatureMap& f,
                                               std::span<const Eigenpurpose> purposes,
                                               double gamma) {
  std::vector<Eigenoption> out(purposes.size());
  detail::parallel_for(purposes.size(), [&](std::size_t i) {
    const AugmentedMdp m(g, f, purposes[i], gamma);
    out[i] = build_eigenoption(m, solve_eigenbehavior(m));
  });
  return out;
}

std::vector<Eigenoption> discover_eigenoptions_serial(const GridWorld& g, const FeatureMap& f,
                                                      std::span<const Eigenpurpose> purposes,
                                                      double gamma) {
  std::vector<Eigenoption> out;
  out.reserve(purposes.size());
  for (const auto& purpose : purposes) {
    const AugmentedMdp m(g, f, purpose, gamma);
    out.push_back(build_eigenoption(m, solve_eigenbehavior(m)));
  }
  return out;
}

std::vector<Option> option_prefix(std::span<const Eigenoption> eigenoptions, std::size_t count) {
  if (count > eigenoptions.size()) {
    throw PreconditionError("option_prefix: asked for " + std::to_string(count) + " of " +
                            std::to_string(eigenoptions.size()) + " options");
  }
  std::vector<Option> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(eigenoptions[i].option);
  return out;
}

OptionTrajectory option_trajectory(const GridWorld& g, const Option& o, State s,
                                   std::optional<State> absorb, std::size_t cap) {
  if (s >= g.num_states() || !o.initiable(s)) {
    throw PreconditionError("option_trajectory: state " + std::to_string(s) +
                            " is not in the initiation set of " + o.label);
  }
  if (cap == 0) cap = 10 * g.num_states();

  OptionTrajectory t;
  t.start = s;
  t.visited.push_back(s);
  State cur = s;
  while (true) {
    if (t.duration > 0 && o.terminates_in(cur)) break;
    const Action a = o.policy[cur];
    if (a == Action::kTerminate) break;
    if (t.duration == cap) {
      t.hit_cap = true;
      break;
    }
    cur = g.step(cur, a);
    t.visited.push_back(cur);
    ++t.duration;
    if (absorb && cur == *absorb) {
      t.absorbed = true;
      break;
    }
  }
  t.end = cur;
  return t;
}

double mean_option_duration(const GridWorld& g, const Option& o) {
  std::vector<double> durations;
  for (State s = 0; s < g.num_states(); ++s) {
    if (o.initiable(s)) durations.push_back(static_cast<double>(option_trajectory(g, o, s).duration));
  }
  if (durations.empty()) return 0.0;
  return compensated_sum(durations) / static_cast<double>(durations.size());
}

std::vector<Option> bottleneck_options(const GridWorld& g) {
  const std::size_t n = g.num_states();
  const auto doors = doorway_states(g);
  const auto labels = room_labels(g);
  const int rooms = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  if (doors.size() != 4 || rooms != 4) {
    throw PreconditionError("bottleneck_options: expected the 4-room layout (4 rooms, 4 doorways), found " +
                            std::to_string(rooms) + " rooms and " + std::to_string(doors.size()) +
                            " doorways");
  }

  std::vector<std::vector<State>> room_doors(4);
  for (State d : doors) {
    std::set<int> adjacent;
    for (Action a : kPrimitiveActions) {
      const int l = labels[g.step(d, a)];
      if (l >= 0) adjacent.insert(l);
    }
    if (adjacent.size() != 2) {
      throw PreconditionError("bottleneck_options: doorway does not join two rooms");
    }
    for (int r : adjacent) room_doors[static_cast<std::size_t>(r)].push_back(d);
  }

  std::vector<Option> out;
  for (int room = 0; room < 4; ++room) {
    const auto& targets = room_doors[static_cast<std::size_t>(room)];
    if (targets.size() != 2) {
      throw PreconditionError("bottleneck_options: every room needs exactly two doorways");
    }
    auto inside = [&](State s, State door) { return labels[s] == room || s == door; };

    std::vector<std::vector<std::size_t>> dist;
    for (State door : targets) {
      std::vector<std::size_t> d(n, kUnreachable);
      std::deque<State> queue{door};
      d[door] = 0;
      while (!queue.empty()) {
        const State s = queue.front();
        queue.pop_front();
        for (Action a : kPrimitiveActions) {
          const State t = g.step(s, a);
          if (inside(t, door) && d[t] == kUnreachable) {
            d[t] = d[s] + 1;
            queue.push_back(t);
          }
        }
      }
      dist.push_back(std::move(d));
    }

    Option o;
    o.label = "bottleneck-room" + std::to_string(room + 1);
    o.policy.assign(n, Action::kTerminate);
    o.initiation.assign(n, false);
    o.termination.assign(n, false);
    for (State door : targets) o.termination[door] = true;
    for (State s = 0; s < n; ++s) {
      if (labels[s] != room) continue;
      std::size_t pick = 0;
      for (std::size_t k = 1; k < targets.size(); ++k) {
        if (dist[k][s] < dist[pick][s]) pick = k;
      }
      const auto& d = dist[pick];
      for (Action a : kPrimitiveActions) {
        const State t = g.step(s, a);
        if (inside(t, targets[pick]) && d[t] + 1 == d[s]) {
          o.policy[s] = a;
          break;
        }
      }
      o.initiation[s] = true;
    }
    out.push_back(std::move(o));
  }
  return out;
}

Option random_subgoal_option(const GridWorld& g, State goal) {
  const std::size_t n = g.num_states();
  if (goal >= n) throw PreconditionError("random_subgoal_option: goal out of range");
  const auto dist = bfs_distances(g, goal);
  Option o;
  o.label = "subgoal-" + std::to_string(goal);
  o.policy.assign(n, Action::kTerminate);
  o.initiation.assign(n, true);
  o.termination.assign(n, false);
  o.initiation[goal] = false;
  o.termination[goal] = true;
  for (State s = 0; s < n; ++s) {
    if (s == goal) continue;
    for (Action a : kPrimitiveActions) {
      if (dist[g.step(s, a)] + 1 == dist[s]) {
        o.policy[s] = a;
        break;
      }
    }
  }
  return o;
}

}  // namespace eigenopt
