#include "eigenopt/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eigenopt/errors.hpp"
#include "eigenopt/rng.hpp"
#include "eigenopt/summation.hpp"
#include "parallel.hpp"

namespace eigenopt {

namespace {

Action greedy_action(const PrimitiveQ& q, State s) {
  const auto row = static_cast<Eigen::Index>(s);
  std::size_t best = 0;
  for (std::size_t a = 1; a < kNumPrimitiveActions; ++a) {
    if (q(row, static_cast<Eigen::Index>(a)) > q(row, static_cast<Eigen::Index>(best))) best = a;
  }
  return kPrimitiveActions[best];
}

struct Learner {
  const GridWorld& env;
  const LearnConfig& cfg;
  PrimitiveQ q;

  // One-step Q-learning update for (s, a) -> next.
  void update(State s, Action a, State next) {
    const bool at_goal = next == cfg.goal;
    const double reward = at_goal ? 1.0 : 0.0;
    const double bootstrap = at_goal ? 0.0 : q.row(static_cast<Eigen::Index>(next)).maxCoeff();
    double& entry = q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(action_index(a)));
    entry += cfg.alpha * (reward + cfg.gamma * bootstrap - entry);
    if (!(entry >= 0.0 && entry <= 1.0)) {
      throw InvariantError("q_learning_trial: Q(" + std::to_string(s) + ", " +
                           std::string(action_name(a)) + ") = " + std::to_string(entry) +
                           " left [0, 1]");
    }
  }
};

std::vector<std::vector<std::size_t>> initiable_options(const GridWorld& env,
                                                        std::span<const Option> options) {
  std::vector<std::vector<std::size_t>> out(env.num_states());
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (options[i].policy.size() != env.num_states()) {
      throw PreconditionError("q_learning: option " + options[i].label + " built for a different world");
    }
    for (State s = 0; s < env.num_states(); ++s) {
      if (options[i].initiable(s)) out[s].push_back(i);
    }
  }
  return out;
}

LearningCurve aggregate(std::vector<std::vector<double>> trial_returns,
                        std::vector<std::uint64_t> seeds, std::size_t episodes) {
  LearningCurve curve;
  curve.mean_return.resize(episodes);
  curve.std_error.resize(episodes);
  const std::size_t trials = trial_returns.size();
  std::vector<double> column(trials);
  for (std::size_t e = 0; e < episodes; ++e) {
    for (std::size_t t = 0; t < trials; ++t) column[t] = trial_returns[t][e];
    const double mean = compensated_sum(column) / static_cast<double>(trials);
    curve.mean_return[e] = mean;
    if (trials > 1) {
      for (auto& x : column) x = (x - mean) * (x - mean);
      const double var = compensated_sum(column) / static_cast<double>(trials - 1);
      curve.std_error[e] = std::sqrt(var / static_cast<double>(trials));
    } else {
      curve.std_error[e] = 0.0;
    }
  }
  curve.seeds = std::move(seeds);
  curve.trial_returns = std::move(trial_returns);
  return curve;
}

std::vector<std::uint64_t> trial_seeds(std::size_t trials, std::uint64_t seed) {
  std::vector<std::uint64_t> seeds(trials);
  for (std::size_t t = 0; t < trials; ++t) seeds[t] = derive_seed(seed, t);
  return seeds;
}

}  // namespace

void LearnConfig::validate(const GridWorld& env) const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("learn: alpha must be in (0, 1]");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw PreconditionError("learn: gamma must be in [0, 1)");
  if (episode_len < 1) throw PreconditionError("learn: episode_len must be >= 1");
  if (episodes < 1) throw PreconditionError("learn: episodes must be >= 1");
  if (trials < 1) throw PreconditionError("learn: trials must be >= 1");
  if (start >= env.num_states() || goal >= env.num_states()) {
    throw PreconditionError("learn: start or goal state out of range");
  }
  if (start == goal) throw PreconditionError("learn: start and goal must differ");
}

std::vector<double> LearningCurve::trial_areas() const {
  std::vector<double> areas;
  areas.reserve(trial_returns.size());
  for (const auto& returns : trial_returns) areas.push_back(compensated_sum(returns));
  return areas;
}

double greedy_return(const GridWorld& env, const PrimitiveQ& q, const LearnConfig& cfg) {
  State s = cfg.start;
  double discount = 1.0;
  for (std::size_t t = 0; t < cfg.episode_len; ++t) {
    s = env.step(s, greedy_action(q, s));
    if (s == cfg.goal) return discount;
    discount *= cfg.gamma;
  }
  return 0.0;
}

std::vector<double> q_learning_trial(const GridWorld& env, std::span<const Option> options,
                                     const LearnConfig& cfg, std::uint64_t seed) {
  cfg.validate(env);
  const auto available = initiable_options(env, options);
  Learner learner{env, cfg, PrimitiveQ::Zero(static_cast<Eigen::Index>(env.num_states()),
                                             kNumPrimitiveActions)};
  std::mt19937_64 rng(seed);
  std::vector<double> returns;
  returns.reserve(cfg.episodes);

  for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
    State s = cfg.start;
    std::size_t steps = 0;
    while (steps < cfg.episode_len && s != cfg.goal) {
      const auto& here = available[s];
      const std::size_t choice =
          std::uniform_int_distribution<std::size_t>(0, kNumPrimitiveActions + here.size() - 1)(rng);
      if (choice < kNumPrimitiveActions) {
        const Action a = kPrimitiveActions[choice];
        const State next = env.step(s, a);
        learner.update(s, a, next);
        s = next;
        ++steps;
        continue;
      }
      const Option& o = options[here[choice - kNumPrimitiveActions]];
      while (steps < cfg.episode_len) {
        const Action a = o.policy[s];
        if (a == Action::kTerminate) break;
        const State next = env.step(s, a);
        learner.update(s, a, next);
        s = next;
        ++steps;
        if (s == cfg.goal || o.terminates_in(s)) break;
      }
    }
    returns.push_back(greedy_return(env, learner.q, cfg));
  }
  return returns;
}

LearningCurve q_learning_with_options(const GridWorld& env, std::span<const Option> options,
                                      const LearnConfig& cfg, std::uint64_t seed) {
  cfg.validate(env);
  auto seeds = trial_seeds(cfg.trials, seed);
  std::vector<std::vector<double>> returns(cfg.trials);
  detail::parallel_for(cfg.trials, [&](std::size_t t) {
    returns[t] = q_learning_trial(env, options, cfg, seeds[t]);
  });
  return aggregate(std::move(returns), std::move(seeds), cfg.episodes);
}

LearningCurve q_learning_with_options_serial(const GridWorld& env,
                                             std::span<const Option> options,
                                             const LearnConfig& cfg, std::uint64_t seed) {
  cfg.validate(env);
  auto seeds = trial_seeds(cfg.trials, seed);
  std::vector<std::vector<double>> returns(cfg.trials);
  for (std::size_t t = 0; t < cfg.trials; ++t) {
    returns[t] = q_learning_trial(env, options, cfg, seeds[t]);
  }
  return aggregate(std::move(returns), std::move(seeds), cfg.episodes);
}

std::vector<LearningCurve> option_count_sweep(const GridWorld& env,
                                              std::span<const Option> ordered_options,
                                              const LearnConfig& cfg,
                                              std::span<const std::size_t> counts,
                                              std::uint64_t seed) {
  std::vector<LearningCurve> curves;
  for (std::size_t count : counts) {
    if (count % 2 != 0) throw PreconditionError("option_count_sweep: counts must be even");
    if (count > ordered_options.size()) {
      throw PreconditionError("option_count_sweep: count " + std::to_string(count) + " exceeds the " +
                              std::to_string(ordered_options.size()) + " options supplied");
    }
    curves.push_back(q_learning_with_options(env, ordered_options.first(count), cfg, seed));
  }
  return curves;
}

std::vector<TaskResult> multitask_eval(const GridWorld& env, std::span<const Option> eigenoptions,
                                       std::span<const Option> bottleneck,
                                       std::span<const Task> tasks, const LearnConfig& cfg,
                                       std::uint64_t seed) {
  if (tasks.empty()) throw PreconditionError("multitask_eval: no tasks");
  std::vector<TaskResult> out;
  for (const Task& task : tasks) {
    LearnConfig c = cfg;
    c.start = task.start;
    c.goal = task.goal;
    TaskResult r;
    r.task = task;
    r.eigenoptions = q_learning_with_options(env, eigenoptions, c, seed);
    r.primitives = q_learning_with_options(env, {}, c, seed);
    r.bottleneck = q_learning_with_options(env, bottleneck, c, seed);
    out.push_back(std::move(r));
  }
  return out;
}

PairedComparison compare_paired(const LearningCurve& a, const LearningCurve& b) {
  const auto area_a = a.trial_areas();
  const auto area_b = b.trial_areas();
  if (area_a.size() != area_b.size() || area_a.empty()) {
    throw PreconditionError("compare_paired: curves need the same nonzero number of trials");
  }
  PairedComparison out;
  out.trials = area_a.size();
  std::vector<double> diff(out.trials);
  for (std::size_t t = 0; t < out.trials; ++t) {
    diff[t] = area_a[t] - area_b[t];
    if (diff[t] > 0.0) ++out.wins;
  }
  const double n = static_cast<double>(out.trials);
  out.mean_difference = compensated_sum(diff) / n;
  if (out.trials > 1) {
    for (auto& d : diff) d = (d - out.mean_difference) * (d - out.mean_difference);
    out.std_error = std::sqrt(compensated_sum(diff) / (n - 1.0) / n);
  }
  return out;
}

std::optional<std::size_t> episodes_to_fraction(const LearningCurve& curve, double fraction) {
  if (curve.mean_return.empty()) return std::nullopt;
  const double target = fraction * curve.mean_return.back();
  if (curve.mean_return.back() <= 0.0) return std::nullopt;
  for (std::size_t e = 0; e < curve.mean_return.size(); ++e) {
    if (curve.mean_return[e] >= target) return e + 1;
  }
  return std::nullopt;
}

std::vector<std::vector<State>> random_subgoal_orderings(const GridWorld& env,
                                                         std::size_t orderings,
                                                         std::uint64_t seed) {
  std::vector<std::vector<State>> out(orderings);
  for (std::size_t i = 0; i < orderings; ++i) {
    out[i].resize(env.num_states());
    std::iota(out[i].begin(), out[i].end(), State{0});
    std::mt19937_64 rng(derive_seed(seed, i));
    std::shuffle(out[i].begin(), out[i].end(), rng);
  }
  return out;
}

}  // namespace eigenopt
