#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "eigenopt/grid_world.hpp"
#include "eigenopt/options.hpp"

namespace eigenopt {

/// Tabular Q-learning task: reward 0 per step, +1 on entering `goal`.
struct LearnConfig {
  double alpha = 0.1;
  double gamma = 0.9;
  std::size_t episodes = 500;
  std::size_t episode_len = 100;  // primitive steps
  std::size_t trials = 100;
  State start = 0;
  State goal = 0;

  /// Throws PreconditionError on out-of-range parameters or states.
  void validate(const GridWorld& env) const;
};

using PrimitiveQ = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kNumPrimitiveActions),
                                 Eigen::RowMajor>;

/// Per-episode greedy returns averaged over trials.
struct LearningCurve {
  std::vector<double> mean_return;
  std::vector<double> std_error;
  std::vector<std::uint64_t> seeds;                // one per trial
  std::vector<std::vector<double>> trial_returns;  // [trial][episode]

  std::size_t episodes() const noexcept { return mean_return.size(); }
  /// Sum of each trial's per-episode returns.
  std::vector<double> trial_areas() const;
};

/// Discounted return gamma^(t-1) of the greedy policy of q from cfg.start,
/// where t is the step that enters the goal; 0 if it is not reached within
/// episode_len steps. Ties go to the first action in enum order.
double greedy_return(const GridWorld& env, const PrimitiveQ& q, const LearnConfig& cfg);

/// One trial: Q over primitive actions, uniform behaviour over primitives and
/// initiable options, one-step Q-learning update on every primitive transition
/// (including those taken inside options). Returns the greedy return after
/// each episode. Throws InvariantError if a Q-value leaves [0, 1].
std::vector<double> q_learning_trial(const GridWorld& env, std::span<const Option> options,
                                     const LearnConfig& cfg, std::uint64_t seed);

/// cfg.trials independent trials with seeds derive_seed(seed, trial). The
/// parallel variant runs trials on OpenMP threads; results are identical.
LearningCurve q_learning_with_options(const GridWorld& env, std::span<const Option> options,
                                      const LearnConfig& cfg, std::uint64_t seed);
LearningCurve q_learning_with_options_serial(const GridWorld& env,
                                             std::span<const Option> options,
                                             const LearnConfig& cfg, std::uint64_t seed);

/// One curve per option count (prefixes of `ordered_options`), all sharing
/// the same per-trial seeds. Counts must be even.
std::vector<LearningCurve> option_count_sweep(const GridWorld& env,
                                              std::span<const Option> ordered_options,
                                              const LearnConfig& cfg,
                                              std::span<const std::size_t> counts,
                                              std::uint64_t seed);

struct Task {
  State start = 0;
  State goal = 0;
};

struct TaskResult {
  Task task;
  LearningCurve eigenoptions;
  LearningCurve primitives;
  LearningCurve bottleneck;
};

/// Evaluates one fixed option set on several (start, goal) tasks against
/// primitives-only and bottleneck-option agents, with shared seeds.
std::vector<TaskResult> multitask_eval(const GridWorld& env, std::span<const Option> eigenoptions,
                                       std::span<const Option> bottleneck,
                                       std::span<const Task> tasks, const LearnConfig& cfg,
                                       std::uint64_t seed);

/// Paired comparison of curve areas, a minus b, trial by trial.
struct PairedComparison {
  std::size_t wins = 0;  // trials where area(a) > area(b)
  std::size_t trials = 0;
  double mean_difference = 0.0;
  double std_error = 0.0;
};
PairedComparison compare_paired(const LearningCurve& a, const LearningCurve& b);

/// Number of episodes until the mean return first reaches fraction * its
/// final value (1-based), or nullopt when the final value is 0.
std::optional<std::size_t> episodes_to_fraction(const LearningCurve& curve, double fraction);

/// `orderings` independent random permutations of all states, used as
/// subgoal orders for the random-option baseline.
std::vector<std::vector<State>> random_subgoal_orderings(const GridWorld& env,
                                                         std::size_t orderings,
                                                         std::uint64_t seed);

}  // namespace eigenopt
