#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "eigenopt/grid_world.hpp"
#include "eigenopt/options.hpp"

namespace eigenopt {

/// What the random walker may pick in each state: the four primitives plus
/// every option initiable there, each with its cached rollout.
///
/// With `count_pass_through` an option rollout that visits the goal midway is
/// cut at its first visit; otherwise only its end state counts as arrival.
/// Keeps a reference to `env`.
class DiffusionSpec {
 public:
  DiffusionSpec(const GridWorld& env, std::span<const Option> options,
                bool count_pass_through = true);
  DiffusionSpec(GridWorld&&, std::span<const Option>, bool = true) = delete;

  const GridWorld& env() const noexcept { return *env_; }
  std::size_t num_options() const noexcept { return num_options_; }
  bool count_pass_through() const noexcept { return count_pass_through_; }

  /// Number of choices available in s (4 primitives + initiable options).
  std::size_t num_choices(State s) const { return 4 + rollouts_.at(s).size(); }
  /// Cached option rollouts from s, in option order.
  const std::vector<OptionTrajectory>& rollouts(State s) const { return rollouts_.at(s); }

  struct Outcome {
    std::size_t duration;
    State end;
  };
  /// Duration and end state of a rollout once truncated for `goal`.
  Outcome truncate(const OptionTrajectory& t, State goal) const;

 private:
  const GridWorld* env_;
  std::size_t num_options_;
  bool count_pass_through_;
  std::vector<std::vector<OptionTrajectory>> rollouts_;
};

/// Expected primitive steps to reach g, averaged over all ordered pairs
/// s != g, from per-goal linear solves. The parallel variant distributes goals
/// over OpenMP threads; both produce bit-identical results.
double diffusion_time(const DiffusionSpec& spec);
double diffusion_time_serial(const DiffusionSpec& spec);

/// Expected steps from every state to `goal` (0 at the goal).
std::vector<double> hitting_times(const DiffusionSpec& spec, State goal);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t walks = 0;
  std::size_t capped = 0;  // walks stopped at the cap, recorded as `cap` steps
};

/// Simulated version of diffusion_time: uniform (start, goal) pairs with
/// start != goal, per-walk seeds derived from `seed`.
MonteCarloEstimate diffusion_time_mc(const DiffusionSpec& spec, std::size_t walks,
                                     std::size_t cap, std::uint64_t seed);
MonteCarloEstimate diffusion_time_mc_serial(const DiffusionSpec& spec, std::size_t walks,
                                            std::size_t cap, std::uint64_t seed);

struct SweepRow {
  std::size_t option_count = 0;
  double diffusion_time = 0.0;
  double mc_estimate = 0.0;  // NaN when no walks were requested
  double mc_stderr = 0.0;
};

struct SweepConfig {
  std::size_t max_options = 64;
  std::size_t mc_walks = 0;
  std::size_t mc_cap = 100'000'000;
  std::uint64_t seed = 0;
  bool count_pass_through = true;
};

/// Diffusion time for the option prefixes of size 0, 2, 4, ..., max_options.
std::vector<SweepRow> diffusion_sweep(const GridWorld& env, std::span<const Option> ordered_options,
                                      const SweepConfig& config);

}  // namespace eigenopt
