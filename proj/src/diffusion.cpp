#include "eigenopt/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/LU>

#include "eigenopt/errors.hpp"
#include "eigenopt/rng.hpp"
#include "eigenopt/summation.hpp"
#include "parallel.hpp"

namespace eigenopt {

namespace {

constexpr double kSolveResidualTolerance = 1e-8;

double mean_over_sources(const DiffusionSpec& spec, State goal) {
  auto v = hitting_times(spec, goal);
  v.erase(v.begin() + static_cast<std::ptrdiff_t>(goal));
  return compensated_sum(v) / static_cast<double>(v.size());
}

double average_goals(const std::vector<double>& per_goal) {
  return compensated_sum(per_goal) / static_cast<double>(per_goal.size());
}

double simulate_walk(const DiffusionSpec& spec, std::size_t cap, std::uint64_t seed, bool& capped) {
  const GridWorld& g = spec.env();
  std::mt19937_64 rng(seed);
  const std::size_t n = g.num_states();
  const State start = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  State goal = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
  if (goal >= start) ++goal;

  std::size_t steps = 0;
  State s = start;
  capped = false;
  while (s != goal) {
    if (steps >= cap) {
      capped = true;
      return static_cast<double>(cap);
    }
    const std::size_t c = std::uniform_int_distribution<std::size_t>(0, spec.num_choices(s) - 1)(rng);
    if (c < kNumPrimitiveActions) {
      s = g.step(s, kPrimitiveActions[c]);
      ++steps;
    } else {
      const auto outcome = spec.truncate(spec.rollouts(s)[c - kNumPrimitiveActions], goal);
      s = outcome.end;
      steps += outcome.duration;
    }
  }
  return static_cast<double>(std::min(steps, cap));
}

MonteCarloEstimate summarize(const std::vector<double>& samples, std::size_t capped) {
  MonteCarloEstimate out;
  out.walks = samples.size();
  out.capped = capped;
  const double count = static_cast<double>(samples.size());
  out.mean = compensated_sum(samples) / count;
  if (samples.size() > 1) {
    std::vector<double> sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const double d = samples[i] - out.mean;
      sq[i] = d * d;
    }
    out.std_error = std::sqrt(compensated_sum(sq) / (count - 1.0) / count);
  }
  return out;
}

void check_mc_args(const DiffusionSpec& spec, std::size_t walks, std::size_t cap) {
  if (walks < 1) throw PreconditionError("diffusion_time_mc: walks must be >= 1");
  if (cap < 1) throw PreconditionError("diffusion_time_mc: cap must be >= 1");
  if (spec.env().num_states() < 2) throw PreconditionError("diffusion_time_mc: need at least 2 states");
}

}  // namespace

DiffusionSpec::DiffusionSpec(const GridWorld& env, std::span<const Option> options,
                             bool count_pass_through)
    : env_(&env),
      num_options_(options.size()),
      count_pass_through_(count_pass_through),
      rollouts_(env.num_states()) {
  for (const auto& o : options) {
    if (o.policy.size() != env.num_states()) {
      throw PreconditionError("DiffusionSpec: option " + o.label + " built for a different world");
    }
    for (State s = 0; s < env.num_states(); ++s) {
      if (!o.initiable(s)) continue;
      auto t = option_trajectory(env, o, s);
      if (t.hit_cap) {
        throw PreconditionError("DiffusionSpec: option " + o.label + " does not terminate from state " +
                                std::to_string(s));
      }
      rollouts_[s].push_back(std::move(t));
    }
  }
}

DiffusionSpec::Outcome DiffusionSpec::truncate(const OptionTrajectory& t, State goal) const {
  if (count_pass_through_) {
    for (std::size_t i = 1; i < t.visited.size(); ++i) {
      if (t.visited[i] == goal) return {i, goal};
    }
  }
  return {t.duration, t.end};
}

std::vector<double> hitting_times(const DiffusionSpec& spec, State goal) {
  const GridWorld& g = spec.env();
  const std::size_t n = g.num_states();
  if (goal >= n) throw PreconditionError("hitting_times: goal out of range");

  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(dim, dim);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(dim);
  for (State s = 0; s < n; ++s) {
    if (s == goal) continue;
    const auto row = static_cast<Eigen::Index>(s);
    const double p = 1.0 / static_cast<double>(spec.num_choices(s));
    auto add_choice = [&](std::size_t duration, State end) {
      b[row] += p * static_cast<double>(duration);
      if (end != goal) a(row, static_cast<Eigen::Index>(end)) -= p;
    };
    for (Action act : kPrimitiveActions) add_choice(1, g.step(s, act));
    for (const auto& t : spec.rollouts(s)) {
      const auto outcome = spec.truncate(t, goal);
      add_choice(outcome.duration, outcome.end);
    }
  }

  const Eigen::VectorXd v = a.partialPivLu().solve(b);
  const double scale = std::max(1.0, v.cwiseAbs().maxCoeff());
  const double residual = (a * v - b).cwiseAbs().maxCoeff() / scale;
  if (!std::isfinite(residual) || residual > kSolveResidualTolerance) {
    throw NumericalError("hitting_times: linear solve failed for goal " + std::to_string(goal),
                         residual);
  }
  return {v.data(), v.data() + v.size()};
}

double diffusion_time(const DiffusionSpec& spec) {
  const std::size_t n = spec.env().num_states();
  if (n < 2) throw PreconditionError("diffusion_time: need at least 2 states");
  std::vector<double> per_goal(n);
  detail::parallel_for(n, [&](std::size_t goal) { per_goal[goal] = mean_over_sources(spec, goal); });
  return average_goals(per_goal);
}

double diffusion_time_serial(const DiffusionSpec& spec) {
  const std::size_t n = spec.env().num_states();
  if (n < 2) throw PreconditionError("diffusion_time: need at least 2 states");
  std::vector<double> per_goal(n);
  for (State goal = 0; goal < n; ++goal) per_goal[goal] = mean_over_sources(spec, goal);
  return average_goals(per_goal);
}

MonteCarloEstimate diffusion_time_mc(const DiffusionSpec& spec, std::size_t walks,
                                     std::size_t cap, std::uint64_t seed) {
  check_mc_args(spec, walks, cap);
  std::vector<double> samples(walks);
  std::vector<unsigned char> capped(walks, 0);
  detail::parallel_for(walks, [&](std::size_t w) {
    bool hit = false;
    samples[w] = simulate_walk(spec, cap, derive_seed(seed, w), hit);
    capped[w] = hit ? 1 : 0;
  });
  return summarize(samples, static_cast<std::size_t>(std::count(capped.begin(), capped.end(), 1)));
}

MonteCarloEstimate diffusion_time_mc_serial(const DiffusionSpec& spec, std::size_t walks,
                                            std::size_t cap, std::uint64_t seed) {
  check_mc_args(spec, walks, cap);
  std::vector<double> samples(walks);
  std::size_t capped = 0;
  for (std::size_t w = 0; w < walks; ++w) {
    bool hit = false;
    samples[w] = simulate_walk(spec, cap, derive_seed(seed, w), hit);
    capped += hit ? 1 : 0;
  }
  return summarize(samples, capped);
}

std::vector<SweepRow> diffusion_sweep(const GridWorld& env, std::span<const Option> ordered_options,
                                      const SweepConfig& config) {
  if (config.max_options > ordered_options.size()) {
    throw PreconditionError("diffusion_sweep: max_options " + std::to_string(config.max_options) +
                            " exceeds the " + std::to_string(ordered_options.size()) +
                            " options supplied");
  }
  std::vector<SweepRow> rows;
  for (std::size_t count = 0; count <= config.max_options; count += 2) {
    const DiffusionSpec spec(env, ordered_options.first(count), config.count_pass_through);
    SweepRow row;
    row.option_count = count;
    row.diffusion_time = diffusion_time(spec);
    row.mc_estimate = std::numeric_limits<double>::quiet_NaN();
    row.mc_stderr = std::numeric_limits<double>::quiet_NaN();
    if (config.mc_walks > 0) {
      const auto mc = diffusion_time_mc(spec, config.mc_walks, config.mc_cap, derive_seed(config.seed, count));
      row.mc_estimate = mc.mean;
      row.mc_stderr = mc.std_error;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace eigenopt
