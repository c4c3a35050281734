#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "eigenopt/features.hpp"
#include "eigenopt/grid_world.hpp"
#include "eigenopt/spectral.hpp"

namespace eigenopt {

/// q-values at or below this count as "no positive return": the terminate
/// action wins and the state drops out of the initiation set.
inline constexpr double kValueTolerance = 1e-10;
/// Primitive actions whose q-values are this close count as tied.
inline constexpr double kTieTolerance = 1e-12;
inline constexpr double kDefaultOptionGamma = 0.9;
inline constexpr std::size_t kNumAugmentedActions = kNumPrimitiveActions + 1;

/// e^T (phi(s') - phi(s)). Throws PreconditionError on length mismatch.
double eigenpurpose_reward(std::span<const double> e, std::span<const double> phi_s,
                           std::span<const double> phi_next);

/// Temporally extended action <I, pi, T> over a GridWorld's states.
struct Option {
  std::string label;
  std::vector<Action> policy;  // kTerminate wherever the option does not move
  std::vector<bool> initiation;
  std::vector<bool> termination;

  bool initiable(State s) const { return initiation.at(s); }
  bool terminates_in(State s) const { return termination.at(s) || policy.at(s) == Action::kTerminate; }
  std::size_t initiation_size() const;
};

/// Rows are states, columns up/down/right/left/terminate; the last column is 0.
using QTable = Eigen::Matrix<double, Eigen::Dynamic, static_cast<int>(kNumAugmentedActions),
                             Eigen::RowMajor>;

/// The intrinsic-reward MDP of one purpose: same states and dynamics as the
/// base world, actions extended with terminate. Keeps a reference to `env`.
class AugmentedMdp {
 public:
  AugmentedMdp(const GridWorld& env, const FeatureMap& features, Eigenpurpose purpose,
               double gamma);
  AugmentedMdp(GridWorld&&, const FeatureMap&, Eigenpurpose, double) = delete;

  const GridWorld& env() const noexcept { return *env_; }
  const Eigenpurpose& purpose() const noexcept { return purpose_; }
  double gamma() const noexcept { return gamma_; }
  std::size_t num_states() const noexcept { return env_->num_states(); }

  double reward(State s, Action a) const;

 private:
  const GridWorld* env_;
  Eigenpurpose purpose_;
  double gamma_;
  std::vector<std::array<double, kNumPrimitiveActions>> rewards_;
};

struct SolveStats {
  std::size_t iterations = 0;
  double bellman_residual = 0.0;
};

/// Optimal q of the augmented MDP by policy iteration with exact (LU) policy
/// evaluation. q(s, terminate) is pinned to 0. Throws NumericalError if the
/// Bellman residual of the result exceeds tol.
QTable solve_eigenbehavior(const AugmentedMdp& m, double tol = 1e-10, SolveStats* stats = nullptr);

/// max over (s, a) of |q(s,a) - (r(s,a) + gamma max_b q(s',b))|, a primitive.
double bellman_residual(const AugmentedMdp& m, const QTable& q);

/// argmax over primitives then terminate, first action in enum order winning
/// ties; terminate whenever no primitive exceeds kValueTolerance.
Action greedy_augmented_action(const QTable& q, State s);

struct Eigenoption {
  Eigenpurpose purpose;
  double gamma = kDefaultOptionGamma;
  QTable q;
  Option option;
};

/// Derives policy, initiation and termination from q. Throws InvariantError if
/// the termination set comes out empty.
Eigenoption build_eigenoption(const AugmentedMdp& m, QTable q);

/// Solves and builds one eigenoption per purpose. The parallel variant spreads
/// purposes over OpenMP threads; both return identical results.
std::vector<Eigenoption> discover_eigenoptions(const GridWorld& g, const FeatureMap& f,
                                               std::span<const Eigenpurpose> purposes,
                                               double gamma = kDefaultOptionGamma);
std::vector<Eigenoption> discover_eigenoptions_serial(const GridWorld& g, const FeatureMap& f,
                                                      std::span<const Eigenpurpose> purposes,
                                                      double gamma = kDefaultOptionGamma);

/// The first `count` options of `eigenoptions` as plain Options.
std::vector<Option> option_prefix(std::span<const Eigenoption> eigenoptions, std::size_t count);

struct OptionTrajectory {
  State start = 0;
  std::vector<State> visited;  // visited.front() == start
  std::size_t duration = 0;    // primitive steps, visited.size() - 1
  State end = 0;
  bool hit_cap = false;
  bool absorbed = false;
};

/// Rolls the option's policy out from s until it terminates, `absorb` is
/// entered, or `cap` primitive steps elapse (cap 0 selects 10 |S|). Throws
/// PreconditionError when s is not in the initiation set.
OptionTrajectory option_trajectory(const GridWorld& g, const Option& o, State s,
                                   std::optional<State> absorb = std::nullopt,
                                   std::size_t cap = 0);

/// Mean rollout duration over the option's initiation set, each start equally
/// likely; 0 when the option is never initiable.
double mean_option_duration(const GridWorld& g, const Option& o);

/// One option per room of the canonical 4-room layout, each walking the
/// shortest path to the room's nearest doorway. Throws PreconditionError for
/// any other layout.
std::vector<Option> bottleneck_options(const GridWorld& g);

/// Shortest-path option to `goal`, initiable everywhere except the goal.
Option random_subgoal_option(const GridWorld& g, State goal);

}  // namespace eigenopt
