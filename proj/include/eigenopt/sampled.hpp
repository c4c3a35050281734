#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "eigenopt/features.hpp"
#include "eigenopt/grid_world.hpp"
#include "eigenopt/spectral.hpp"
#include "eigenopt/symmetric_matrix.hpp"

namespace eigenopt {

/// Deduplicated observation differences phi(s') - phi(s). Rows are unique
/// under exact equality and never all-zero.
class IncidenceMatrix {
 public:
  explicit IncidenceMatrix(std::size_t feature_dim) : feature_dim_(feature_dim) {}

  /// Inserts the row unless it is zero or already present. Returns whether it
  /// was inserted. Throws PreconditionError on a length mismatch.
  bool add(std::span<const double> row);

  /// Adds every row of `other` (same dedupe rule) and sorts rows lexicographically.
  void merge(const IncidenceMatrix& other);
  /// Sorts rows lexicographically; the row set is unchanged.
  void canonicalize();

  /// A uniform random subset of at most `cap` rows, in canonical order.
  IncidenceMatrix subsample(std::size_t cap, std::uint64_t seed) const;

  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t num_rows() const noexcept { return rows_.size(); }
  const std::vector<std::vector<double>>& rows() const noexcept { return rows_; }
  Eigen::MatrixXd to_dense() const;

  friend bool operator==(const IncidenceMatrix& a, const IncidenceMatrix& b) {
    return a.feature_dim_ == b.feature_dim_ && a.rows_ == b.rows_;
  }

 private:
  std::size_t feature_dim_;
  std::vector<std::vector<double>> rows_;
  std::set<std::vector<double>> index_;
};

enum class SamplingMode { kRandomWalk, kExhaustive };

struct SamplingConfig {
  SamplingMode mode = SamplingMode::kRandomWalk;
  std::size_t budget = 10000;  // primitive steps (random walk only)
  std::uint64_t seed = 0;
};

/// Random walk under uniform primitive actions from a uniformly drawn start,
/// or (exhaustive) every (s, a) with s' != s exactly once in state/action order.
IncidenceMatrix collect_transitions(const GridWorld& g, const FeatureMap& f,
                                    const SamplingConfig& config);

/// Right singular vectors of T as eigenvectors of T^T T, both signs, ordered
/// by ascending singular value (descending when asked). eigenvalue holds the
/// singular value.
std::vector<Eigenpurpose> svd_eigenpurposes(const IncidenceMatrix& t, std::size_t k,
                                            bool descending = false);

/// Symmetric T^T T, exactly symmetric by construction.
SymmetricMatrix gram(const Eigen::MatrixXd& t);

/// max |(T^T T - 2 L)_ij|. Throws PreconditionError if T's width differs from L.
double gram_laplacian_residual(const Eigen::MatrixXd& t, const SymmetricMatrix& l);

struct SubspaceCheck {
  double eigenvalue = 0.0;  // of L
  std::size_t first = 0;    // index range into the ascending spectrum
  std::size_t last = 0;
  double max_angle = 0.0;   // radians
  double value_gap = 0.0;   // |sigma^2 / 2 - lambda| over the group
};

/// Compares every eigenspace of the combinatorial Laplacian of g with the
/// matching right-singular subspace of the exhaustive tabular incidence matrix.
std::vector<SubspaceCheck> compare_laplacian_and_svd(const GridWorld& g);

/// One-step (gamma = 0) option action: argmax over primitives of the intrinsic
/// reward of the move, terminate when none exceeds kValueTolerance.
Action greedy_option_action(const GridWorld& g, const FeatureMap& f, const Eigenpurpose& e,
                            State s);

/// Follows greedy_option_action from s until it terminates or `cap` steps pass.
std::vector<State> greedy_option_path(const GridWorld& g, const FeatureMap& f,
                                      const Eigenpurpose& e, State s, std::size_t cap);

}  // namespace eigenopt
