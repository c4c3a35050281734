#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "eigenopt/grid_world.hpp"
#include "eigenopt/symmetric_matrix.hpp"

namespace eigenopt {

enum class LaplacianKind { kCombinatorial, kNormalized };

struct GraphOptions {
  /// Count each wall-bump action as a self-loop on the diagonal of A.
  bool self_loops = false;
};

inline constexpr double kDefaultEigenTolerance = 1e-10;
inline constexpr double kDegeneracyTolerance = 1e-8;

/// Unweighted adjacency of the transition graph: A(i, j) = 1 iff some action
/// moves i to j != i.
SymmetricMatrix build_graph(const GridWorld& g, GraphOptions options = {});

/// Combinatorial L = D - A or normalized D^-1/2 (D - A) D^-1/2.
SymmetricMatrix laplacian(const SymmetricMatrix& adjacency, LaplacianKind kind);

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // column k pairs with values[k]
  std::size_t sweeps = 0;
  double max_residual = 0.0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Eigenvalues come out ascending. Each eigenvector is flipped so its first
/// component with magnitude above 1e-12 is positive. Inside a group of
/// eigenvalues that chain within kDegeneracyTolerance, vectors are ordered
/// lexicographically (largest first); the group's values stay paired with
/// their vectors, so ascending order only holds up to that tolerance there.
/// Throws NumericalError if the sweep cap (100 n) is hit or a residual
/// |M v - lambda v|_inf exceeds tol * max(1, max|M_ij|).
EigenDecomposition eig_sym(const SymmetricMatrix& m, double tol = kDefaultEigenTolerance);

/// Half-open index ranges of eigenvalues (ascending input) whose consecutive
/// gaps are all <= tol.
std::vector<std::pair<std::size_t, std::size_t>> eigenvalue_groups(
    const Eigen::VectorXd& ascending, double tol = kDegeneracyTolerance);

/// Largest principal angle (radians) between span(U) and span(V); both must
/// have orthonormal columns and the same shape.
double max_principal_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

enum class PurposeSource { kLaplacian, kSvd };

/// Direction whose intrinsic reward is e^T (phi(s') - phi(s)).
struct Eigenpurpose {
  Eigen::VectorXd vector;
  double eigenvalue = 0.0;  // singular value when source == kSvd
  int sign = 1;
  PurposeSource source = PurposeSource::kLaplacian;
  std::size_t rank = 1;  // 1-based position in the chosen order
};

/// Emits +v, -v for each of the first k columns of `dec` (or the last k,
/// walking down, when `descending`).
std::vector<Eigenpurpose> purposes_from_decomposition(const EigenDecomposition& dec,
                                                      std::size_t k, PurposeSource source,
                                                      bool descending = false);

/// The k smoothest proto-value functions of g, both signs: 2k purposes ordered
/// (rank 1 +, rank 1 -, rank 2 +, ...).
std::vector<Eigenpurpose> pvf_sequence(const GridWorld& g, LaplacianKind kind, std::size_t k,
                                       GraphOptions options = {});

}  // namespace eigenopt
