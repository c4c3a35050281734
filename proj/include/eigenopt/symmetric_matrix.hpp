#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace eigenopt {

/// Dense n x n matrix that is symmetric by construction: every write goes to
/// both (i, j) and (j, i), so entries match exactly rather than to a tolerance.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : data_(Eigen::MatrixXd::Zero(n, n)) {}

  /// Throws PreconditionError unless `m` is square and exactly symmetric.
  static SymmetricMatrix from_dense(const Eigen::MatrixXd& m);

  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return data_(i, j); }

  void set(std::size_t i, std::size_t j, double value) {
    data_(i, j) = value;
    data_(j, i) = value;
  }
  void add(std::size_t i, std::size_t j, double value) {
    data_(i, j) += value;
    if (i != j) data_(j, i) += value;
  }

  const Eigen::MatrixXd& dense() const noexcept { return data_; }

 private:
  Eigen::MatrixXd data_;
};

}  // namespace eigenopt
