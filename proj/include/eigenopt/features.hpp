#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "eigenopt/grid_world.hpp"

namespace eigenopt {

enum class FeatureKind { kTabular, kCoordinateSynthetic };

/// State -> feature vector table.
///
/// Tabular maps are one-hot over states. The coordinate-synthetic map is
/// (row / (height-1), col / (width-1), wall_up, wall_down, wall_right,
/// wall_left): a small non-tabular representation where distinct cells never
/// collide.
class FeatureMap {
 public:
  static FeatureMap tabular(const GridWorld& g);
  static FeatureMap coordinate_synthetic(const GridWorld& g);

  FeatureKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t num_states() const noexcept { return num_states_; }

  std::span<const double> operator()(State s) const;
  Eigen::VectorXd vector(State s) const;

 private:
  FeatureMap(FeatureKind kind, std::size_t num_states, std::size_t dim);

  FeatureKind kind_;
  std::size_t num_states_;
  std::size_t dim_;
  std::vector<double> table_;  // row-major, num_states x dim
};

Eigen::VectorXd features(const GridWorld& g, const FeatureMap& f, State s);

}  // namespace eigenopt
