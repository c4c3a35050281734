#include "eigenopt/features.hpp"

#include <algorithm>

#include "eigenopt/errors.hpp"

namespace eigenopt {

FeatureMap::FeatureMap(FeatureKind kind, std::size_t num_states, std::size_t dim)
    : kind_(kind), num_states_(num_states), dim_(dim), table_(num_states * dim, 0.0) {}

FeatureMap FeatureMap::tabular(const GridWorld& g) {
  const std::size_t n = g.num_states();
  FeatureMap f(FeatureKind::kTabular, n, n);
  for (State s = 0; s < n; ++s) f.table_[s * n + s] = 1.0;
  return f;
}

FeatureMap FeatureMap::coordinate_synthetic(const GridWorld& g) {
  constexpr std::size_t kDim = 6;
  FeatureMap f(FeatureKind::kCoordinateSynthetic, g.num_states(), kDim);
  const double row_scale = std::max(1, g.height() - 1);
  const double col_scale = std::max(1, g.width() - 1);
  for (State s = 0; s < g.num_states(); ++s) {
    const Cell c = g.cell(s);
    double* row = &f.table_[s * kDim];
    row[0] = c.row / row_scale;
    row[1] = c.col / col_scale;
    for (std::size_t a = 0; a < kNumPrimitiveActions; ++a) {
      row[2 + a] = g.step(s, kPrimitiveActions[a]) == s ? 1.0 : 0.0;
    }
  }
  return f;
}

std::span<const double> FeatureMap::operator()(State s) const {
  if (s >= num_states_) throw PreconditionError("feature lookup: state out of range");
  return {table_.data() + s * dim_, dim_};
}

Eigen::VectorXd FeatureMap::vector(State s) const {
  const auto row = (*this)(s);
  return Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size()));
}

Eigen::VectorXd features(const GridWorld& g, const FeatureMap& f, State s) {
  if (s >= g.num_states() || f.num_states() != g.num_states()) {
    throw PreconditionError("features: state or feature map does not match the world");
  }
  return f.vector(s);
}

}  // namespace eigenopt
