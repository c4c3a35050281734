#include "eigenopt/sampled.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "eigenopt/errors.hpp"
#include "eigenopt/options.hpp"

namespace eigenopt {

namespace {

std::vector<double> difference(const FeatureMap& f, State s, State next) {
  const auto a = f(s);
  const auto b = f(next);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = b[i] - a[i];
  return d;
}

}  // namespace

bool IncidenceMatrix::add(std::span<const double> row) {
  if (row.size() != feature_dim_) {
    throw PreconditionError("IncidenceMatrix::add: row has " + std::to_string(row.size()) +
                            " entries, expected " + std::to_string(feature_dim_));
  }
  if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; })) return false;
  std::vector<double> v(row.begin(), row.end());
  if (!index_.insert(v).second) return false;
  rows_.push_back(std::move(v));
  return true;
}

void IncidenceMatrix::merge(const IncidenceMatrix& other) {
  if (other.feature_dim_ != feature_dim_) {
    throw PreconditionError("IncidenceMatrix::merge: feature dimensions differ");
  }
  for (const auto& row : other.rows_) add(row);
  canonicalize();
}

void IncidenceMatrix::canonicalize() { std::sort(rows_.begin(), rows_.end()); }

IncidenceMatrix IncidenceMatrix::subsample(std::size_t cap, std::uint64_t seed) const {
  IncidenceMatrix out(feature_dim_);
  if (cap >= rows_.size()) {
    for (const auto& row : rows_) out.add(row);
  } else {
    std::vector<std::size_t> order(rows_.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < cap; ++i) out.add(rows_[order[i]]);
  }
  out.canonicalize();
  return out;
}

Eigen::MatrixXd IncidenceMatrix::to_dense() const {
  Eigen::MatrixXd t(static_cast<Eigen::Index>(rows_.size()), static_cast<Eigen::Index>(feature_dim_));
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    for (std::size_t c = 0; c < feature_dim_; ++c) {
      t(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows_[r][c];
    }
  }
  return t;
}

IncidenceMatrix collect_transitions(const GridWorld& g, const FeatureMap& f,
                                    const SamplingConfig& config) {
  if (f.num_states() != g.num_states()) {
    throw PreconditionError("collect_transitions: feature map built for a different world");
  }
  IncidenceMatrix t(f.dim());
  if (config.mode == SamplingMode::kExhaustive) {
    for (State s = 0; s < g.num_states(); ++s) {
      for (Action a : kPrimitiveActions) {
        const State next = g.step(s, a);
        if (next != s) t.add(difference(f, s, next));
      }
    }
    return t;
  }

  if (config.budget < 1) throw PreconditionError("collect_transitions: budget must be >= 1");
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> start(0, g.num_states() - 1);
  std::uniform_int_distribution<std::size_t> action(0, kNumPrimitiveActions - 1);
  State s = start(rng);
  for (std::size_t step = 0; step < config.budget; ++step) {
    const State next = g.step(s, kPrimitiveActions[action(rng)]);
    if (next != s) t.add(difference(f, s, next));
    s = next;
  }
  return t;
}

SymmetricMatrix gram(const Eigen::MatrixXd& t) {
  const auto d = static_cast<std::size_t>(t.cols());
  SymmetricMatrix out(d);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double sum = 0.0;
      for (Eigen::Index r = 0; r < t.rows(); ++r) {
        sum += t(r, static_cast<Eigen::Index>(i)) * t(r, static_cast<Eigen::Index>(j));
      }
      out.set(i, j, sum);
    }
  }
  return out;
}

std::vector<Eigenpurpose> svd_eigenpurposes(const IncidenceMatrix& t, std::size_t k,
                                            bool descending) {
  if (t.num_rows() == 0) throw PreconditionError("svd_eigenpurposes: empty incidence matrix");
  if (k < 1 || k > t.feature_dim()) {
    throw PreconditionError("svd_eigenpurposes: k must lie in [1, " +
                            std::to_string(t.feature_dim()) + "]");
  }
  const auto dec = eig_sym(gram(t.to_dense()));
  auto purposes = purposes_from_decomposition(dec, k, PurposeSource::kSvd, descending);
  for (auto& p : purposes) p.eigenvalue = std::sqrt(std::max(0.0, p.eigenvalue));
  return purposes;
}

double gram_laplacian_residual(const Eigen::MatrixXd& t, const SymmetricMatrix& l) {
  if (static_cast<std::size_t>(t.cols()) != l.size()) {
    throw PreconditionError("gram_laplacian_residual: T has " + std::to_string(t.cols()) +
                            " columns but L is " + std::to_string(l.size()) + " x " +
                            std::to_string(l.size()));
  }
  return (gram(t).dense() - 2.0 * l.dense()).cwiseAbs().maxCoeff();
}

std::vector<SubspaceCheck> compare_laplacian_and_svd(const GridWorld& g) {
  const auto l = laplacian(build_graph(g), LaplacianKind::kCombinatorial);
  const auto lap = eig_sym(l);
  const auto t = collect_transitions(g, FeatureMap::tabular(g), {SamplingMode::kExhaustive, 0, 0});
  const auto svd = eig_sym(gram(t.to_dense()));

  std::vector<SubspaceCheck> out;
  for (const auto& [first, last] : eigenvalue_groups(lap.values)) {
    const auto width = static_cast<Eigen::Index>(last - first);
    const auto begin = static_cast<Eigen::Index>(first);
    SubspaceCheck check;
    check.eigenvalue = lap.values[begin];
    check.first = first;
    check.last = last;
    check.max_angle = max_principal_angle(lap.vectors.middleCols(begin, width),
                                          svd.vectors.middleCols(begin, width));
    for (Eigen::Index i = begin; i < begin + width; ++i) {
      check.value_gap = std::max(check.value_gap, std::abs(svd.values[i] / 2.0 - lap.values[i]));
    }
    out.push_back(check);
  }
  return out;
}

Action greedy_option_action(const GridWorld& g, const FeatureMap& f, const Eigenpurpose& e,
                            State s) {
  const std::span<const double> v(e.vector.data(), static_cast<std::size_t>(e.vector.size()));
  std::array<double, kNumPrimitiveActions> r{};
  double best = -std::numeric_limits<double>::infinity();
  for (Action a : kPrimitiveActions) {
    r[action_index(a)] = eigenpurpose_reward(v, f(s), f(g.step(s, a)));
    best = std::max(best, r[action_index(a)]);
  }
  if (best <= kValueTolerance) return Action::kTerminate;
  for (Action a : kPrimitiveActions) {
    if (r[action_index(a)] >= best - kTieTolerance) return a;
  }
  return Action::kTerminate;
}

std::vector<State> greedy_option_path(const GridWorld& g, const FeatureMap& f,
                                      const Eigenpurpose& e, State s, std::size_t cap) {
  std::vector<State> path{s};
  for (std::size_t i = 0; i < cap; ++i) {
    const Action a = greedy_option_action(g, f, e, s);
    if (a == Action::kTerminate) break;
    s = g.step(s, a);
    path.push_back(s);
  }
  return path;
}

}  // namespace eigenopt
