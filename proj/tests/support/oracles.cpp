#include "oracles.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <utility>

namespace oracle {

namespace {

constexpr std::array<Action, 4> kMoves = {Action::kUp, Action::kDown, Action::kRight, Action::kLeft};

std::vector<std::array<double, 4>> reward_table(const GridWorld& g, const eigenopt::FeatureMap& f,
                                                const Eigen::VectorXd& purpose) {
  std::vector<std::array<double, 4>> r(g.num_states());
  for (State s = 0; s < g.num_states(); ++s) {
    const Eigen::VectorXd here = f.vector(s);
    for (std::size_t a = 0; a < 4; ++a) {
      const Eigen::VectorXd there = f.vector(geometric_step(g, s, kMoves[a]));
      r[s][a] = purpose.dot(there - here);
    }
  }
  return r;
}

double cycle_return(const std::vector<double>& rewards, double gamma) {
  double sum = 0.0;
  double discount = 1.0;
  for (double r : rewards) {
    sum += discount * r;
    discount *= gamma;
  }
  return sum / (1.0 - discount);
}

struct RolloutSearch {
  const GridWorld& g;
  const std::vector<std::array<double, 4>>& r;
  double gamma;
  std::vector<State> path;
  std::vector<double> path_rewards;
  double best = 0.0;

  void search(double acc, double discount) {
    best = std::max(best, acc);
    const State c = path.back();
    for (std::size_t a = 0; a < 4; ++a) {
      const State next = geometric_step(g, c, kMoves[a]);
      const double reward = r[c][a];
      const auto it = std::find(path.begin(), path.end(), next);
      if (it != path.end()) {
        const auto pos = static_cast<std::size_t>(it - path.begin());
        std::vector<double> loop(path_rewards.begin() + static_cast<std::ptrdiff_t>(pos), path_rewards.end());
        loop.push_back(reward);
        best = std::max(best, acc + discount * reward + discount * gamma * cycle_return(loop, gamma));
        continue;
      }
      path.push_back(next);
      path_rewards.push_back(reward);
      search(acc + discount * reward, discount * gamma);
      path.pop_back();
      path_rewards.pop_back();
    }
  }
};

using Shape = std::vector<std::pair<int, int>>;

Shape normalized(Shape cells) {
  int min_r = std::numeric_limits<int>::max();
  int min_c = std::numeric_limits<int>::max();
  for (const auto& [r, c] : cells) {
    min_r = std::min(min_r, r);
    min_c = std::min(min_c, c);
  }
  for (auto& [r, c] : cells) {
    r -= min_r;
    c -= min_c;
  }
  std::sort(cells.begin(), cells.end());
  return cells;
}

Shape canonical(const Shape& cells) {
  Shape best;
  for (int t = 0; t < 8; ++t) {
    Shape s;
    for (auto [r, c] : cells) {
      if (t & 1) r = -r;
      if (t & 2) c = -c;
      if (t & 4) std::swap(r, c);
      s.emplace_back(r, c);
    }
    s = normalized(std::move(s));
    if (best.empty() || s < best) best = s;
  }
  return best;
}

std::string shape_map(const Shape& cells) {
  int h = 0;
  int w = 0;
  for (const auto& [r, c] : cells) {
    h = std::max(h, r + 1);
    w = std::max(w, c + 1);
  }
  std::vector<std::string> rows(static_cast<std::size_t>(h), std::string(static_cast<std::size_t>(w), 'X'));
  for (const auto& [r, c] : cells) rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = '.';
  std::string text;
  for (const auto& row : rows) text += row + "\n";
  return text;
}

}  // namespace

Eigenpair smallest_eigenpair(const Eigen::MatrixXd& m, int max_iterations, double tol) {
  double bound = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) bound = std::max(bound, m.row(i).cwiseAbs().sum());
  const Eigen::Index n = m.rows();
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = 1.0 + 0.01 * static_cast<double>(i % 7);
  x.normalize();
  Eigenpair out;
  for (out.iterations = 1; out.iterations <= max_iterations; ++out.iterations) {
    Eigen::VectorXd y = bound * x - m * x;
    x = y.normalized();
    out.value = x.dot(m * x);
    if ((m * x - out.value * x).cwiseAbs().maxCoeff() <= tol) break;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(x[i]) > 1e-12) {
      if (x[i] < 0) x = -x;
      break;
    }
  }
  out.vector = x;
  return out;
}

State geometric_step(const GridWorld& g, State s, Action a) {
  eigenopt::Cell c = g.cell(s);
  switch (a) {
    case Action::kUp: --c.row; break;
    case Action::kDown: ++c.row; break;
    case Action::kRight: ++c.col; break;
    case Action::kLeft: --c.col; break;
    case Action::kTerminate: return s;
  }
  const auto next = g.state_at(c);
  return next ? *next : s;
}

std::vector<std::vector<std::size_t>> all_pairs_distances(const GridWorld& g) {
  const std::size_t n = g.num_states();
  const std::size_t inf = std::numeric_limits<std::size_t>::max() / 4;
  std::vector<std::vector<std::size_t>> d(n, std::vector<std::size_t>(n, inf));
  for (State s = 0; s < n; ++s) {
    d[s][s] = 0;
    for (Action a : kMoves) {
      const State t = geometric_step(g, s, a);
      if (t != s) d[s][t] = 1;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
  return d;
}

std::vector<double> optimal_values_by_rollouts(const GridWorld& g, const eigenopt::FeatureMap& f,
                                               const Eigen::VectorXd& purpose, double gamma) {
  const auto r = reward_table(g, f, purpose);
  std::vector<double> v(g.num_states());
  for (State s = 0; s < g.num_states(); ++s) {
    RolloutSearch search{g, r, gamma, {s}, {}, 0.0};
    search.search(0.0, 1.0);
    v[s] = search.best;
  }
  return v;
}

std::vector<double> optimal_values_by_policies(const GridWorld& g, const eigenopt::FeatureMap& f,
                                               const Eigen::VectorXd& purpose, double gamma) {
  const auto r = reward_table(g, f, purpose);
  const std::size_t n = g.num_states();
  std::vector<int> policy(n, 0);  // 0 = terminate, 1..4 = kMoves[k - 1]
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  std::vector<long> seen(n);
  while (true) {
    for (State s = 0; s < n; ++s) {
      std::fill(seen.begin(), seen.end(), -1);
      std::vector<double> rewards;
      std::vector<double> discounts;
      State c = s;
      double value = 0.0;
      double discount = 1.0;
      while (policy[c] != 0) {
        if (seen[c] >= 0) {
          // The loop from c repeats forever: swap its single pass for the closed form.
          const auto k = static_cast<std::size_t>(seen[c]);
          std::vector<double> loop(rewards.begin() + static_cast<std::ptrdiff_t>(k), rewards.end());
          for (std::size_t i = k; i < rewards.size(); ++i) value -= discounts[i] * rewards[i];
          value += discounts[k] * cycle_return(loop, gamma);
          break;
        }
        seen[c] = static_cast<long>(rewards.size());
        const auto a = static_cast<std::size_t>(policy[c] - 1);
        rewards.push_back(r[c][a]);
        discounts.push_back(discount);
        value += discount * r[c][a];
        discount *= gamma;
        c = geometric_step(g, c, kMoves[a]);
      }
      best[s] = std::max(best[s], value);
    }
    std::size_t i = 0;
    while (i < n && policy[i] == 4) policy[i++] = 0;
    if (i == n) break;
    ++policy[i];
  }
  return best;
}

Eigen::MatrixXd q_from_values(const GridWorld& g, const eigenopt::FeatureMap& f,
                              const Eigen::VectorXd& purpose, double gamma,
                              const std::vector<double>& values) {
  const auto r = reward_table(g, f, purpose);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(g.num_states()), 5);
  for (State s = 0; s < g.num_states(); ++s) {
    for (std::size_t a = 0; a < 4; ++a) {
      q(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
          r[s][a] + gamma * values[geometric_step(g, s, kMoves[a])];
    }
  }
  return q;
}

std::vector<std::string> free_polyomino_maps(int max_size) {
  std::vector<std::string> maps;
  std::set<Shape> level{Shape{{0, 0}}};
  for (int size = 1; size <= max_size; ++size) {
    for (const auto& shape : level) maps.push_back(shape_map(shape));
    if (size == max_size) break;
    std::set<Shape> next;
    for (const auto& shape : level) {
      for (const auto& [r, c] : shape) {
        for (auto [dr, dc] : {std::pair{-1, 0}, {1, 0}, {0, 1}, {0, -1}}) {
          const std::pair<int, int> cell{r + dr, c + dc};
          if (std::find(shape.begin(), shape.end(), cell) != shape.end()) continue;
          Shape grown = shape;
          grown.push_back(cell);
          next.insert(canonical(grown));
        }
      }
    }
    level = std::move(next);
  }
  return maps;
}

std::vector<double> textbook_q_learning(const GridWorld& g, const eigenopt::LearnConfig& cfg,
                                        std::uint64_t seed) {
  const std::size_t n = g.num_states();
  std::vector<std::array<double, 4>> q(n, {0.0, 0.0, 0.0, 0.0});
  auto max_q = [&](State s) { return *std::max_element(q[s].begin(), q[s].end()); };
  auto greedy = [&](State s) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < 4; ++a) {
      if (q[s][a] > q[s][best]) best = a;
    }
    return best;
  };

  std::mt19937_64 rng(seed);
  std::vector<double> returns;
  for (std::size_t episode = 0; episode < cfg.episodes; ++episode) {
    State s = cfg.start;
    for (std::size_t t = 0; t < cfg.episode_len && s != cfg.goal; ++t) {
      const std::size_t a = std::uniform_int_distribution<std::size_t>(0, 3)(rng);
      const State next = geometric_step(g, s, kMoves[a]);
      const double reward = next == cfg.goal ? 1.0 : 0.0;
      const double target = next == cfg.goal ? reward : reward + cfg.gamma * max_q(next);
      q[s][a] += cfg.alpha * (target - q[s][a]);
      s = next;
    }

    double ret = 0.0;
    double discount = 1.0;
    State e = cfg.start;
    for (std::size_t t = 0; t < cfg.episode_len; ++t) {
      e = geometric_step(g, e, kMoves[greedy(e)]);
      if (e == cfg.goal) {
        ret = discount;
        break;
      }
      discount *= cfg.gamma;
    }
    returns.push_back(ret);
  }
  return returns;
}

}  // namespace oracle
