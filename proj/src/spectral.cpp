#include "eigenopt/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eigenopt/errors.hpp"

namespace eigenopt {

namespace {

constexpr double kSignThreshold = 1e-12;

// One Jacobi rotation zeroing a(p, q); a is kept fully symmetric.
void rotate(Eigen::MatrixXd& a, Eigen::MatrixXd& v, Eigen::Index p, Eigen::Index q) {
  const double apq = a(p, q);
  const double diff = a(q, q) - a(p, p);
  double t;
  if (std::abs(diff) + 100.0 * std::abs(apq) == std::abs(diff)) {
    t = apq / diff;
  } else {
    const double theta = 0.5 * diff / apq;
    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    if (theta < 0.0) t = -t;
  }
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const Eigen::Index n = a.rows();
  for (Eigen::Index r = 0; r < n; ++r) {
    if (r == p || r == q) continue;
    const double arp = a(r, p);
    const double arq = a(r, q);
    const double new_rp = c * arp - s * arq;
    const double new_rq = s * arp + c * arq;
    a(r, p) = a(p, r) = new_rp;
    a(r, q) = a(q, r) = new_rq;
  }
  a(p, p) -= t * apq;
  a(q, q) += t * apq;
  a(p, q) = a(q, p) = 0.0;

  for (Eigen::Index r = 0; r < n; ++r) {
    const double vrp = v(r, p);
    const double vrq = v(r, q);
    v(r, p) = c * vrp - s * vrq;
    v(r, q) = s * vrp + c * vrq;
  }
}

double off_diagonal_sum(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index q = 1; q < a.cols(); ++q)
    for (Eigen::Index p = 0; p < q; ++p) sum += std::abs(a(p, q));
  return sum;
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > kSignThreshold) {
      if (v[i] < 0.0) v = -v;
      return;
    }
  }
}

double max_residual(const Eigen::MatrixXd& m, const Eigen::VectorXd& values,
                    const Eigen::MatrixXd& vectors) {
  const Eigen::MatrixXd r = m * vectors - vectors * values.asDiagonal();
  return r.size() == 0 ? 0.0 : r.cwiseAbs().maxCoeff();
}

}  // namespace

SymmetricMatrix SymmetricMatrix::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw PreconditionError("SymmetricMatrix: matrix is not square");
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) throw PreconditionError("SymmetricMatrix: matrix is not symmetric");
  SymmetricMatrix out;
  out.data_ = m;
  return out;
}

SymmetricMatrix build_graph(const GridWorld& g, GraphOptions options) {
  const std::size_t n = g.num_states();
  SymmetricMatrix a(n);
  for (State s = 0; s < n; ++s) {
    for (Action act : kPrimitiveActions) {
      const State t = g.step(s, act);
      if (t != s) {
        a.set(s, t, 1.0);
      } else if (options.self_loops) {
        a.add(s, s, 1.0);
      }
    }
  }
  return a;
}

SymmetricMatrix laplacian(const SymmetricMatrix& adjacency, LaplacianKind kind) {
  const std::size_t n = adjacency.size();
  Eigen::VectorXd degree(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (adjacency(i, j) < 0.0) throw PreconditionError("laplacian: negative weight");
      d += adjacency(i, j);
    }
    if (d <= 0.0) {
      throw PreconditionError("laplacian: node " + std::to_string(i) + " has zero degree");
    }
    degree[static_cast<Eigen::Index>(i)] = d;
  }

  SymmetricMatrix l(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double value = (i == j ? degree[static_cast<Eigen::Index>(i)] : 0.0) - adjacency(i, j);
      if (kind == LaplacianKind::kNormalized) {
        value /= std::sqrt(degree[static_cast<Eigen::Index>(i)]) *
                 std::sqrt(degree[static_cast<Eigen::Index>(j)]);
      }
      l.set(i, j, value);
    }
  }
  return l;
}

EigenDecomposition eig_sym(const SymmetricMatrix& m, double tol) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd a = m.dense();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const std::size_t max_sweeps = 100 * std::max<std::size_t>(m.size(), 1);

  const double scale = std::max(1.0, n > 0 ? m.dense().cwiseAbs().maxCoeff() : 0.0);

  std::size_t sweep = 0;
  bool converged = n <= 1;
  for (; sweep < max_sweeps && !converged; ++sweep) {
    const double off = off_diagonal_sum(a);
    if (off <= 1e-18 * scale) {
      converged = true;
      break;
    }
    // Early sweeps only rotate the large entries.
    const double threshold = sweep < 3 ? 0.2 * off / static_cast<double>(n * n) : 0.0;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double g = 100.0 * std::abs(a(p, q));
        if (sweep > 3 && std::abs(a(p, p)) + g == std::abs(a(p, p)) &&
            std::abs(a(q, q)) + g == std::abs(a(q, q))) {
          a(p, q) = a(q, p) = 0.0;
        } else if (std::abs(a(p, q)) > threshold) {
          rotate(a, v, p, q);
        }
      }
    }
  }

  if (!converged) {
    Eigen::VectorXd diag = a.diagonal();
    throw NumericalError("eig_sym: no convergence after " + std::to_string(sweep) + " sweeps",
                         max_residual(m.dense(), diag, v));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });

  EigenDecomposition out;
  out.sweeps = sweep;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    normalize_sign(out.vectors.col(k));
  }

  for (const auto& [first, last] : eigenvalue_groups(out.values)) {
    if (last - first < 2) continue;
    std::vector<Eigen::Index> idx(last - first);
    std::iota(idx.begin(), idx.end(), static_cast<Eigen::Index>(first));
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index x, Eigen::Index y) {
      const auto cx = out.vectors.col(x);
      const auto cy = out.vectors.col(y);
      return std::lexicographical_compare(cy.begin(), cy.end(), cx.begin(), cx.end());
    });
    Eigen::MatrixXd cols(n, static_cast<Eigen::Index>(idx.size()));
    Eigen::VectorXd vals(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      cols.col(static_cast<Eigen::Index>(i)) = out.vectors.col(idx[i]);
      vals[static_cast<Eigen::Index>(i)] = out.values[idx[i]];
    }
    out.vectors.middleCols(static_cast<Eigen::Index>(first), cols.cols()) = cols;
    out.values.segment(static_cast<Eigen::Index>(first), vals.size()) = vals;
  }

  out.max_residual = max_residual(m.dense(), out.values, out.vectors);
  if (out.max_residual > tol * scale) {
    throw NumericalError("eig_sym: eigenpair residual above tolerance", out.max_residual);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> eigenvalue_groups(
    const Eigen::VectorXd& ascending, double tol) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  const auto n = static_cast<std::size_t>(ascending.size());
  std::size_t first = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i == n || ascending[static_cast<Eigen::Index>(i)] -
                          ascending[static_cast<Eigen::Index>(i - 1)] > tol) {
      if (n > 0) groups.emplace_back(first, i);
      first = i;
    }
  }
  return groups;
}

double max_principal_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw PreconditionError("max_principal_angle: subspace shapes differ");
  }
  if (u.cols() == 0) return 0.0;
  // sin of the largest angle is the spectral norm of (I - U U^T) V.
  const Eigen::MatrixXd residual = v - u * (u.transpose() * v);
  Eigen::MatrixXd gram = residual.transpose() * residual;
  gram = 0.5 * (gram + gram.transpose()).eval();
  const auto dec = eig_sym(SymmetricMatrix::from_dense(gram), 1e-8);
  const double top = std::max(0.0, dec.values[dec.values.size() - 1]);
  return std::asin(std::min(1.0, std::sqrt(top)));
}

std::vector<Eigenpurpose> purposes_from_decomposition(const EigenDecomposition& dec,
                                                      std::size_t k, PurposeSource source,
                                                      bool descending) {
  const auto n = static_cast<std::size_t>(dec.values.size());
  if (k < 1 || k > n) {
    throw PreconditionError("purpose count k=" + std::to_string(k) + " outside [1, " +
                            std::to_string(n) + "]");
  }
  std::vector<Eigenpurpose> out;
  out.reserve(2 * k);
  for (std::size_t r = 0; r < k; ++r) {
    const auto col = static_cast<Eigen::Index>(descending ? n - 1 - r : r);
    Eigenpurpose plus;
    plus.vector = dec.vectors.col(col);
    plus.eigenvalue = dec.values[col];
    plus.sign = 1;
    plus.source = source;
    plus.rank = r + 1;
    Eigenpurpose minus = plus;
    minus.vector = -plus.vector;
    minus.sign = -1;
    out.push_back(std::move(plus));
    out.push_back(std::move(minus));
  }
  return out;
}

std::vector<Eigenpurpose> pvf_sequence(const GridWorld& g, LaplacianKind kind, std::size_t k,
                                       GraphOptions options) {
  if (k < 1 || k > g.num_states()) {
    throw PreconditionError("pvf_sequence: k=" + std::to_string(k) + " outside [1, |S|=" +
                            std::to_string(g.num_states()) + "]");
  }
  const auto dec = eig_sym(laplacian(build_graph(g, options), kind));
  return purposes_from_decomposition(dec, k, PurposeSource::kLaplacian);
}

}  // namespace eigenopt
