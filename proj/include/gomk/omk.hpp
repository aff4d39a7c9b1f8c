#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "gomk/errors.hpp"
#include "gomk/graph.hpp"
#include "gomk/tse.hpp"
#include "gomk/types.hpp"

namespace gomk {

template <typename Scalar>
void check_width(Scalar tau) {
  if (!(tau > Scalar(0))) throw ConfigError("RBF width must be positive");
}

/// Sum over levels of exp(-|a_i - b_i|^2 / (d * tau)).
///
/// Lies in (0, t+1]; s(a, a) == t+1 exactly.
template <typename Scalar>
Scalar solid_similarity(const SubtreeEmbedding<Scalar>& a, const SubtreeEmbedding<Scalar>& b,
                        Scalar tau) {
  check_width(tau);
  if (a.levels.rows() != b.levels.rows() || a.levels.cols() != b.levels.cols()) {
    throw ShapeError("subtree embeddings differ in depth or feature dimension");
  }
  const Scalar inv = Scalar(1) / (static_cast<Scalar>(a.feature_dim()) * tau);
  Scalar s = Scalar(0);
  for (Index i = 0; i < a.levels.rows(); ++i) {
    s += std::exp(-(a.levels.row(i) - b.levels.row(i)).squaredNorm() * inv);
  }
  return s;
}

template <typename Scalar>
void check_compatible(const SubgraphEmbedding<Scalar>& x, const SubgraphEmbedding<Scalar>& y) {
  if (x.depth() != y.depth()) throw ShapeError("embeddings differ in aggregation depth");
  if (x.feature_dim() != y.feature_dim()) {
    throw ShapeError("embeddings differ in feature dimension (" + std::to_string(x.feature_dim()) +
                     " vs " + std::to_string(y.feature_dim()) + ")");
  }
}

/// Solid similarity between node x of X and node y of Y.
template <typename Scalar>
Scalar node_similarity(const SubgraphEmbedding<Scalar>& x_emb, Index x,
                       const SubgraphEmbedding<Scalar>& y_emb, Index y, Scalar tau) {
  const Index d = x_emb.feature_dim();
  const Scalar inv = Scalar(1) / (static_cast<Scalar>(d) * tau);
  Scalar s = Scalar(0);
  for (Index i = 0; i <= x_emb.depth(); ++i) {
    const auto& lx = x_emb.level(i);
    const auto& ly = y_emb.level(i);
    Scalar sq = Scalar(0);
    for (Index c = 0; c < d; ++c) {
      const Scalar diff = lx(x, c) - ly(y, c);
      sq += diff * diff;
    }
    s += std::exp(-sq * inv);
  }
  return s;
}

/// |X| x |Y| matrix of pairwise solid similarities.
template <typename Scalar>
MatrixX<Scalar> similarity_matrix(const SubgraphEmbedding<Scalar>& x_emb,
                                  const SubgraphEmbedding<Scalar>& y_emb, Scalar tau) {
  check_width(tau);
  check_compatible(x_emb, y_emb);
  const Index p = x_emb.node_count();
  const Index q = y_emb.node_count();
  MatrixX<Scalar> sim(p, q);
  for (Index y = 0; y < q; ++y) {
    for (Index x = 0; x < p; ++x) sim(x, y) = node_similarity(x_emb, x, y_emb, y, tau);
  }
  return sim;
}

template <typename Scalar>
struct MatchedPair {
  Index x = 0;
  Index y = 0;
  Scalar similarity = Scalar(0);
};

/// Injective pairing between the elements of two sets.
template <typename Scalar>
struct Matching {
  std::vector<MatchedPair<Scalar>> pairs;

  Scalar total() const {
    Scalar s = Scalar(0);
    for (const auto& p : pairs) s += p.similarity;
    return s;
  }

  /// Throws InvariantError if an element appears twice or an index is out of range.
  void validate(Index x_size, Index y_size) const {
    std::vector<char> used_x(static_cast<std::size_t>(x_size), 0);
    std::vector<char> used_y(static_cast<std::size_t>(y_size), 0);
    for (const auto& p : pairs) {
      if (p.x < 0 || p.x >= x_size || p.y < 0 || p.y >= y_size) {
        throw InvariantError("matched pair (" + std::to_string(p.x) + "," + std::to_string(p.y) +
                             ") out of range");
      }
      if (used_x[static_cast<std::size_t>(p.x)]++ || used_y[static_cast<std::size_t>(p.y)]++) {
        throw InvariantError("matching is not injective");
      }
    }
  }
};

/// Greedy matching: X's elements in index order each take the most similar
/// unmatched Y element, lowest Y index on ties.
template <typename Scalar>
Matching<Scalar> greedy_match(const MatrixX<Scalar>& sim) {
  const Index p = sim.rows();
  const Index q = sim.cols();
  std::vector<char> taken(static_cast<std::size_t>(q), 0);
  Matching<Scalar> out;
  out.pairs.reserve(static_cast<std::size_t>(std::min(p, q)));
  for (Index x = 0; x < p && static_cast<Index>(out.pairs.size()) < q; ++x) {
    Index best = -1;
    Scalar best_s = -std::numeric_limits<Scalar>::infinity();
    for (Index y = 0; y < q; ++y) {
      if (!taken[static_cast<std::size_t>(y)] && sim(x, y) > best_s) {
        best = y;
        best_s = sim(x, y);
      }
    }
    taken[static_cast<std::size_t>(best)] = 1;
    out.pairs.push_back({x, best, best_s});
  }
  return out;
}

template <typename Scalar>
Matching<Scalar> greedy_match(const SubgraphEmbedding<Scalar>& x_emb,
                              const SubgraphEmbedding<Scalar>& y_emb, Scalar tau) {
  return greedy_match(similarity_matrix(x_emb, y_emb, tau));
}

namespace detail {

/// Min-cost assignment of every row to a distinct column (rows <= cols) with
/// potentials; returns the column of each row.
template <typename Scalar>
std::vector<Index> hungarian_min(const MatrixX<Scalar>& cost) {
  const Index n = cost.rows();
  const Index m = cost.cols();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> u(static_cast<std::size_t>(n + 1), 0), v(static_cast<std::size_t>(m + 1), 0);
  std::vector<Index> owner(static_cast<std::size_t>(m + 1), 0), way(static_cast<std::size_t>(m + 1), 0);
  for (Index i = 1; i <= n; ++i) {
    owner[0] = i;
    Index j0 = 0;
    std::vector<Scalar> minv(static_cast<std::size_t>(m + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(m + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const Index i0 = owner[static_cast<std::size_t>(j0)];
      Scalar delta = inf;
      Index j1 = 0;
      for (Index j = 1; j <= m; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) continue;
        const Scalar cur = cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[sj];
        if (cur < minv[sj]) {
          minv[sj] = cur;
          way[sj] = j0;
        }
        if (minv[sj] < delta) {
          delta = minv[sj];
          j1 = j;
        }
      }
      for (Index j = 0; j <= m; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        if (used[sj]) {
          u[static_cast<std::size_t>(owner[sj])] += delta;
          v[sj] -= delta;
        } else {
          minv[sj] -= delta;
        }
      }
      j0 = j1;
    } while (owner[static_cast<std::size_t>(j0)] != 0);
    do {
      const Index j1 = way[static_cast<std::size_t>(j0)];
      owner[static_cast<std::size_t>(j0)] = owner[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<Index> col(static_cast<std::size_t>(n), -1);
  for (Index j = 1; j <= m; ++j) {
    if (owner[static_cast<std::size_t>(j)] != 0) {
      col[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)] - 1)] = j - 1;
    }
  }
  return col;
}

template <typename Scalar>
Scalar max_assignment_value(const MatrixX<Scalar>& sim) {
  if (sim.rows() == 0) return Scalar(0);
  const std::vector<Index> col = hungarian_min<Scalar>(-sim);
  Scalar total = Scalar(0);
  for (Index r = 0; r < sim.rows(); ++r) total += sim(r, col[static_cast<std::size_t>(r)]);
  return total;
}

template <typename Scalar>
MatrixX<Scalar> without(const MatrixX<Scalar>& m, const std::vector<Index>& rows,
                        const std::vector<Index>& cols) {
  MatrixX<Scalar> out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out(static_cast<Index>(r), static_cast<Index>(c)) = m(rows[r], cols[c]);
    }
  }
  return out;
}

/// Lexicographically smallest maximum-weight assignment for rows <= cols.
template <typename Scalar>
std::vector<Index> lexicographic_max_assignment(const MatrixX<Scalar>& sim) {
  const Index p = sim.rows();
  std::vector<Index> rows(static_cast<std::size_t>(p));
  std::iota(rows.begin(), rows.end(), Index(0));
  std::vector<Index> cols(static_cast<std::size_t>(sim.cols()));
  std::iota(cols.begin(), cols.end(), Index(0));

  const std::vector<Index> base = hungarian_min<Scalar>(-sim);
  Scalar remaining = Scalar(0);
  for (Index r = 0; r < p; ++r) remaining += sim(r, base[static_cast<std::size_t>(r)]);
  const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), std::abs(remaining));

  std::vector<Index> out(static_cast<std::size_t>(p), -1);
  for (Index x = 0; x < p; ++x) {
    rows.erase(rows.begin());
    bool fixed = false;
    for (std::size_t ci = 0; ci < cols.size() && !fixed; ++ci) {
      const Index y = cols[ci];
      std::vector<Index> rest = cols;
      rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(ci));
      const Scalar value = sim(x, y) + max_assignment_value<Scalar>(without(sim, rows, rest));
      if (value >= remaining - tol) {
        out[static_cast<std::size_t>(x)] = y;
        remaining = value - sim(x, y);
        cols = std::move(rest);
        fixed = true;
      }
    }
    if (!fixed) throw InvariantError("assignment canonicalization lost optimality");
  }
  return out;
}

}  // namespace detail

/// Maximum-total-similarity injective matching (rectangular Kuhn-Munkres).
///
/// Among optimal matchings, returns the one whose pair sequence is
/// lexicographically smallest, which makes X == Y yield the identity.
template <typename Scalar>
Matching<Scalar> optimal_match(const MatrixX<Scalar>& sim) {
  Matching<Scalar> out;
  if (sim.rows() == 0 || sim.cols() == 0) return out;
  if (sim.rows() <= sim.cols()) {
    const std::vector<Index> col = detail::lexicographic_max_assignment<Scalar>(sim);
    for (Index x = 0; x < sim.rows(); ++x) {
      const Index y = col[static_cast<std::size_t>(x)];
      out.pairs.push_back({x, y, sim(x, y)});
    }
  } else {
    const MatrixX<Scalar> st = sim.transpose();
    const std::vector<Index> col = detail::lexicographic_max_assignment<Scalar>(st);
    for (Index y = 0; y < st.rows(); ++y) {
      const Index x = col[static_cast<std::size_t>(y)];
      out.pairs.push_back({x, y, sim(x, y)});
    }
    std::sort(out.pairs.begin(), out.pairs.end(),
              [](const auto& a, const auto& b) { return a.x < b.x; });
  }
  return out;
}

template <typename Scalar>
Matching<Scalar> optimal_match(const SubgraphEmbedding<Scalar>& x_emb,
                               const SubgraphEmbedding<Scalar>& y_emb, Scalar tau) {
  return optimal_match(similarity_matrix(x_emb, y_emb, tau));
}

enum class Matcher { greedy, exact };

template <typename Scalar>
struct KernelValue {
  Scalar value = Scalar(0);
  Matching<Scalar> matching;
};

/// Graph optimal matching kernel between two equally sized embeddings.
template <typename Scalar>
KernelValue<Scalar> kernel(const SubgraphEmbedding<Scalar>& x_emb,
                         const SubgraphEmbedding<Scalar>& y_emb, Scalar tau,
                         Matcher matcher = Matcher::greedy) {
  if (x_emb.node_count() != y_emb.node_count()) {
    throw ShapeError("kernel inputs must be standardized to equal size (" +
                     std::to_string(x_emb.node_count()) + " vs " +
                     std::to_string(y_emb.node_count()) + ")");
  }
  const MatrixX<Scalar> sim = similarity_matrix(x_emb, y_emb, tau);
  KernelValue<Scalar> out;
  out.matching = matcher == Matcher::greedy ? greedy_match(sim) : optimal_match(sim);
  out.value = out.matching.total();
  return out;
}

template <typename Scalar>
KernelValue<Scalar> kernel(const Graph<Scalar>& gx, const Graph<Scalar>& gy, Index t, Scalar tau,
                         Matcher matcher = Matcher::greedy) {
  if (gx.size() != gy.size()) {
    throw ShapeError("kernel inputs must be standardized to equal size (" +
                     std::to_string(gx.size()) + " vs " + std::to_string(gy.size()) + ")");
  }
  return kernel(encode(gx, t), encode(gy, t), tau, matcher);
}

/// Kernel value of a fixed matching: the sum of its pairs' similarities recomputed from the embeddings.
template <typename Scalar>
Scalar matched_similarity(const SubgraphEmbedding<Scalar>& x_emb,
                          const SubgraphEmbedding<Scalar>& y_emb, const Matching<Scalar>& matching,
                          Scalar tau) {
  Scalar s = Scalar(0);
  for (const auto& p : matching.pairs) s += node_similarity(x_emb, p.x, y_emb, p.y, tau);
  return s;
}

}  // namespace gomk
