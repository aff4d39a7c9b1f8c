#pragma once

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "gomk/types.hpp"

namespace gomk {

/// Binary adjacency with entries above `threshold` kept as edges (diagonal ignored).
template <typename Derived>
Eigen::MatrixXi threshold_adjacency(const Eigen::MatrixBase<Derived>& a, double threshold = 0.5) {
  Eigen::MatrixXi out = Eigen::MatrixXi::Zero(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      if (i != j && static_cast<double>(a(i, j)) > threshold) out(i, j) = 1;
    }
  }
  return out;
}

namespace detail {

inline bool extend_isomorphism(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b,
                               const std::vector<int>& deg_a, const std::vector<int>& deg_b,
                               std::vector<Index>& map, std::vector<char>& used, Index next,
                               const std::function<bool(const std::vector<Index>&)>& visit) {
  const Index n = a.rows();
  if (next == n) return visit(map);
  for (Index c = 0; c < n; ++c) {
    if (used[static_cast<std::size_t>(c)]) continue;
    if (deg_a[static_cast<std::size_t>(next)] != deg_b[static_cast<std::size_t>(c)]) continue;
    bool ok = true;
    for (Index p = 0; p < next && ok; ++p) {
      ok = a(next, p) == b(c, map[static_cast<std::size_t>(p)]);
    }
    if (!ok) continue;
    map[static_cast<std::size_t>(next)] = c;
    used[static_cast<std::size_t>(c)] = 1;
    if (extend_isomorphism(a, b, deg_a, deg_b, map, used, next + 1, visit)) return true;
    used[static_cast<std::size_t>(c)] = 0;
  }
  return false;
}

}  // namespace detail

/// Calls `visit` with every node map m (a(i,j) == b(m[i], m[j])) until it returns true.
/// Returns whether some call returned true. Backtracking with degree pruning; meant for small graphs.
inline bool for_each_isomorphism(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b,
                                 const std::function<bool(const std::vector<Index>&)>& visit) {
  if (a.rows() != b.rows()) return false;
  const Index n = a.rows();
  std::vector<int> deg_a(static_cast<std::size_t>(n)), deg_b(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    deg_a[static_cast<std::size_t>(i)] = a.row(i).sum();
    deg_b[static_cast<std::size_t>(i)] = b.row(i).sum();
  }
  std::vector<int> sa = deg_a, sb = deg_b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  if (sa != sb) return false;
  std::vector<Index> map(static_cast<std::size_t>(n), -1);
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  return detail::extend_isomorphism(a, b, deg_a, deg_b, map, used, 0, visit);
}

/// Some node map taking a onto b, if the two binary graphs are isomorphic.
inline std::optional<std::vector<Index>> find_isomorphism(const Eigen::MatrixXi& a,
                                                          const Eigen::MatrixXi& b) {
  std::optional<std::vector<Index>> found;
  for_each_isomorphism(a, b, [&](const std::vector<Index>& m) {
    found = m;
    return true;
  });
  return found;
}

inline bool isomorphic(const Eigen::MatrixXi& a, const Eigen::MatrixXi& b) {
  return find_isomorphism(a, b).has_value();
}

}  // namespace gomk
