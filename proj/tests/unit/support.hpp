#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "gomk/graph.hpp"

namespace testing_support {

using gomk::Graphd;
using gomk::Index;

inline Graphd random_weighted_graph(Index n, Index d, double density, std::mt19937_64& rng, bool binary = false) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (u(rng) < density) a(i, j) = a(j, i) = binary ? 1.0 : 0.05 + 0.95 * u(rng);
    }
  }
  Eigen::MatrixXd f(n, d);
  for (Index k = 0; k < f.size(); ++k) f.data()[k] = u(rng);
  return Graphd(a, f);
}

/// Hop distances from u by repeated relaxation over the adjacency matrix; -1 when unreachable.
inline std::vector<Index> hop_distances(const Eigen::MatrixXd& a, Index u) {
  const Index n = a.rows();
  std::vector<Index> dist(static_cast<std::size_t>(n), -1);
  dist[static_cast<std::size_t>(u)] = 0;
  for (Index round = 1; round < n; ++round) {
    bool changed = false;
    for (Index v = 0; v < n; ++v) {
      if (dist[static_cast<std::size_t>(v)] >= 0) continue;
      for (Index w = 0; w < n; ++w) {
        if (a(v, w) != 0.0 && dist[static_cast<std::size_t>(w)] == round - 1) {
          dist[static_cast<std::size_t>(v)] = round;
          changed = true;
          break;
        }
      }
    }
    if (!changed) break;
  }
  return dist;
}

/// Level-i vector of node v by direct recursion over neighbours.
inline Eigen::RowVectorXd recursive_level(const Graphd& g, Index v, Index i) {
  if (i == 0) return g.features().row(v);
  Eigen::RowVectorXd acc = Eigen::RowVectorXd::Zero(g.feature_dim());
  for (Index w = 0; w < g.size(); ++w) {
    if (g.adjacency()(v, w) != 0.0) acc += g.adjacency()(v, w) * recursive_level(g, w, i - 1);
  }
  return acc;
}

/// Best total over every injection of the rows into the columns (rows <= cols), by recursion.
inline double best_injection(const Eigen::MatrixXd& sim) {
  const Eigen::MatrixXd s = sim.rows() <= sim.cols() ? sim : Eigen::MatrixXd(sim.transpose());
  std::vector<char> used(static_cast<std::size_t>(s.cols()), 0);
  std::function<double(Index)> go = [&](Index r) -> double {
    if (r == s.rows()) return 0.0;
    double best = -std::numeric_limits<double>::infinity();
    for (Index c = 0; c < s.cols(); ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      used[static_cast<std::size_t>(c)] = 1;
      best = std::max(best, s(r, c) + go(r + 1));
      used[static_cast<std::size_t>(c)] = 0;
    }
    return best;
  };
  return go(0);
}

/// Central differences of f at x.
inline Eigen::VectorXd numeric_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    const double up = f(probe);
    probe(i) = x(i) - h;
    const double down = f(probe);
    probe(i) = x(i);
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-2) {
  double worst = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a(i) - b(i)) / std::max({std::abs(a(i)), std::abs(b(i)), floor}));
  }
  return worst;
}

}  // namespace testing_support
