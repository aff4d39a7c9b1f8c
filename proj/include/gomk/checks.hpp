#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gomk/filter.hpp"
#include "gomk/graph.hpp"
#include "gomk/omk.hpp"
#include "gomk/tse.hpp"

namespace gomk {

/// Outcome of one invariant or acceptance check.
struct CheckResult {
  std::string name;
  bool passed = false;
  /// Worst observed value of the checked quantity (meaning depends on the check).
  double worst = 0.0;
  std::string detail;
};

/// Symmetric graph with each edge present with probability `density` and
/// weight U(0, 1] (or 1 when `binary`), features U(0, 1)^d.
Graphd random_graph(Index n, Index d, double density, bool binary, std::mt19937_64& rng);

/// Embedding of p random nodes with t+1 levels of U(0, scale) entries.
SubgraphEmbedding<double> random_embedding(Index p, Index d, Index t, double scale,
                                           std::mt19937_64& rng);

/// Best assignment value by enumerating every injection of the smaller side (sizes <= 8).
double brute_force_assignment(const Eigen::MatrixXd& sim);

/// kernel(g, g) == m (t + 1) for padded random weighted graphs, m in 2..12, t in 0..4.
CheckResult check_self_similarity(int instances, std::uint64_t seed, double tol = 1e-9);

/// Element-kernel Gram PSD (min eigenvalue >= -psd_tol), LCA weights reproduce the Gram,
/// psi inner products reproduce it, and the three set-kernel expressions agree within tol.
CheckResult check_element_kernel(int instances, std::uint64_t seed, double psd_tol = 1e-8,
                                 double tol = 1e-9);

/// Greedy total <= exact total on random instances (sizes <= 8), and the exact matcher
/// equals exhaustive enumeration for sizes <= 6.
CheckResult check_matching(int instances, std::uint64_t seed, double tol = 1e-9);

/// Analytic tapes of L_iso and L_frq against central differences at points where
/// the greedy matchings and winning filters stay fixed within +-h.
CheckResult check_gradients(int instances, std::uint64_t seed, double h = 1e-5,
                            double max_relative_error = 1e-4);

/// Rank of [F, AF, ..., A^t F] by SVD (relative cutoff 1e-8); n means the
/// node embeddings determine the adjacency.
Index krylov_rank(const Graphd& g, Index t);

/// Adjacency recovery from full-rank 6-node embeddings, and rank-deficient
/// constructions reported as such.
CheckResult check_reconstruction(int instances, std::uint64_t seed, double tol = 1e-6);

/// Every fast check above with its default size.
std::vector<CheckResult> run_invariant_suite(std::uint64_t seed);

}  // namespace gomk
