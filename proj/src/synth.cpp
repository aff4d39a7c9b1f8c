#include "gomk/synth.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

namespace gomk {

namespace {

Eigen::MatrixXd uniform_features(Index n, Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd f(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) f(i, j) = unit(rng);
  }
  return f;
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

}  // namespace

BarabasiAlbert barabasi_albert(Index n, Index attach_m, Index feature_dim, std::mt19937_64& rng) {
  if (attach_m < 1 || n <= attach_m) {
    throw ConfigError("preferential attachment needs n > attach_m >= 1 (got n=" + std::to_string(n) +
                      ", attach_m=" + std::to_string(attach_m) + ")");
  }
  if (feature_dim < 1) throw ConfigError("feature dimension must be positive");
  BarabasiAlbert out;
  out.core_nodes = attach_m + 1;
  out.core_edges = attach_m;
  std::vector<Edge> edges;
  // degree-weighted urn
  std::vector<Index> urn;
  for (Index v = 1; v <= attach_m; ++v) {
    edges.push_back({0, v});
    urn.push_back(0);
    urn.push_back(v);
  }
  for (Index source = attach_m + 1; source < n; ++source) {
    std::set<Index> targets;
    std::uniform_int_distribution<std::size_t> pick(0, urn.size() - 1);
    while (static_cast<Index>(targets.size()) < attach_m) targets.insert(urn[pick(rng)]);
    for (Index t : targets) {
      edges.push_back({t, source});
      urn.push_back(t);
      urn.push_back(source);
    }
    out.attached_edges.push_back(attach_m);
  }
  out.graph = Graphd::from_edges(n, edges, uniform_features(n, feature_dim, rng));
  return out;
}

BarabasiAlbert barabasi_albert(Index n, Index attach_m, Index feature_dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return barabasi_albert(n, attach_m, feature_dim, rng);
}

Eigen::MatrixXi MotifSpec::adjacency() const {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(nodes, nodes);
  for (const Edge& e : edges) {
    a(e.u, e.v) = 1;
    a(e.v, e.u) = 1;
  }
  return a;
}

void MotifSpec::validate() const {
  if (nodes < 1 || nodes > 8) throw InvariantError("motif " + name + " must have 1..8 nodes");
  std::set<std::pair<Index, Index>> seen;
  for (const Edge& e : edges) {
    if (e.u < 0 || e.v < 0 || e.u >= nodes || e.v >= nodes || e.u == e.v) {
      throw InvariantError("motif " + name + " has an invalid edge");
    }
    if (!seen.insert({std::min(e.u, e.v), std::max(e.u, e.v)}).second) {
      throw InvariantError("motif " + name + " repeats an edge");
    }
  }
  const Graphd g = Graphd::from_edges(nodes, edges, Eigen::MatrixXd::Ones(nodes, 1));
  if (static_cast<Index>(bfs_ball(g, 0, nodes).size()) != nodes) {
    throw InvariantError("motif " + name + " is not connected");
  }
}

const std::vector<MotifSpec>& motif_library() {
  static const std::vector<MotifSpec> library = [] {
    std::vector<MotifSpec> m{
        // apex 0 over the pentagon 1-2-3-4-5
        {"House", 6, {{0, 1}, {0, 5}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}}},
        // path 0-1-2-3-4, handle 5 closing a triangle on 3-4
        {"Cup", 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {3, 5}, {4, 5}}},
        // hub 0, rim 1..5
        {"Wheel", 6, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}}},
        // triangle 0-1-2, one pendant per corner
        {"Crown", 6, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 4}, {2, 5}}},
        // two squares sharing the edge 1-4
        {"Book", 6, {{0, 1}, {1, 2}, {3, 4}, {4, 5}, {0, 3}, {1, 4}, {2, 5}}},
        {"Diamond", 4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}},
        {"Circle", 6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {0, 5}}},
        // hub 0 over the square 1-2-3-4
        {"Email", 5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {1, 2}, {2, 3}, {3, 4}, {1, 4}}},
    };
    for (const MotifSpec& s : m) s.validate();
    return m;
  }();
  return library;
}

const MotifSpec& motif(std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
  };
  const std::string key = lower(name);
  for (const MotifSpec& m : motif_library()) {
    if (lower(m.name) == key) return m;
  }
  throw ConfigError("unknown motif '" + std::string(name) + "'");
}

AttachedMotif attach_motif(const Graphd& base, const MotifSpec& motif, std::mt19937_64& rng,
                           Index anchor_count) {
  motif.validate();
  const Index n0 = base.size();
  const Index n = n0 + motif.nodes;
  Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n, n);
  adjacency.topLeftCorner(n0, n0) = base.adjacency();
  for (const Edge& e : motif.edges) {
    adjacency(n0 + e.u, n0 + e.v) = 1.0;
    adjacency(n0 + e.v, n0 + e.u) = 1.0;
  }
  AttachedMotif out;
  out.first_node = n0;
  if (anchor_count < 0 || anchor_count > n0) anchor_count = n0;
  if (anchor_count > 0) {
    std::uniform_int_distribution<Index> pick_base(0, anchor_count - 1);
    std::uniform_int_distribution<Index> pick_motif(0, motif.nodes - 1);
    const Index b = pick_base(rng);
    const Index m = n0 + pick_motif(rng);
    adjacency(b, m) = 1.0;
    adjacency(m, b) = 1.0;
    out.bridge = {b, m};
  }
  const Index d = std::max<Index>(base.feature_dim(), 1);
  Eigen::MatrixXd features(n, d);
  if (n0 > 0) features.topRows(n0) = base.features();
  features.bottomRows(motif.nodes) = uniform_features(motif.nodes, d, rng);
  out.graph = Graphd(std::move(adjacency), std::move(features));
  return out;
}

PlantedGraph pattern_mining_graph(const PatternGraphConfig& config) {
  if (config.copies < 0) throw ConfigError("motif copies must be non-negative");
  std::mt19937_64 rng(config.seed);
  PlantedGraph out;
  out.graph = barabasi_albert(config.base_nodes, config.attach_m, config.feature_dim, rng).graph;
  out.motif_of.assign(static_cast<std::size_t>(config.base_nodes), -1);
  out.base_nodes.resize(static_cast<std::size_t>(config.base_nodes));
  std::iota(out.base_nodes.begin(), out.base_nodes.end(), Index{0});
  std::vector<const MotifSpec*> specs;
  for (const std::string& name : config.motifs) specs.push_back(&motif(name));
  for (Index c = 0; c < config.copies; ++c) {
    for (std::size_t k = 0; k < specs.size(); ++k) {
      const MotifSpec& spec = *specs[k];
      AttachedMotif a = attach_motif(out.graph, spec, rng, config.base_nodes);
      out.graph = std::move(a.graph);
      out.motif_of.insert(out.motif_of.end(), static_cast<std::size_t>(spec.nodes),
                          static_cast<Index>(k));
    }
  }
  out.motifs = config.motifs;
  return out;
}

void stratified_split(std::span<const Index> labels, double train_fraction, double val_fraction,
                      std::uint64_t seed, std::vector<Index>& train, std::vector<Index>& val,
                      std::vector<Index>& test) {
  if (train_fraction < 0 || val_fraction < 0 || train_fraction + val_fraction > 1.0) {
    throw ConfigError("split fractions must be non-negative and sum to at most 1");
  }
  train.clear();
  val.clear();
  test.clear();
  Index classes = 0;
  for (Index y : labels) classes = std::max(classes, y + 1);
  std::mt19937_64 rng(seed);
  for (Index c = 0; c < classes; ++c) {
    std::vector<Index> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == c) members.push_back(static_cast<Index>(i));
    }
    std::shuffle(members.begin(), members.end(), rng);
    const auto count = static_cast<double>(members.size());
    const auto n_train = static_cast<std::size_t>(std::llround(count * train_fraction));
    const auto n_val = std::min(members.size() - n_train,
                                static_cast<std::size_t>(std::llround(count * val_fraction)));
    train.insert(train.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_train));
    val.insert(val.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train),
               members.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
    test.insert(test.end(), members.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), members.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(val.begin(), val.end());
  std::sort(test.begin(), test.end());
}

MotifDataset build_motif_classification_dataset(const MotifDatasetConfig& config) {
  if (config.motifs.empty()) throw ConfigError("at least one motif kind is required");
  const auto classes = static_cast<Index>(config.motifs.size());
  if (config.count < classes) throw ConfigError("fewer graphs than classes");
  std::vector<const MotifSpec*> specs;
  for (const std::string& name : config.motifs) specs.push_back(&motif(name));
  MotifDataset out;
  out.classes = config.motifs;
  out.graphs.reserve(static_cast<std::size_t>(config.count));
  for (Index i = 0; i < config.count; ++i) {
    const Index label = i % classes;
    std::mt19937_64 rng = derived_rng(config.seed, static_cast<std::uint64_t>(i));
    const Graphd base = barabasi_albert(config.base_nodes, config.attach_m, config.feature_dim, rng).graph;
    AttachedMotif a = attach_motif(base, *specs[static_cast<std::size_t>(label)], rng);
    out.graphs.push_back(std::move(a.graph));
    out.labels.push_back(label);
    out.motif_start.push_back(a.first_node);
  }
  stratified_split(out.labels, config.train_fraction, config.val_fraction, config.seed, out.train,
                   out.val, out.test);
  return out;
}

}  // namespace gomk
