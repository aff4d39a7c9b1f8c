#include "gomk/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gomk/isomorphism.hpp"
#include "gomk/omk.hpp"
#include "gomk/parallel.hpp"

namespace gomk {

namespace {

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

double accuracy(const GomkcnModel::BatchResult& r) {
  return r.count > 0 ? static_cast<double>(r.correct) / static_cast<double>(r.count) : 0.0;
}

}  // namespace

std::pair<double, double> mean_stddev(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return {mean, std::sqrt(var / static_cast<double>(values.size()))};
}

// ---------------------------------------------------------------- iso learning

void IsoConfig::validate() const {
  if (nodes < 1 || feature_dim < 1) throw ConfigError("iso: nodes and feature_dim must be positive");
  if (p.empty()) throw ConfigError("iso: empty p grid");
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("iso: p must lie in [0, 1]");
  }
  if (seeds < 1) throw ConfigError("iso: seeds must be positive");
  if (t < 0) throw ConfigError("iso: t must be non-negative");
  if (!(tau > 0.0)) throw ConfigError("iso: tau must be positive");
  TrainConfig{.epochs = epochs, .learning_rate = learning_rate}.validate();
}

std::optional<double> recovery_error(const Graphd& target, const GraphFilter& filter) {
  const Eigen::MatrixXi a = threshold_adjacency(target.adjacency());
  const Eigen::MatrixXi b = threshold_adjacency(filter.adjacency());
  double best = std::numeric_limits<double>::infinity();
  const Eigen::MatrixXd& ft = target.features();
  const Eigen::MatrixXd& ff = filter.features();
  for_each_isomorphism(a, b, [&](const std::vector<Index>& map) {
    double err = 0.0;
    for (Index i = 0; i < ft.rows(); ++i) err += (ft.row(i) - ff.row(map[static_cast<std::size_t>(i)])).cwiseAbs().sum();
    best = std::min(best, err / static_cast<double>(ft.size()));
    return false;
  });
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

Graphd iso_target(const IsoConfig& config, double p, int replicate) {
  std::mt19937_64 rng = stream(config.seed, static_cast<std::uint64_t>(std::llround(p * 1e6)),
                               static_cast<std::uint64_t>(replicate));
  std::bernoulli_distribution edge(p);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Index n = config.nodes;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) a(i, j) = a(j, i) = edge(rng) ? 1.0 : 0.0;
  }
  Eigen::MatrixXd f(n, config.feature_dim);
  for (Index k = 0; k < f.size(); ++k) f.data()[k] = config.ones_features ? 1.0 : u(rng);
  return Graphd(std::move(a), std::move(f));
}

IsoReport run_iso_learning(const IsoConfig& config, int threads) {
  config.validate();
  const Index per_p = config.seeds;
  const Index total = static_cast<Index>(config.p.size()) * per_p;
  IsoReport report;
  report.runs.resize(static_cast<std::size_t>(total));
  const TrainConfig train{.epochs = config.epochs, .learning_rate = config.learning_rate};

  parallel_for(total, threads, [&](Index begin, Index end, int) {
    for (Index k = begin; k < end; ++k) {
      IsoRun& run = report.runs[static_cast<std::size_t>(k)];
      run.p = config.p[static_cast<std::size_t>(k / per_p)];
      run.replicate = static_cast<int>(k % per_p);
      run.target = iso_target(config, run.p, run.replicate);
      std::mt19937_64 rng = stream(config.seed ^ 0x9e3779b97f4a7c15ULL,
                                   static_cast<std::uint64_t>(std::llround(run.p * 1e6)),
                                   static_cast<std::uint64_t>(run.replicate));
      GraphFilter init = GraphFilter::random(config.nodes, config.feature_dim, true, rng);
      IsoTrainResult r = train_iso(run.target, std::move(init), config.t, config.tau, train);
      run.filter = std::move(r.filter);
      run.kappa = std::move(r.kappa);
      const std::optional<double> mae = recovery_error(run.target, run.filter);
      run.recovered = mae.has_value();
      run.feature_mae = mae.value_or(std::numeric_limits<double>::quiet_NaN());
    }
  });

  const double bound = static_cast<double>(config.nodes * (config.t + 1));
  double mae_sum = 0.0;
  for (double p : config.p) {
    IsoSummary s{.p = p};
    double sum = 0.0;
    for (const IsoRun& run : report.runs) {
      if (run.p != p) continue;
      ++s.runs;
      if (!run.recovered) continue;
      ++s.recovered;
      sum += run.feature_mae;
      if (run.kappa.back() >= 0.99 * bound) ++report.kappa_near_bound;
      report.max_mae = std::max(report.max_mae, run.feature_mae);
    }
    s.mean_mae = s.recovered ? sum / s.recovered : std::numeric_limits<double>::quiet_NaN();
    report.recovered += s.recovered;
    mae_sum += sum;
    report.per_p.push_back(s);
  }
  report.recovery_rate = static_cast<double>(report.recovered) / static_cast<double>(total);
  report.mean_mae = report.recovered ? mae_sum / report.recovered : std::numeric_limits<double>::quiet_NaN();
  return report;
}

// -------------------------------------------------------------- pattern mining

void PatternConfig::validate() const {
  if (filters < 1) throw ConfigError("patterns: filters must be positive");
  if (graph.motifs.empty()) throw ConfigError("patterns: no motifs to plant");
  LayerConfig{.filters = filters, .filter_nodes = filter_nodes, .hops = hops, .t = t, .tau = tau, .size = size}
      .validate();
  TrainConfig{.epochs = epochs, .learning_rate = learning_rate}.validate();
}

PatternReport run_pattern_mining(const PatternConfig& config, int threads) {
  config.validate();
  PatternReport report;
  report.graph = pattern_mining_graph(config.graph);
  const Graphd& g = report.graph.graph;
  const LayerConfig layer{.filters = config.filters, .filter_nodes = config.filter_nodes, .hops = config.hops,
                          .t = config.t, .tau = config.tau, .size = config.size};
  const std::vector<SubgraphPlan> plans = plan_subgraphs(g, layer);
  std::vector<SubgraphEmbedding<double>> subs(plans.size());
  parallel_for(static_cast<Index>(plans.size()), threads, [&](Index begin, Index end, int) {
    for (Index i = begin; i < end; ++i) {
      subs[static_cast<std::size_t>(i)] = embed_subgraph(plans[static_cast<std::size_t>(i)], g.features(), config.t);
    }
  });

  std::mt19937_64 rng(config.seed);
  std::vector<GraphFilter> filters;
  for (Index j = 0; j < config.filters; ++j) {
    filters.push_back(GraphFilter::random(config.filter_nodes, g.feature_dim(), true, rng));
  }
  const TrainConfig train{.epochs = config.epochs, .learning_rate = config.learning_rate, .threads = threads};
  PatternTrainResult r = train_patterns(subs, std::move(filters), config.tau, train);
  report.filters = std::move(r.filters);
  report.loss = std::move(r.loss);
  report.assignment = std::move(r.assignment);
  report.counts.assign(static_cast<std::size_t>(config.filters), 0);
  for (Index a : report.assignment) ++report.counts[static_cast<std::size_t>(a)];

  std::vector<char> found(report.graph.motifs.size(), 0);
  for (const GraphFilter& f : report.filters) {
    const Eigen::MatrixXi h = threshold_adjacency(f.adjacency());
    std::string name;
    for (std::size_t k = 0; k < report.graph.motifs.size(); ++k) {
      const MotifSpec& spec = motif(report.graph.motifs[k]);
      if (spec.nodes == f.size() && isomorphic(h, spec.adjacency())) {
        name = spec.name;
        found[k] = 1;
        break;
      }
    }
    report.matched.push_back(name);
  }
  for (std::size_t k = 0; k < found.size(); ++k) {
    if (found[k]) report.recovered.push_back(motif(report.graph.motifs[k]).name);
  }
  return report;
}

// ------------------------------------------------------- motif classification

void MotifClassifyConfig::validate() const {
  layer.validate();
  train.validate();
  if (data.count < static_cast<Index>(data.motifs.size())) throw ConfigError("motif: fewer graphs than classes");
  if (response_graphs < 0) throw ConfigError("motif: response_graphs must be non-negative");
}

MotifClassifyReport run_motif_classification(const MotifClassifyConfig& config, int threads,
                                             const std::function<void(const EpochMetrics&)>& on_epoch) {
  config.validate();
  MotifClassifyReport report;
  report.dataset = build_motif_classification_dataset(config.data);
  const MotifDataset& ds = report.dataset;

  ModelConfig mc;
  mc.task = Task::graph;
  mc.layers = {config.layer};
  mc.pooling = config.pooling;
  mc.classifier_hidden = config.classifier_hidden;
  mc.classes = static_cast<Index>(ds.classes.size());
  report.model = GomkcnModel(mc, config.data.feature_dim, config.train.seed);

  std::vector<GomkcnModel::Plan> plans(ds.graphs.size());
  parallel_for(static_cast<Index>(ds.graphs.size()), threads, [&](Index begin, Index end, int) {
    for (Index i = begin; i < end; ++i) plans[static_cast<std::size_t>(i)] = report.model.plan(ds.graphs[static_cast<std::size_t>(i)]);
  });
  auto samples = [&](const std::vector<Index>& idx) {
    std::vector<GomkcnModel::Sample> out;
    for (Index i : idx) {
      const auto k = static_cast<std::size_t>(i);
      out.push_back({&ds.graphs[k], &plans[k], {}, {ds.labels[k]}});
    }
    return out;
  };
  const auto train = samples(ds.train);
  const auto val = samples(ds.val);
  const auto test = samples(ds.test);

  TrainConfig tc = config.train;
  tc.threads = threads;
  report.training = train_classifier(report.model, train, val, tc, on_epoch);
  report.test_accuracy = accuracy(report.model.evaluate(test, threads));

  std::vector<Index> shown(ds.classes.size(), 0);
  for (Index i : ds.test) {
    const auto k = static_cast<std::size_t>(i);
    const Index label = ds.labels[k];
    if (shown[static_cast<std::size_t>(label)] >= config.response_graphs) continue;
    ++shown[static_cast<std::size_t>(label)];
    const Eigen::MatrixXd z = report.model.responses(ds.graphs[k], plans[k]);
    for (Index u = 0; u < z.rows(); ++u) {
      for (Index j = 0; j < z.cols(); ++j) {
        report.responses.push_back({i, label, u, u >= ds.motif_start[k], j, z(u, j)});
      }
    }
  }
  return report;
}

// -------------------------------------------------------- node classification

void NodeClassifyConfig::validate() const {
  if (front_dim < 0) throw ConfigError("node: front_dim must be non-negative");
  layer.validate();
  train.validate();
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("node: dropout must lie in [0, 1)");
  if (seeds.empty()) throw ConfigError("node: no seeds");
}

NodeClassifyReport run_node_classification(
    const NodeDataset& dataset, const NodeClassifyConfig& config, int threads,
    const std::function<void(std::size_t, const EpochMetrics&)>& on_epoch) {
  config.validate();
  dataset.split.validate(dataset.graph.size());
  NodeClassifyReport report;
  std::vector<double> accs;
  for (std::size_t r = 0; r < config.seeds.size(); ++r) {
    const std::uint64_t seed = config.seeds[r];
    ModelConfig mc;
    mc.task = Task::node;
    if (config.front_dim > 0) mc.front_sizes = {config.front_dim};
    mc.layers = {config.layer};
    mc.classifier_hidden = config.classifier_hidden;
    mc.classes = dataset.classes;
    mc.dropout = config.dropout;
    GomkcnModel model(mc, dataset.graph.feature_dim(), seed);
    const GomkcnModel::Plan plan = model.plan(dataset.graph);

    // each sample carries one mini-batch of nodes from a seeded partition
    auto chunks = [&](std::vector<Index> idx, bool shuffle) {
      if (shuffle) {
        std::mt19937_64 rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
      }
      std::vector<GomkcnModel::Sample> out;
      for (std::size_t b = 0; b < idx.size(); b += static_cast<std::size_t>(config.train.batch_size)) {
        GomkcnModel::Sample s{&dataset.graph, &plan, {}, {}};
        const std::size_t e = std::min(idx.size(), b + static_cast<std::size_t>(config.train.batch_size));
        for (std::size_t k = b; k < e; ++k) {
          s.nodes.push_back(idx[k]);
          s.labels.push_back(dataset.labels[static_cast<std::size_t>(idx[k])]);
        }
        out.push_back(std::move(s));
      }
      return out;
    };
    const auto train = chunks(dataset.split.train, true);
    const auto val = chunks(dataset.split.val, false);
    const auto test = chunks(dataset.split.test, false);

    TrainConfig tc = config.train;
    tc.seed = seed;
    tc.threads = threads;
    tc.batch_size = 1;
    NodeRun run;
    run.seed = seed;
    run.training = train_classifier(model, train, val, tc, [&](const EpochMetrics& m) {
      if (on_epoch) on_epoch(r, m);
    });
    run.test_accuracy = accuracy(model.evaluate(test, threads));
    accs.push_back(run.test_accuracy);
    report.runs.push_back(std::move(run));
  }
  std::tie(report.mean, report.stddev) = mean_stddev(accs);
  return report;
}

// ------------------------------------------------------- graph classification

std::vector<GraphModelConfig> GraphGrid::expand(const GraphModelConfig& base) const {
  std::vector<GraphModelConfig> out;
  for (Index f : filters) {
    for (Index nodes : filter_nodes) {
      for (Index dim : front_dim) {
        for (double drop : dropout) {
          for (Index h : hops) {
            for (Index steps : t) {
              for (Pooling pool : pooling) {
                GraphModelConfig c = base;
                c.layer.filters = f;
                c.layer.filter_nodes = nodes;
                c.front_dim = dim;
                c.dropout = drop;
                c.layer.hops = h;
                c.layer.t = steps;
                c.pooling = pool;
                out.push_back(c);
              }
            }
          }
        }
      }
    }
  }
  if (out.empty()) throw ConfigError("graph: empty hyperparameter grid");
  return out;
}

void GraphClassifyConfig::validate() const {
  model.layer.validate();
  if (model.front_dim < 0) throw ConfigError("graph: front_dim must be non-negative");
  if (!(model.dropout >= 0.0 && model.dropout < 1.0)) throw ConfigError("graph: dropout must lie in [0, 1)");
  train.validate();
  if (folds < 2) throw ConfigError("graph: at least two folds are needed");
}

GraphDataset graph_dataset(TuDataset tu) {
  return {std::move(tu.name), std::move(tu.graphs), std::move(tu.labels), tu.classes};
}

GraphClassifyReport run_graph_classification(
    const GraphDataset& dataset, const GraphClassifyConfig& config, int threads,
    const std::function<void(Index, std::size_t, const EpochMetrics&)>& on_epoch) {
  config.validate();
  const auto n = static_cast<Index>(dataset.graphs.size());
  if (n == 0) throw DataError("graph: empty dataset");
  const Index input_dim = dataset.graphs.front().feature_dim();
  const std::vector<GraphModelConfig> candidates =
      config.grid ? config.grid->expand(config.model) : std::vector<GraphModelConfig>{config.model};
  const std::vector<Split> folds = kfold_splits(n, config.folds, config.seed);

  GraphClassifyReport report;
  std::vector<double> accs;
  for (std::size_t fi = 0; fi < folds.size(); ++fi) {
    const Split& split = folds[fi];
    FoldResult best;
    best.fold = static_cast<Index>(fi);
    best.val_accuracy = -1.0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const GraphModelConfig& cand = candidates[c];
      ModelConfig mc;
      mc.task = Task::graph;
      if (cand.front_dim > 0) mc.front_sizes = {cand.front_dim};
      mc.layers = {cand.layer};
      mc.pooling = cand.pooling;
      mc.classifier_hidden = cand.classifier_hidden;
      mc.classes = dataset.classes;
      mc.dropout = cand.dropout;
      GomkcnModel model(mc, input_dim, config.seed + fi);
      std::vector<GomkcnModel::Plan> plans(dataset.graphs.size());
      parallel_for(n, threads, [&](Index begin, Index end, int) {
        for (Index i = begin; i < end; ++i) plans[static_cast<std::size_t>(i)] = model.plan(dataset.graphs[static_cast<std::size_t>(i)]);
      });
      auto samples = [&](const std::vector<Index>& idx) {
        std::vector<GomkcnModel::Sample> out;
        for (Index i : idx) {
          const auto k = static_cast<std::size_t>(i);
          out.push_back({&dataset.graphs[k], &plans[k], {}, {dataset.labels[k]}});
        }
        return out;
      };
      const auto train = samples(split.train);
      const auto val = samples(split.val);
      const auto test = samples(split.test);
      TrainConfig tc = config.train;
      tc.seed = config.seed + fi;
      tc.threads = threads;
      const ClassifierTrainResult r = train_classifier(model, train, val, tc, [&](const EpochMetrics& m) {
        if (on_epoch) on_epoch(static_cast<Index>(fi), c, m);
      });
      if (r.best_val_accuracy > best.val_accuracy) {
        best.val_accuracy = r.best_val_accuracy;
        best.selected = cand;
        best.test_accuracy = accuracy(model.evaluate(test, threads));
      }
    }
    accs.push_back(best.test_accuracy);
    report.folds.push_back(std::move(best));
  }
  std::tie(report.mean, report.stddev) = mean_stddev(accs);
  return report;
}

}  // namespace gomk
