// gomk: command-line driver for the experiments, the kernel and the invariant suite.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gomk/checks.hpp"
#include "gomk/config.hpp"
#include "gomk/data_io.hpp"
#include "gomk/experiments.hpp"
#include "gomk/export.hpp"
#include "gomk/omk.hpp"

namespace {

using nlohmann::json;
using namespace gomk;

struct Common {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  int threads = 1;
  std::vector<std::string> overrides;
};

struct Gate {
  std::string name;
  bool passed = false;
  std::string detail;
};

void log(const std::string& msg) { std::cerr << msg << std::endl; }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::optional<json> load_config_file(const Common& c) {
  if (c.config_path.empty()) return std::nullopt;
  json j = json::parse(read_text(c.config_path), nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file " + c.config_path + " is not valid JSON");
  return j;
}

template <typename T>
T resolve(const T& defaults, const Common& c, json& resolved) {
  const std::optional<json> file = load_config_file(c);
  return resolve_config(defaults, file ? &*file : nullptr, c.overrides, resolved);
}

fs::path out_dir(const Common& c, const std::string& sub) {
  fs::path dir = c.out.empty() ? fs::path("runs") / sub : fs::path(c.out);
  fs::create_directories(dir);
  return dir;
}

/// Writes summary.json, prints the gates and returns the exit code.
int finish(const fs::path& dir, json summary, const std::vector<Gate>& gates) {
  json list = json::array();
  bool ok = true;
  for (const Gate& g : gates) {
    std::cout << (g.passed ? "PASS " : "FAIL ") << g.name << ": " << g.detail << "\n";
    list.push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
    ok = ok && g.passed;
  }
  summary["acceptance"] = list;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return ok ? 0 : 1;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return s;
}

// ---------------------------------------------------------------- subcommands

int cmd_iso_learn(const Common& c) {
  json resolved;
  IsoConfig cfg = resolve(IsoConfig{}, c, resolved);
  cfg.seed = c.seed;
  const fs::path dir = out_dir(c, "iso-learn");
  log("iso-learn: " + std::to_string(cfg.p.size() * static_cast<std::size_t>(cfg.seeds)) + " runs");
  const IsoReport r = run_iso_learning(cfg, c.threads);

  CsvWriter metrics(dir / "metrics.csv", {"p", "replicate", "epoch", "kappa"});
  CsvWriter runs(dir / "runs.csv", {"p", "replicate", "recovered", "feature_mae", "final_kappa"});
  std::vector<GraphFilter> shown;
  for (const IsoRun& run : r.runs) {
    for (std::size_t e = 0; e < run.kappa.size(); ++e) metrics.row(run.p, run.replicate, e, run.kappa[e]);
    runs.row(run.p, run.replicate, run.recovered ? 1 : 0, run.feature_mae, run.kappa.back());
    const std::string name = "p" + fmt("%.2f", run.p) + "_r" + std::to_string(run.replicate);
    write_text(dir / "filters" / (name + ".dot"), filter_dot(run.filter, name));
    write_text(dir / "targets" / (name + ".dot"), filter_dot(GraphFilter::from_graph(run.target, true), name));
  }

  json per_p = json::array();
  for (const IsoSummary& s : r.per_p) {
    per_p.push_back({{"p", s.p}, {"runs", s.runs}, {"recovered", s.recovered},
                     {"mean_feature_mae", std::isnan(s.mean_mae) ? json(nullptr) : json(s.mean_mae)}});
    log("p=" + fmt("%.2f", s.p) + " recovered " + std::to_string(s.recovered) + "/" + std::to_string(s.runs));
  }
  const json summary{{"command", "iso-learn"},
                     {"seed", c.seed},
                     {"config", resolved},
                     {"per_p", per_p},
                     {"recovery_rate", r.recovery_rate},
                     {"mean_feature_mae", r.recovered ? json(r.mean_mae) : json(nullptr)},
                     {"max_feature_mae", r.max_mae},
                     {"kappa_within_1pct_of_bound", r.kappa_near_bound}};
  const bool pass = r.recovery_rate >= 0.9 && r.recovered > 0 && r.max_mae < 0.05;
  return finish(dir, summary,
                {{"isomorphic graph learning", pass,
                  "recovery " + fmt("%.3f", r.recovery_rate) + " (>= 0.9), max feature MAE on recovered runs " +
                      fmt("%.4f", r.max_mae) + " (< 0.05)"}});
}

int cmd_mine_patterns(const Common& c) {
  json resolved;
  PatternConfig cfg = resolve(PatternConfig{}, c, resolved);
  cfg.seed = c.seed;
  cfg.graph.seed = c.seed;
  const fs::path dir = out_dir(c, "mine-patterns");
  log("mine-patterns: " + std::to_string(cfg.epochs) + " epochs");
  const PatternReport r = run_pattern_mining(cfg, c.threads);

  CsvWriter metrics(dir / "metrics.csv", {"epoch", "loss"});
  for (std::size_t e = 0; e < r.loss.size(); ++e) metrics.row(e, r.loss[e]);
  write_filter_dots(dir / "filters", r.filters);
  CsvWriter assign(dir / "assignments.csv", {"node", "planted", "filter"});
  for (std::size_t u = 0; u < r.assignment.size(); ++u) {
    const Index kind = r.graph.motif_of[u];
    assign.row(u, kind < 0 ? std::string("base") : r.graph.motifs[static_cast<std::size_t>(kind)], r.assignment[u]);
  }
  json filters = json::array();
  for (std::size_t j = 0; j < r.filters.size(); ++j) {
    filters.push_back({{"filter", j}, {"count", r.counts[j]}, {"matches", r.matched[j]}});
  }
  const json summary{{"command", "mine-patterns"}, {"seed", c.seed},      {"config", resolved},
                     {"filters", filters},         {"recovered", r.recovered},
                     {"final_loss", r.loss.empty() ? 0.0 : r.loss.back()}};
  const auto planted = cfg.graph.motifs.size();
  std::string names;
  for (const std::string& n : r.recovered) names += (names.empty() ? "" : ",") + n;
  return finish(dir, summary,
                {{"frequent pattern mining", r.recovered.size() == planted,
                  std::to_string(r.recovered.size()) + "/" + std::to_string(planted) + " planted motifs recovered [" +
                      names + "]"}});
}

void write_epochs(CsvWriter& csv, const EpochMetrics& m) {
  csv.row(m.epoch, m.train_loss, m.train_accuracy, m.val_loss, m.val_accuracy);
}

int cmd_motif_classify(const Common& c) {
  json resolved;
  MotifClassifyConfig cfg = resolve(MotifClassifyConfig{}, c, resolved);
  cfg.data.seed = c.seed;
  cfg.train.seed = c.seed;
  const fs::path dir = out_dir(c, "motif-classify");
  CsvWriter metrics(dir / "metrics.csv", {"epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy"});
  const auto start = std::chrono::steady_clock::now();
  const MotifClassifyReport r = run_motif_classification(cfg, c.threads, [&](const EpochMetrics& m) {
    write_epochs(metrics, m);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    log("epoch " + std::to_string(m.epoch) + " loss " + fmt("%.4f", m.train_loss) + " val acc " +
        fmt("%.4f", m.val_accuracy) + " (" + fmt("%.0f", secs) + " s)");
  });
  CsvWriter responses(dir / "responses.csv", {"graph", "label", "node", "in_motif", "filter", "kappa"});
  for (const ResponseRow& row : r.responses) {
    responses.row(row.graph, row.label, row.node, row.in_motif ? 1 : 0, row.filter, row.kappa);
  }
  write_filter_dots(dir / "filters", r.model.layers().front().filters());
  write_text(dir / "checkpoint.json", checkpoint_json(r.model, resolved, r.training.best_epoch, c.seed).dump() + "\n");
  const json summary{{"command", "motif-classify"},
                     {"seed", c.seed},
                     {"config", resolved},
                     {"best_epoch", r.training.best_epoch},
                     {"best_val_accuracy", r.training.best_val_accuracy},
                     {"test_accuracy", r.test_accuracy}};
  return finish(dir, summary,
                {{"motif classification", r.test_accuracy >= 0.99,
                  "test accuracy " + fmt("%.4f", r.test_accuracy) + " (>= 0.99)"}});
}

int cmd_node_classify(const Common& c, const std::string& data) {
  if (data.empty()) throw ConfigError("node-classify needs --data pointing at a dataset manifest");
  json resolved;
  NodeClassifyConfig cfg = resolve(NodeClassifyConfig{}, c, resolved);
  const NodeDataset ds = load_node_dataset(data);
  const fs::path dir = out_dir(c, "node-classify");
  log("node-classify: " + ds.name + ", " + std::to_string(ds.graph.size()) + " nodes");
  CsvWriter metrics(dir / "metrics.csv",
                    {"run", "epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy"});
  const NodeClassifyReport r = run_node_classification(ds, cfg, c.threads, [&](std::size_t run, const EpochMetrics& m) {
    metrics.row(run, m.epoch, m.train_loss, m.train_accuracy, m.val_loss, m.val_accuracy);
  });
  json runs = json::array();
  for (const NodeRun& run : r.runs) {
    runs.push_back({{"seed", run.seed}, {"best_epoch", run.training.best_epoch}, {"test_accuracy", run.test_accuracy}});
  }
  const json summary{{"command", "node-classify"}, {"dataset", ds.name}, {"config", resolved},
                     {"runs", runs},               {"mean", r.mean},     {"std", r.stddev}};
  std::vector<Gate> gates;
  if (lower(ds.name) == "citeseer") {
    gates.push_back({"Citeseer parity", std::abs(100.0 * r.mean - 77.70) <= 2.0,
                     "accuracy " + fmt("%.2f", 100.0 * r.mean) + " (77.70 +- 2.0)"});
  }
  log("accuracy " + fmt("%.4f", r.mean) + " +- " + fmt("%.4f", r.stddev));
  return finish(dir, summary, gates);
}

int cmd_graph_classify(const Common& c, const std::string& data, const std::string& name) {
  if (data.empty()) throw ConfigError("graph-classify needs --data pointing at a TU dataset directory");
  json resolved;
  GraphClassifyConfig cfg = resolve(GraphClassifyConfig{}, c, resolved);
  cfg.seed = c.seed;
  const GraphDataset ds = graph_dataset(load_tudataset(data, name));
  const fs::path dir = out_dir(c, "graph-classify");
  log("graph-classify: " + ds.name + ", " + std::to_string(ds.graphs.size()) + " graphs");
  CsvWriter metrics(dir / "metrics.csv",
                    {"fold", "candidate", "epoch", "train_loss", "train_accuracy", "val_loss", "val_accuracy"});
  const GraphClassifyReport r =
      run_graph_classification(ds, cfg, c.threads, [&](Index fold, std::size_t cand, const EpochMetrics& m) {
        metrics.row(fold, cand, m.epoch, m.train_loss, m.train_accuracy, m.val_loss, m.val_accuracy);
      });
  json folds = json::array();
  for (const FoldResult& f : r.folds) {
    folds.push_back({{"fold", f.fold}, {"selected", f.selected}, {"val_accuracy", f.val_accuracy},
                     {"test_accuracy", f.test_accuracy}});
    log("fold " + std::to_string(f.fold) + " test accuracy " + fmt("%.4f", f.test_accuracy));
  }
  const json summary{{"command", "graph-classify"}, {"dataset", ds.name}, {"config", resolved},
                     {"folds", folds},              {"mean", r.mean},     {"std", r.stddev}};
  std::vector<Gate> gates;
  if (lower(ds.name) == "enzymes") {
    gates.push_back({"ENZYMES parity", std::abs(100.0 * r.mean - 67.00) <= 6.1,
                     "accuracy " + fmt("%.2f", 100.0 * r.mean) + " (67.00 +- 6.1)"});
  }
  return finish(dir, summary, gates);
}

int cmd_kernel(const std::string& a, const std::string& b, Index t, double tau, const std::string& matcher,
               Index size) {
  Graphd ga = read_graph_bundle(a).graph;
  Graphd gb = read_graph_bundle(b).graph;
  const Index m = size > 0 ? size : std::max(ga.size(), gb.size());
  ga = pad_graph(ga, m);
  gb = pad_graph(gb, m);
  const std::string which = lower(matcher);
  if (which != "greedy" && which != "exact") throw ConfigError("matcher must be greedy or exact");
  const KernelValue<double> k = kernel(ga, gb, t, tau, which == "greedy" ? Matcher::greedy : Matcher::exact);
  json pairs = json::array();
  for (const auto& p : k.matching.pairs) pairs.push_back({p.x, p.y, p.similarity});
  std::cout << json{{"kappa", k.value}, {"matching", pairs}}.dump() << "\n";
  return 0;
}

int cmd_check(const Common& c) {
  std::vector<Gate> gates;
  for (const CheckResult& r : run_invariant_suite(c.seed)) gates.push_back({r.name, r.passed, r.detail});
  const fs::path dir = out_dir(c, "check");
  return finish(dir, json{{"command", "check"}, {"seed", c.seed}}, gates);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph optimal matching kernel networks: experiments, kernel evaluation and checks"};
  app.require_subcommand(1);
  Common common;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", common.seed, "random seed");
    sub->add_option("--out", common.out, "output directory (default runs/<subcommand>)");
    sub->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--set", common.overrides, "override a configuration key (dotted.key=value)");
  };

  auto* iso = app.add_subcommand("iso-learn", "learn filters isomorphic to random ground-truth graphs");
  auto* mine = app.add_subcommand("mine-patterns", "mine frequent patterns from the planted synthetic graph");
  auto* motif = app.add_subcommand("motif-classify", "train the interpretable motif classifier");
  auto* node = app.add_subcommand("node-classify", "node classification on a dataset manifest");
  auto* graph = app.add_subcommand("graph-classify", "graph classification with k-fold cross-validation");
  auto* kern = app.add_subcommand("kernel", "evaluate the kernel between two graph bundles");
  auto* check = app.add_subcommand("check", "run the invariant suite");
  for (auto* sub : {iso, mine, motif, node, graph, check}) add_common(sub);

  std::string data, dataset_name;
  node->add_option("--data", data, "dataset manifest JSON")->required();
  graph->add_option("--data", data, "TU dataset directory")->required();
  graph->add_option("--name", dataset_name, "dataset prefix (default: detected from *_A.txt)");

  std::string ka, kb, matcher = "greedy";
  Index kt = 3, ksize = 0;
  double ktau = 1.0;
  kern->add_option("first", ka, "graph bundle")->required()->check(CLI::ExistingFile);
  kern->add_option("second", kb, "graph bundle")->required()->check(CLI::ExistingFile);
  kern->add_option("--t", kt, "t-SE depth");
  kern->add_option("--tau", ktau, "RBF width");
  kern->add_option("--matcher", matcher, "greedy or exact");
  kern->add_option("--size", ksize, "standardized size (default: the larger graph)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*iso) return cmd_iso_learn(common);
    if (*mine) return cmd_mine_patterns(common);
    if (*motif) return cmd_motif_classify(common);
    if (*node) return cmd_node_classify(common, data);
    if (*graph) return cmd_graph_classify(common, data, dataset_name);
    if (*kern) return cmd_kernel(ka, kb, kt, ktau, matcher, ksize);
    if (*check) return cmd_check(common);
  } catch (const gomk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
