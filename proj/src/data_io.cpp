#include "gomk/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

namespace gomk {

using nlohmann::json;

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

namespace {

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(source + ": invalid JSON (" + e.what() + ")");
  }
}

template <typename T>
T field(const json& j, const char* key, const std::string& source) {
  if (!j.contains(key)) throw DataError(source + ": missing \"" + key + "\"");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(source + ": bad \"" + key + "\" (" + e.what() + ")");
  }
}

std::vector<Index> index_array(const json& j, const std::string& what) {
  try {
    return j.get<std::vector<Index>>();
  } catch (const json::exception&) {
    throw DataError(what + " must be an array of integers");
  }
}

}  // namespace

GraphBundle parse_graph_bundle(const std::string& text, const std::string& source) {
  const json j = parse_json(text, source);
  const auto n = field<Index>(j, "n", source);
  if (n < 0) throw DataError(source + ": negative node count");
  std::vector<Edge> edges;
  for (const auto& pair : field<std::vector<std::array<Index, 2>>>(j, "edges", source)) {
    Index u = pair[0], v = pair[1];
    if (u == v) throw DataError(source + ": self-loop on node " + std::to_string(u));
    if (u > v) std::swap(u, v);
    edges.push_back({u, v});
  }
  Eigen::MatrixXd features;
  if (j.contains("features")) {
    const auto rows = field<std::vector<std::vector<double>>>(j, "features", source);
    if (static_cast<Index>(rows.size()) != n) {
      throw DataError(source + ": " + std::to_string(rows.size()) + " feature rows for " +
                      std::to_string(n) + " nodes");
    }
    const Index d = rows.empty() ? 1 : static_cast<Index>(rows.front().size());
    features.resize(n, d);
    for (Index i = 0; i < n; ++i) {
      const auto& row = rows[static_cast<std::size_t>(i)];
      if (static_cast<Index>(row.size()) != d) throw DataError(source + ": ragged feature rows");
      for (Index c = 0; c < d; ++c) features(i, c) = row[static_cast<std::size_t>(c)];
    }
  } else {
    features = Eigen::MatrixXd::Ones(n, 1);
  }
  GraphBundle out;
  try {
    out.graph = Graphd::from_edges(n, edges, std::move(features));
  } catch (const Error& e) {
    throw DataError(source + ": " + e.what());
  }
  if (j.contains("labels") && !j.at("labels").is_null()) {
    out.labels = index_array(j.at("labels"), source + ": labels");
  }
  return out;
}

GraphBundle read_graph_bundle(const fs::path& path) {
  return parse_graph_bundle(read_text(path), path.string());
}

std::string graph_bundle_json(const Graphd& graph, const std::vector<Index>& labels) {
  json j;
  j["n"] = graph.size();
  json edges = json::array();
  for (const Edge& e : graph.edges()) edges.push_back({e.u, e.v});
  j["edges"] = std::move(edges);
  json features = json::array();
  for (Index i = 0; i < graph.size(); ++i) {
    json row = json::array();
    for (Index c = 0; c < graph.feature_dim(); ++c) row.push_back(graph.features()(i, c));
    features.push_back(std::move(row));
  }
  j["features"] = std::move(features);
  if (!labels.empty()) j["labels"] = labels;
  return j.dump();
}

void write_graph_bundle(const fs::path& path, const Graphd& graph, const std::vector<Index>& labels) {
  write_text(path, graph_bundle_json(graph, labels));
}

namespace {

struct LineReader {
  fs::path path;
  std::ifstream in;
  long long line_no = 0;
  std::string line;

  explicit LineReader(fs::path p) : path(std::move(p)), in(path) {
    if (!in) throw DataError("cannot open " + path.string());
  }

  bool next() {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(path.string(), static_cast<std::size_t>(line_no), what);
  }

  std::vector<std::string_view> fields() const {
    std::vector<std::string_view> out;
    std::string_view s(line);
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = s.find(',', start);
      std::string_view tok = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
      while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
      while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t')) tok.remove_suffix(1);
      out.push_back(tok);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return out;
  }

  long long integer(std::string_view tok) const {
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) fail("expected an integer, got '" + std::string(tok) + "'");
    return v;
  }

  double real(std::string_view tok) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(std::string(tok), &used);
      if (used != tok.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      fail("expected a number, got '" + std::string(tok) + "'");
    }
  }
};

std::string detect_name(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) throw DataError(dir.string() + " is not a directory");
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string file = entry.path().filename().string();
    const std::string suffix = "_A.txt";
    if (file.size() > suffix.size() && file.ends_with(suffix)) {
      names.push_back(file.substr(0, file.size() - suffix.size()));
    }
  }
  if (names.size() != 1) {
    throw DataError(dir.string() + ": expected exactly one *_A.txt file, found " + std::to_string(names.size()));
  }
  return names.front();
}

}  // namespace

TuDataset load_tudataset(const fs::path& dir, std::string name) {
  if (name.empty()) name = detect_name(dir);
  const auto file = [&](const char* suffix) { return dir / (name + suffix); };

  TuDataset ds;
  ds.name = name;

  // node -> graph (1-based ids in the file)
  std::vector<Index> graph_of;
  {
    LineReader r(file("_graph_indicator.txt"));
    long long last = 0;
    while (r.next()) {
      const long long gid = r.integer(r.fields().front());
      if (gid < 1) r.fail("graph ids start at 1");
      if (gid != last && gid != last + 1) {
        r.fail("graph indicator is not contiguous (" + std::to_string(last) + " followed by " +
               std::to_string(gid) + ")");
      }
      last = gid;
      graph_of.push_back(static_cast<Index>(gid - 1));
    }
    if (graph_of.empty()) r.fail("no nodes");
  }
  const auto total_nodes = static_cast<Index>(graph_of.size());
  const Index graph_count = graph_of.back() + 1;
  std::vector<Index> first(static_cast<std::size_t>(graph_count) + 1, 0);
  for (Index v = 0; v < total_nodes; ++v) first[static_cast<std::size_t>(graph_of[static_cast<std::size_t>(v)]) + 1]++;
  std::partial_sum(first.begin(), first.end(), first.begin());

  {
    LineReader r(file("_graph_labels.txt"));
    while (r.next()) ds.raw_labels.push_back(r.integer(r.fields().front()));
    if (static_cast<Index>(ds.raw_labels.size()) != graph_count) {
      r.fail(std::to_string(ds.raw_labels.size()) + " graph labels for " + std::to_string(graph_count) + " graphs");
    }
  }
  std::map<long long, Index> label_ids;
  for (long long y : ds.raw_labels) label_ids.emplace(y, 0);
  {
    Index next = 0;
    for (auto& [raw, id] : label_ids) id = next++;
  }
  for (long long y : ds.raw_labels) ds.labels.push_back(label_ids.at(y));
  ds.classes = static_cast<Index>(label_ids.size());

  Eigen::MatrixXd attributes;
  if (fs::exists(file("_node_attributes.txt"))) {
    LineReader r(file("_node_attributes.txt"));
    std::vector<std::vector<double>> rows;
    while (r.next()) {
      std::vector<double> row;
      for (std::string_view tok : r.fields()) row.push_back(r.real(tok));
      if (!rows.empty() && row.size() != rows.front().size()) r.fail("ragged node attributes");
      rows.push_back(std::move(row));
    }
    if (static_cast<Index>(rows.size()) != total_nodes) {
      r.fail(std::to_string(rows.size()) + " attribute rows for " + std::to_string(total_nodes) + " nodes");
    }
    ds.attribute_dim = static_cast<Index>(rows.front().size());
    attributes.resize(total_nodes, ds.attribute_dim);
    for (Index v = 0; v < total_nodes; ++v) {
      for (Index c = 0; c < ds.attribute_dim; ++c) {
        attributes(v, c) = rows[static_cast<std::size_t>(v)][static_cast<std::size_t>(c)];
      }
    }
  }

  std::vector<Index> node_label;
  if (fs::exists(file("_node_labels.txt"))) {
    LineReader r(file("_node_labels.txt"));
    std::vector<long long> raw;
    while (r.next()) raw.push_back(r.integer(r.fields().front()));
    if (static_cast<Index>(raw.size()) != total_nodes) {
      r.fail(std::to_string(raw.size()) + " node labels for " + std::to_string(total_nodes) + " nodes");
    }
    std::map<long long, Index> ids;
    for (long long y : raw) ids.emplace(y, 0);
    Index next = 0;
    for (auto& [k, id] : ids) id = next++;
    for (long long y : raw) node_label.push_back(ids.at(y));
    ds.node_label_dim = next;
  }

  std::vector<std::set<std::pair<Index, Index>>> edges(static_cast<std::size_t>(graph_count));
  {
    LineReader r(file("_A.txt"));
    while (r.next()) {
      const auto f = r.fields();
      if (f.size() != 2) r.fail("expected two comma-separated node ids");
      const long long a = r.integer(f[0]);
      const long long b = r.integer(f[1]);
      for (long long x : {a, b}) {
        if (x < 1 || x > total_nodes) {
          r.fail("node id " + std::to_string(x) + " outside 1.." + std::to_string(total_nodes));
        }
      }
      const auto u = static_cast<Index>(a - 1);
      const auto v = static_cast<Index>(b - 1);
      const Index g = graph_of[static_cast<std::size_t>(u)];
      if (graph_of[static_cast<std::size_t>(v)] != g) r.fail("edge joins nodes of different graphs");
      if (u == v) continue;
      const Index base = first[static_cast<std::size_t>(g)];
      edges[static_cast<std::size_t>(g)].insert({std::min(u, v) - base, std::max(u, v) - base});
    }
  }

  const Index d = ds.attribute_dim + ds.node_label_dim;
  for (Index g = 0; g < graph_count; ++g) {
    const Index base = first[static_cast<std::size_t>(g)];
    const Index n = first[static_cast<std::size_t>(g) + 1] - base;
    Eigen::MatrixXd features = d == 0 ? Eigen::MatrixXd::Ones(n, 1) : Eigen::MatrixXd::Zero(n, d);
    if (ds.attribute_dim > 0) features.leftCols(ds.attribute_dim) = attributes.middleRows(base, n);
    if (ds.node_label_dim > 0) {
      for (Index i = 0; i < n; ++i) features(i, ds.attribute_dim + node_label[static_cast<std::size_t>(base + i)]) = 1.0;
    }
    std::vector<Edge> list;
    for (const auto& [u, v] : edges[static_cast<std::size_t>(g)]) list.push_back({u, v});
    ds.edge_count += static_cast<Index>(list.size());
    ds.graphs.push_back(Graphd::from_edges(n, list, std::move(features)));
  }
  return ds;
}

void Split::validate(Index n) const {
  std::vector<char> seen(static_cast<std::size_t>(std::max<Index>(n, 0)), 0);
  for (const auto* part : {&train, &val, &test}) {
    for (Index i : *part) {
      if (i < 0 || i >= n) throw DataError("split index " + std::to_string(i) + " outside 0.." + std::to_string(n - 1));
      if (seen[static_cast<std::size_t>(i)]++) throw DataError("split index " + std::to_string(i) + " appears twice");
    }
  }
}

std::string split_json(const Split& split) {
  json j;
  j["train"] = split.train;
  j["val"] = split.val;
  j["test"] = split.test;
  return j.dump();
}

Split read_split(const fs::path& path) {
  const json j = parse_json(read_text(path), path.string());
  Split s;
  s.train = index_array(j.value("train", json::array()), path.string() + ": train");
  s.val = index_array(j.value("val", json::array()), path.string() + ": val");
  s.test = index_array(j.value("test", json::array()), path.string() + ": test");
  return s;
}

void write_split(const fs::path& path, const Split& split) { write_text(path, split_json(split)); }

Split random_split(Index n, double train_fraction, double val_fraction, std::uint64_t seed) {
  if (n < 0) throw ConfigError("negative item count");
  if (train_fraction < 0 || val_fraction < 0 || train_fraction + val_fraction > 1.0 + 1e-12) {
    throw ConfigError("split fractions must be non-negative and sum to at most 1");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  const auto n_val = std::min(order.size() - n_train,
                              static_cast<std::size_t>(std::llround(static_cast<double>(n) * val_fraction)));
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
               order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  return s;
}

std::vector<Split> kfold_splits(Index n_items, Index k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("k-fold needs k >= 2");
  if (n_items < k) throw ConfigError("fewer items (" + std::to_string(n_items) + ") than folds (" + std::to_string(k) + ")");
  std::vector<Index> order(static_cast<std::size_t>(n_items));
  std::iota(order.begin(), order.end(), Index(0));
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Split> folds(static_cast<std::size_t>(k));
  const Index base = n_items / k;
  const Index extra = n_items % k;
  Index pos = 0;
  std::vector<std::vector<Index>> parts(static_cast<std::size_t>(k));
  for (Index f = 0; f < k; ++f) {
    const Index size = base + (f < extra ? 1 : 0);
    parts[static_cast<std::size_t>(f)].assign(order.begin() + pos, order.begin() + pos + size);
    pos += size;
  }
  for (Index f = 0; f < k; ++f) {
    Split& s = folds[static_cast<std::size_t>(f)];
    s.test = parts[static_cast<std::size_t>(f)];
    std::vector<Index> rest;
    for (Index g = 0; g < k; ++g) {
      if (g != f) rest.insert(rest.end(), parts[static_cast<std::size_t>(g)].begin(), parts[static_cast<std::size_t>(g)].end());
    }
    std::shuffle(rest.begin(), rest.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::llround(static_cast<double>(rest.size()) / 10.0));
    s.val.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(n_val));
    s.train.assign(rest.begin() + static_cast<std::ptrdiff_t>(n_val), rest.end());
    for (auto* part : {&s.train, &s.val, &s.test}) std::sort(part->begin(), part->end());
  }
  return folds;
}

NodeDataset load_node_dataset(const fs::path& manifest) {
  const std::string source = manifest.string();
  const json j = parse_json(read_text(manifest), source);
  const fs::path root = manifest.parent_path();
  const auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : root / path;
  };

  NodeDataset ds;
  ds.name = j.value("name", manifest.stem().string());
  GraphBundle bundle = read_graph_bundle(resolve(field<std::string>(j, "graph", source)));
  ds.graph = std::move(bundle.graph);
  if (j.contains("labels")) {
    const fs::path path = resolve(field<std::string>(j, "labels", source));
    ds.labels = index_array(parse_json(read_text(path), path.string()), path.string());
  } else {
    ds.labels = std::move(bundle.labels);
  }
  if (ds.labels.empty()) throw DataError(source + ": no node labels in the manifest or the bundle");
  if (static_cast<Index>(ds.labels.size()) != ds.graph.size()) {
    throw DataError(source + ": " + std::to_string(ds.labels.size()) + " labels for " +
                    std::to_string(ds.graph.size()) + " nodes");
  }
  for (Index y : ds.labels) {
    if (y < 0) throw DataError(source + ": negative label");
    ds.classes = std::max(ds.classes, y + 1);
  }

  if (j.contains("split")) {
    ds.split = read_split(resolve(field<std::string>(j, "split", source)));
  } else {
    std::vector<double> ratio{0.6, 0.2, 0.2};
    if (j.contains("split_ratio")) ratio = field<std::vector<double>>(j, "split_ratio", source);
    if (ratio.size() != 3) throw DataError(source + ": split_ratio needs three entries");
    const double total = ratio[0] + ratio[1] + ratio[2];
    if (!(total > 0)) throw DataError(source + ": split_ratio must have a positive sum");
    ds.split = random_split(ds.graph.size(), ratio[0] / total, ratio[1] / total, j.value("seed", std::uint64_t{0}));
  }
  ds.split.validate(ds.graph.size());
  return ds;
}

void write_graph_dataset(const fs::path& dir, const std::string& name,
                         const std::vector<Graphd>& graphs, const std::vector<Index>& labels,
                         const std::vector<std::string>& classes, const Split& split,
                         std::uint64_t seed) {
  if (graphs.size() != labels.size()) throw DataError("one label per graph is required");
  split.validate(static_cast<Index>(graphs.size()));
  json files = json::array();
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "graphs/%06zu.json", i);
    write_graph_bundle(dir / buf, graphs[i], {labels[i]});
    files.push_back(buf);
  }
  json j;
  j["name"] = name;
  j["task"] = "graph";
  j["graphs"] = std::move(files);
  j["labels"] = labels;
  j["classes"] = classes;
  j["split"] = json::parse(split_json(split));
  j["seed"] = seed;
  j["feature_dim"] = graphs.empty() ? 0 : graphs.front().feature_dim();
  write_text(dir / "manifest.json", j.dump(2));
}

GraphDatasetManifest read_graph_dataset_manifest(const fs::path& path) {
  const std::string source = path.string();
  const json j = parse_json(read_text(path), source);
  GraphDatasetManifest m;
  m.name = j.value("name", path.parent_path().filename().string());
  m.files = field<std::vector<std::string>>(j, "graphs", source);
  m.labels = index_array(j.at("labels"), source + ": labels");
  m.classes = j.value("classes", std::vector<std::string>{});
  m.seed = j.value("seed", std::uint64_t{0});
  m.feature_dim = j.value("feature_dim", Index{0});
  if (m.files.size() != m.labels.size()) throw DataError(source + ": one label per graph file is required");
  if (j.contains("split")) {
    const json& s = j.at("split");
    m.split.train = index_array(s.value("train", json::array()), source + ": split.train");
    m.split.val = index_array(s.value("val", json::array()), source + ": split.val");
    m.split.test = index_array(s.value("test", json::array()), source + ": split.test");
    m.split.validate(static_cast<Index>(m.files.size()));
  }
  return m;
}

}  // namespace gomk
