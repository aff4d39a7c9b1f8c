#include "gomk/export.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace gomk {

using nlohmann::json;

namespace {

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j, Index rows, Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows) throw ShapeError(what + ": wrong row count");
  Eigen::MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw ShapeError(what + ": wrong column count");
    for (Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

void restore_mlp(Mlp& mlp, const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != mlp.layers().size()) throw ShapeError(what + ": layer count differs");
  for (std::size_t i = 0; i < mlp.layers().size(); ++i) {
    Mlp::Layer& layer = mlp.layers()[i];
    layer.weight = matrix_from_json(j[i].at("weight"), layer.weight.rows(), layer.weight.cols(), what);
    const Eigen::MatrixXd bias = matrix_from_json(j[i].at("bias"), 1, layer.bias.size(), what);
    layer.bias = bias.row(0).transpose();
  }
}

}  // namespace

std::string filter_dot(const GraphFilter& filter, const std::string& name, double threshold) {
  const Eigen::MatrixXd a = filter.adjacency();
  const Eigen::MatrixXd& f = filter.features();
  std::ostringstream out;
  out << "graph \"" << name << "\" {\n  node [shape=circle, style=filled];\n";
  for (Index v = 0; v < filter.size(); ++v) {
    out << "  " << v << " [features=\"";
    for (Index c = 0; c < f.cols(); ++c) out << (c ? "," : "") << number(f(v, c));
    out << "\"";
    if (f.cols() == 3 && f.row(v).minCoeff() >= 0.0 && f.row(v).maxCoeff() <= 1.0) {
      char color[16];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", static_cast<int>(f(v, 0) * 255.0 + 0.5),
                    static_cast<int>(f(v, 1) * 255.0 + 0.5), static_cast<int>(f(v, 2) * 255.0 + 0.5));
      out << ", fillcolor=\"" << color << "\"";
    }
    out << "];\n";
  }
  for (Index u = 0; u < filter.size(); ++u) {
    for (Index v = u + 1; v < filter.size(); ++v) {
      if (a(u, v) > threshold) out << "  " << u << " -- " << v << " [weight=" << number(a(u, v)) << ", label=\"" << number(a(u, v)) << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

void write_filter_dots(const std::filesystem::path& dir, const std::vector<GraphFilter>& filters,
                       const std::string& prefix) {
  std::filesystem::create_directories(dir);
  for (std::size_t j = 0; j < filters.size(); ++j) {
    const std::string name = prefix + "_" + std::to_string(j);
    std::ofstream out(dir / (name + ".dot"));
    if (!out) throw DataError("cannot write " + (dir / (name + ".dot")).string());
    out << filter_dot(filters[j], name);
  }
}

json filter_json(const GraphFilter& filter) {
  json j;
  j["nodes"] = filter.size();
  j["feature_dim"] = filter.feature_dim();
  j["bounded"] = filter.bounded();
  j["adjacency"] = matrix_json(filter.adjacency());
  j["features"] = matrix_json(filter.features());
  return j;
}

GraphFilter filter_from_json(const json& j) {
  const auto n = j.at("nodes").get<Index>();
  const auto d = j.at("feature_dim").get<Index>();
  GraphFilter f(n, d, j.value("bounded", true));
  const Eigen::MatrixXd a = matrix_from_json(j.at("adjacency"), n, n, "filter adjacency");
  Index k = 0;
  for (Index u = 0; u < n; ++u) {
    for (Index v = u + 1; v < n; ++v) f.edge_weights()(k++) = a(u, v);
  }
  f.features() = matrix_from_json(j.at("features"), n, d, "filter features");
  return f;
}

json mlp_json(const Mlp& mlp) {
  json layers = json::array();
  for (const Mlp::Layer& l : mlp.layers()) {
    json layer;
    layer["weight"] = matrix_json(l.weight);
    layer["bias"] = matrix_json(l.bias.transpose());
    layers.push_back(std::move(layer));
  }
  return layers;
}

json checkpoint_json(const GomkcnModel& model, const json& config, int epoch, std::uint64_t seed) {
  json j;
  json layers = json::array();
  for (const GomkcnLayer& layer : model.layers()) {
    json filters = json::array();
    for (const GraphFilter& f : layer.filters()) filters.push_back(filter_json(f));
    layers.push_back(std::move(filters));
  }
  j["layers"] = std::move(layers);
  j["mlp"]["front"] = mlp_json(model.front());
  j["mlp"]["classifier"] = mlp_json(model.classifier());
  j["dropout"] = model.config().dropout;
  j["config"] = config;
  j["epoch"] = epoch;
  j["seed"] = seed;
  return j;
}

void restore_checkpoint(GomkcnModel& model, const json& checkpoint) {
  const json& layers = checkpoint.at("layers");
  if (layers.size() != model.layers().size()) throw ShapeError("checkpoint layer count differs");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& filters = model.layers()[l].filters();
    if (layers[l].size() != filters.size()) throw ShapeError("checkpoint filter count differs");
    for (std::size_t j = 0; j < filters.size(); ++j) {
      GraphFilter f = filter_from_json(layers[l][j]);
      if (f.size() != filters[j].size() || f.feature_dim() != filters[j].feature_dim()) {
        throw ShapeError("checkpoint filter shape differs");
      }
      filters[j] = std::move(f);
    }
  }
  restore_mlp(model.front(), checkpoint.at("mlp").at("front"), "front MLP");
  restore_mlp(model.classifier(), checkpoint.at("mlp").at("classifier"), "classifier MLP");
}

json filters_checkpoint_json(const std::vector<GraphFilter>& filters, const json& config, int epoch,
                             std::uint64_t seed) {
  json j;
  json list = json::array();
  for (const GraphFilter& f : filters) list.push_back(filter_json(f));
  j["filters"] = std::move(list);
  j["config"] = config;
  j["epoch"] = epoch;
  j["seed"] = seed;
  return j;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns)
    : columns_(columns.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path);
  if (!out_) throw DataError("cannot write " + path.string());
  write(columns);
}

void CsvWriter::write(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw ShapeError("CSV row has the wrong number of cells");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") != std::string::npos) {
      out_ << '"';
      for (char ch : c) out_ << (ch == '"' ? "\"\"" : std::string(1, ch));
      out_ << '"';
    } else {
      out_ << c;
    }
  }
  out_ << '\n';
  out_.flush();
}

}  // namespace gomk
