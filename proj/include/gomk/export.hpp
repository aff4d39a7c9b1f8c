#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <type_traits>
#include <vector>

#include "json.hpp"

#include "gomk/filter.hpp"
#include "gomk/model.hpp"

namespace gomk {

/// Graphviz rendering of a filter: edges with weight above `threshold`, the
/// weight as edge label, and node features as attributes. Three-dimensional
/// features in [0, 1] also become the node's fill colour.
std::string filter_dot(const GraphFilter& filter, const std::string& name, double threshold = 0.5);
void write_filter_dots(const std::filesystem::path& dir, const std::vector<GraphFilter>& filters,
                       const std::string& prefix = "filter");

nlohmann::json filter_json(const GraphFilter& filter);
GraphFilter filter_from_json(const nlohmann::json& j);
nlohmann::json mlp_json(const Mlp& mlp);

/// {"layers": [[filter...]...], "mlp": {"front", "classifier"}, "config", "epoch", "seed"}.
nlohmann::json checkpoint_json(const GomkcnModel& model, const nlohmann::json& config, int epoch,
                               std::uint64_t seed);
/// Overwrites the parameters of an already built model; ShapeError when the shapes differ.
void restore_checkpoint(GomkcnModel& model, const nlohmann::json& checkpoint);

/// Checkpoint of bare filters (iso learning and pattern mining).
nlohmann::json filters_checkpoint_json(const std::vector<GraphFilter>& filters,
                                       const nlohmann::json& config, int epoch, std::uint64_t seed);

/// Minimal CSV writer; fields are written verbatim except strings containing
/// separators or quotes, which are quoted.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, std::vector<std::string> columns);

  template <typename... Ts>
  void row(const Ts&... values) {
    std::vector<std::string> cells;
    (cells.push_back(cell(values)), ...);
    write(cells);
  }
  void write(const std::vector<std::string>& cells);

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <typename T>
  static std::string cell(const T& v) {
    if constexpr (std::is_floating_point_v<T>) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.10g", static_cast<double>(v));
      return buf;
    } else {
      return std::to_string(v);
    }
  }

  std::ofstream out_;
  std::size_t columns_ = 0;
};

}  // namespace gomk
