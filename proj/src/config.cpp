#include "gomk/config.hpp"

#include <algorithm>
#include <cctype>

namespace gomk {

using nlohmann::json;

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

Truncation parse_truncation(const std::string& name) {
  const std::string n = lower(name);
  if (n == "deterministic") return Truncation::deterministic;
  if (n == "seeded_random" || n == "random") return Truncation::seeded_random;
  throw ConfigError("unknown truncation policy '" + name + "'");
}

std::string truncation_name(Truncation t) {
  return t == Truncation::deterministic ? "deterministic" : "seeded_random";
}

}  // namespace

std::string pooling_name(Pooling p) {
  switch (p) {
    case Pooling::max: return "max";
    case Pooling::add: return "add";
    case Pooling::mean: return "mean";
  }
  return "max";
}

Pooling parse_pooling(const std::string& name) {
  const std::string n = lower(name);
  if (n == "max") return Pooling::max;
  if (n == "add" || n == "sum") return Pooling::add;
  if (n == "mean") return Pooling::mean;
  throw ConfigError("unknown pooling '" + name + "'");
}

void to_json(json& j, const LayerConfig& c) {
  j = json{{"filters", c.filters},       {"filter_nodes", c.filter_nodes},
           {"hops", c.hops},             {"t", c.t},
           {"tau", c.tau},               {"size", c.size},
           {"bounded", c.bounded},       {"normalize", c.normalize},
           {"truncation", truncation_name(c.truncation)}, {"truncation_seed", c.truncation_seed}};
}

void from_json(const json& j, LayerConfig& c) {
  j.at("filters").get_to(c.filters);
  j.at("filter_nodes").get_to(c.filter_nodes);
  j.at("hops").get_to(c.hops);
  j.at("t").get_to(c.t);
  j.at("tau").get_to(c.tau);
  j.at("size").get_to(c.size);
  j.at("bounded").get_to(c.bounded);
  j.at("normalize").get_to(c.normalize);
  c.truncation = parse_truncation(j.at("truncation").get<std::string>());
  j.at("truncation_seed").get_to(c.truncation_seed);
}

void to_json(json& j, const TrainConfig& c) {
  j = json{{"epochs", c.epochs}, {"learning_rate", c.learning_rate}, {"batch_size", c.batch_size},
           {"beta1", c.beta1},   {"beta2", c.beta2},                 {"epsilon", c.epsilon}};
}

void from_json(const json& j, TrainConfig& c) {
  j.at("epochs").get_to(c.epochs);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("batch_size").get_to(c.batch_size);
  j.at("beta1").get_to(c.beta1);
  j.at("beta2").get_to(c.beta2);
  j.at("epsilon").get_to(c.epsilon);
}

void to_json(json& j, const IsoConfig& c) {
  j = json{{"nodes", c.nodes},   {"feature_dim", c.feature_dim},     {"p", c.p},
           {"seeds", c.seeds},   {"epochs", c.epochs},               {"learning_rate", c.learning_rate},
           {"t", c.t},           {"tau", c.tau},                     {"ones_features", c.ones_features}};
}

void from_json(const json& j, IsoConfig& c) {
  j.at("nodes").get_to(c.nodes);
  j.at("feature_dim").get_to(c.feature_dim);
  j.at("p").get_to(c.p);
  j.at("seeds").get_to(c.seeds);
  j.at("epochs").get_to(c.epochs);
  j.at("learning_rate").get_to(c.learning_rate);
  j.at("t").get_to(c.t);
  j.at("tau").get_to(c.tau);
  j.at("ones_features").get_to(c.ones_features);
}

void to_json(json& j, const PatternConfig& c) {
  j = json{{"base_nodes", c.graph.base_nodes}, {"attach_m", c.graph.attach_m}, {"copies", c.graph.copies},
           {"feature_dim", c.graph.feature_dim}, {"motifs", c.graph.motifs},    {"filters", c.filters},
           {"filter_nodes", c.filter_nodes},   {"hops", c.hops},               {"t", c.t},
           {"tau", c.tau},                     {"size", c.size},               {"epochs", c.epochs},
           {"learning_rate", c.learning_rate}};
}

void from_json(const json& j, PatternConfig& c) {
  j.at("base_nodes").get_to(c.graph.base_nodes);
  j.at("attach_m").get_to(c.graph.attach_m);
  j.at("copies").get_to(c.graph.copies);
  j.at("feature_dim").get_to(c.graph.feature_dim);
  j.at("motifs").get_to(c.graph.motifs);
  j.at("filters").get_to(c.filters);
  j.at("filter_nodes").get_to(c.filter_nodes);
  j.at("hops").get_to(c.hops);
  j.at("t").get_to(c.t);
  j.at("tau").get_to(c.tau);
  j.at("size").get_to(c.size);
  j.at("epochs").get_to(c.epochs);
  j.at("learning_rate").get_to(c.learning_rate);
}

void to_json(json& j, const MotifClassifyConfig& c) {
  j = json{{"data",
            {{"count", c.data.count},
             {"base_nodes", c.data.base_nodes},
             {"attach_m", c.data.attach_m},
             {"feature_dim", c.data.feature_dim},
             {"motifs", c.data.motifs},
             {"train_fraction", c.data.train_fraction},
             {"val_fraction", c.data.val_fraction}}},
           {"layer", c.layer},
           {"pooling", pooling_name(c.pooling)},
           {"classifier_hidden", c.classifier_hidden},
           {"train", c.train},
           {"response_graphs", c.response_graphs}};
}

void from_json(const json& j, MotifClassifyConfig& c) {
  const json& d = j.at("data");
  d.at("count").get_to(c.data.count);
  d.at("base_nodes").get_to(c.data.base_nodes);
  d.at("attach_m").get_to(c.data.attach_m);
  d.at("feature_dim").get_to(c.data.feature_dim);
  d.at("motifs").get_to(c.data.motifs);
  d.at("train_fraction").get_to(c.data.train_fraction);
  d.at("val_fraction").get_to(c.data.val_fraction);
  j.at("layer").get_to(c.layer);
  c.pooling = parse_pooling(j.at("pooling").get<std::string>());
  j.at("classifier_hidden").get_to(c.classifier_hidden);
  j.at("train").get_to(c.train);
  j.at("response_graphs").get_to(c.response_graphs);
}

void to_json(json& j, const NodeClassifyConfig& c) {
  j = json{{"front_dim", c.front_dim}, {"layer", c.layer},  {"classifier_hidden", c.classifier_hidden},
           {"dropout", c.dropout},     {"train", c.train},  {"seeds", c.seeds}};
}

void from_json(const json& j, NodeClassifyConfig& c) {
  j.at("front_dim").get_to(c.front_dim);
  j.at("layer").get_to(c.layer);
  j.at("classifier_hidden").get_to(c.classifier_hidden);
  j.at("dropout").get_to(c.dropout);
  j.at("train").get_to(c.train);
  j.at("seeds").get_to(c.seeds);
}

void to_json(json& j, const GraphModelConfig& c) {
  j = json{{"front_dim", c.front_dim},
           {"layer", c.layer},
           {"pooling", pooling_name(c.pooling)},
           {"classifier_hidden", c.classifier_hidden},
           {"dropout", c.dropout}};
}

void from_json(const json& j, GraphModelConfig& c) {
  j.at("front_dim").get_to(c.front_dim);
  j.at("layer").get_to(c.layer);
  c.pooling = parse_pooling(j.at("pooling").get<std::string>());
  j.at("classifier_hidden").get_to(c.classifier_hidden);
  j.at("dropout").get_to(c.dropout);
}

void to_json(json& j, const GraphGrid& c) {
  std::vector<std::string> pools;
  for (Pooling p : c.pooling) pools.push_back(pooling_name(p));
  j = json{{"filters", c.filters}, {"filter_nodes", c.filter_nodes}, {"front_dim", c.front_dim},
           {"dropout", c.dropout}, {"hops", c.hops},                 {"t", c.t},
           {"pooling", pools}};
}

void from_json(const json& j, GraphGrid& c) {
  j.at("filters").get_to(c.filters);
  j.at("filter_nodes").get_to(c.filter_nodes);
  j.at("front_dim").get_to(c.front_dim);
  j.at("dropout").get_to(c.dropout);
  j.at("hops").get_to(c.hops);
  j.at("t").get_to(c.t);
  c.pooling.clear();
  for (const auto& p : j.at("pooling")) c.pooling.push_back(parse_pooling(p.get<std::string>()));
}

void to_json(json& j, const GraphClassifyConfig& c) {
  j = json{{"model", c.model},
           {"use_grid", c.grid.has_value()},
           {"grid", c.grid.value_or(GraphGrid{})},
           {"train", c.train},
           {"folds", c.folds}};
}

void from_json(const json& j, GraphClassifyConfig& c) {
  j.at("model").get_to(c.model);
  if (j.at("use_grid").get<bool>()) {
    c.grid = j.at("grid").get<GraphGrid>();
  } else {
    c.grid.reset();
  }
  j.at("train").get_to(c.train);
  j.at("folds").get_to(c.folds);
}

void merge_strict(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ConfigError("configuration " + (path.empty() ? "root" : "'" + path + "'") + " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.is_object() || !base.contains(it.key())) throw ConfigError("unknown configuration key '" + key + "'");
    json& target = base[it.key()];
    if (target.is_object() && it.value().is_object()) {
      merge_strict(target, it.value(), key);
    } else {
      target = it.value();
    }
  }
}

void apply_overrides(json& config, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    // build a one-path patch and merge it strictly
    json patch = value;
    std::size_t end = key.size();
    while (true) {
      const auto dot = key.rfind('.', end - 1);
      const std::string part = dot == std::string::npos ? key.substr(0, end) : key.substr(dot + 1, end - dot - 1);
      if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
      patch = json{{part, patch}};
      if (dot == std::string::npos) break;
      end = dot;
    }
    merge_strict(config, patch);
  }
}

}  // namespace gomk
