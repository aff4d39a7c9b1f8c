#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "gomk/experiments.hpp"

namespace gomk {

void to_json(nlohmann::json& j, const LayerConfig& c);
void from_json(const nlohmann::json& j, LayerConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const IsoConfig& c);
void from_json(const nlohmann::json& j, IsoConfig& c);
void to_json(nlohmann::json& j, const PatternConfig& c);
void from_json(const nlohmann::json& j, PatternConfig& c);
void to_json(nlohmann::json& j, const MotifClassifyConfig& c);
void from_json(const nlohmann::json& j, MotifClassifyConfig& c);
void to_json(nlohmann::json& j, const NodeClassifyConfig& c);
void from_json(const nlohmann::json& j, NodeClassifyConfig& c);
void to_json(nlohmann::json& j, const GraphModelConfig& c);
void from_json(const nlohmann::json& j, GraphModelConfig& c);
void to_json(nlohmann::json& j, const GraphGrid& c);
void from_json(const nlohmann::json& j, GraphGrid& c);
void to_json(nlohmann::json& j, const GraphClassifyConfig& c);
void from_json(const nlohmann::json& j, GraphClassifyConfig& c);

std::string pooling_name(Pooling p);
Pooling parse_pooling(const std::string& name);

/// Recursively overlays `patch` onto `base`. Every key of `patch` must already
/// exist in `base` (ConfigError naming the dotted path otherwise); objects merge,
/// anything else replaces. A null in `base` accepts any value.
void merge_strict(nlohmann::json& base, const nlohmann::json& patch, const std::string& path = "");

/// Applies "dotted.key=value" overrides. The value is parsed as JSON when
/// possible and kept as a string otherwise; unknown keys are a ConfigError.
void apply_overrides(nlohmann::json& config, const std::vector<std::string>& overrides);

/// Defaults, then the config file (if any), then the overrides, decoded into T.
/// The fully resolved JSON is returned through `resolved`.
template <typename T>
T resolve_config(const T& defaults, const nlohmann::json* file, const std::vector<std::string>& overrides,
                 nlohmann::json& resolved) {
  resolved = defaults;
  if (file) merge_strict(resolved, *file);
  apply_overrides(resolved, overrides);
  try {
    T out = resolved.get<T>();
    resolved = out;
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

}  // namespace gomk
