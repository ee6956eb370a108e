#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "kgprobe/gnn/model.hpp"
#include "kgprobe/kg/centrality.hpp"
#include "kgprobe/gnn/train.hpp"
#include "kgprobe/prompting/llm_client.hpp"
#include "kgprobe/selection/selection.hpp"

namespace kgprobe::cli {

inline constexpr int kConfigVersion = 1;

enum class ComponentMode { none, weak, strong };

struct Paths {
  std::filesystem::path triplets;     // raw input for ingest
  std::filesystem::path graph;        // defaults to <out_dir>/component.tsv
  std::filesystem::path templates;
  std::filesystem::path cache;        // defaults to <out_dir>/probe_cache.jsonl
  std::filesystem::path embeddings;   // external feature mode only
  std::filesystem::path scores;       // defaults to <out_dir>/scores_<variant>.csv
  std::filesystem::path checkpoint;   // defaults to <out_dir>/checkpoint.json
  std::filesystem::path out_dir = "out";
};

struct MockConfig {
  bool enabled = false;
  double rate = 0.5;
};

struct SelectConfig {
  std::size_t budget = 0;
  std::optional<std::uint64_t> seed;     // falls back to RunConfig::seed
  std::optional<std::size_t> eval_size;  // default: a tenth of the triplets
  bool allow_eval_overlap = false;
  bool known_first = false;
  bool corrupt = false;       // negatives in the fine-tune files
  bool eval_corrupt = true;   // negatives in eval.jsonl
};

struct RunConfig {
  int version = kConfigVersion;
  Paths paths;
  std::string columns = "hrt";
  ComponentMode component = ComponentMode::strong;
  bool temporal = false;
  std::uint64_t seed = 0;
  kg::CentralityParams centrality;
  MockConfig mock;
  prompting::LlmClientConfig llm;
  gnn::FeatureMode features = gnn::FeatureMode::one_hot;
  gnn::ModelSpec model;
  gnn::TrainConfig train;  // train.seed is overwritten by seed
  SelectConfig select;

  std::filesystem::path graph_path() const;
  std::filesystem::path cache_path() const;
  std::filesystem::path scores_path() const;
  std::filesystem::path checkpoint_path() const;
  std::uint64_t selection_seed() const { return select.seed.value_or(seed); }
};

ComponentMode parse_component_mode(std::string_view s);
std::string_view to_string(ComponentMode m);

/// Merges the keys present in `j` over `base`; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base = {});
nlohmann::json config_to_json(const RunConfig& config);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace kgprobe::cli
