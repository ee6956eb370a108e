#include "kgprobe/cli/config.hpp"

#include <fstream>
#include <initializer_list>

#include "kgprobe/error.hpp"

namespace kgprobe::cli {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw InputError("config: \"" + std::string(section) + "\" must be an object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) throw InputError("config: unknown key \"" + key + "\" in " + std::string(section));
  }
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void take_path(const json& j, const char* key, std::filesystem::path& dst) {
  if (j.contains(key)) dst = j.at(key).get<std::string>();
}

}  // namespace

ComponentMode parse_component_mode(std::string_view s) {
  if (s == "none") return ComponentMode::none;
  if (s == "weak") return ComponentMode::weak;
  if (s == "strong") return ComponentMode::strong;
  throw InputError("unknown component mode \"" + std::string(s) + "\" (expected none, weak or strong)");
}

std::string_view to_string(ComponentMode m) {
  switch (m) {
    case ComponentMode::none: return "none";
    case ComponentMode::weak: return "weak";
    case ComponentMode::strong: return "strong";
  }
  return "strong";
}

std::filesystem::path RunConfig::graph_path() const {
  return paths.graph.empty() ? paths.out_dir / "component.tsv" : paths.graph;
}

std::filesystem::path RunConfig::cache_path() const {
  return paths.cache.empty() ? paths.out_dir / "probe_cache.jsonl" : paths.cache;
}

std::filesystem::path RunConfig::scores_path() const {
  if (!paths.scores.empty()) return paths.scores;
  return paths.out_dir / (temporal ? "scores_temporal.csv" : "scores_plain.csv");
}

std::filesystem::path RunConfig::checkpoint_path() const {
  return paths.checkpoint.empty() ? paths.out_dir / "checkpoint.json" : paths.checkpoint;
}

RunConfig config_from_json(const json& j, RunConfig c) {
  try {
    check_keys(j, "config", {"version", "paths", "columns", "component", "temporal", "seed", "centrality", "mock", "llm",
                             "features", "model", "train", "select"});
    if (!j.contains("version")) throw InputError("config: missing \"version\"");
    c.version = j.at("version").get<int>();
    if (c.version != kConfigVersion)
      throw InputError("config: unsupported version " + std::to_string(c.version));

    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      check_keys(p, "paths",
                 {"triplets", "graph", "templates", "cache", "embeddings", "scores", "checkpoint", "out_dir"});
      take_path(p, "triplets", c.paths.triplets);
      take_path(p, "graph", c.paths.graph);
      take_path(p, "templates", c.paths.templates);
      take_path(p, "cache", c.paths.cache);
      take_path(p, "embeddings", c.paths.embeddings);
      take_path(p, "scores", c.paths.scores);
      take_path(p, "checkpoint", c.paths.checkpoint);
      take_path(p, "out_dir", c.paths.out_dir);
    }
    take(j, "columns", c.columns);
    if (j.contains("component")) c.component = parse_component_mode(j.at("component").get<std::string>());
    take(j, "temporal", c.temporal);
    take(j, "seed", c.seed);

    if (j.contains("centrality")) {
      const auto& m = j.at("centrality");
      check_keys(m, "centrality", {"damping", "katz_alpha"});
      take(m, "damping", c.centrality.damping);
      take(m, "katz_alpha", c.centrality.katz_alpha);
    }
    if (j.contains("mock")) {
      const auto& m = j.at("mock");
      check_keys(m, "mock", {"enabled", "rate"});
      take(m, "enabled", c.mock.enabled);
      take(m, "rate", c.mock.rate);
    }
    if (j.contains("llm")) {
      const auto& l = j.at("llm");
      check_keys(l, "llm", {"endpoint", "model", "api_key_env", "max_parallel", "requests_per_second",
                            "max_attempts", "initial_backoff_ms", "max_backoff_ms", "system_message",
                            "temporal_system_message", "timeout_s"});
      take(l, "endpoint", c.llm.endpoint);
      take(l, "model", c.llm.model);
      take(l, "api_key_env", c.llm.api_key_env);
      take(l, "max_parallel", c.llm.max_parallel);
      take(l, "requests_per_second", c.llm.requests_per_second);
      take(l, "max_attempts", c.llm.retry.max_attempts);
      if (l.contains("initial_backoff_ms"))
        c.llm.retry.initial_backoff = std::chrono::milliseconds(l.at("initial_backoff_ms").get<long long>());
      if (l.contains("max_backoff_ms"))
        c.llm.retry.max_backoff = std::chrono::milliseconds(l.at("max_backoff_ms").get<long long>());
      take(l, "system_message", c.llm.system_message);
      take(l, "temporal_system_message", c.llm.temporal_system_message);
      if (l.contains("timeout_s")) c.llm.timeout = std::chrono::seconds(l.at("timeout_s").get<long long>());
    }
    if (j.contains("features")) c.features = gnn::parse_feature_mode(j.at("features").get<std::string>());
    if (j.contains("model")) {
      const auto& m = j.at("model");
      check_keys(m, "model", {"architecture", "aggregation", "hidden", "squash"});
      if (m.contains("architecture")) c.model.architecture = gnn::parse_architecture(m.at("architecture").get<std::string>());
      if (m.contains("aggregation")) c.model.aggregation = gnn::parse_aggregation(m.at("aggregation").get<std::string>());
      take(m, "hidden", c.model.hidden);
      if (m.contains("squash")) c.model.squash = gnn::parse_squash(m.at("squash").get<std::string>());
    }
    if (j.contains("train")) {
      const auto& t = j.at("train");
      check_keys(t, "train", {"learning_rate", "epochs", "train_fraction", "patience", "weight_decay", "optimizer",
                              "beta1", "beta2", "epsilon"});
      take(t, "learning_rate", c.train.learning_rate);
      take(t, "epochs", c.train.epochs);
      take(t, "train_fraction", c.train.train_fraction);
      take(t, "patience", c.train.patience);
      take(t, "weight_decay", c.train.weight_decay);
      if (t.contains("optimizer")) c.train.optimizer = gnn::parse_optimizer(t.at("optimizer").get<std::string>());
      take(t, "beta1", c.train.beta1);
      take(t, "beta2", c.train.beta2);
      take(t, "epsilon", c.train.epsilon);
    }
    if (j.contains("select")) {
      const auto& s = j.at("select");
      check_keys(s, "select", {"budget", "seed", "eval_size", "allow_eval_overlap", "known_first", "corrupt",
                               "eval_corrupt"});
      take(s, "budget", c.select.budget);
      if (s.contains("seed")) c.select.seed = s.at("seed").get<std::uint64_t>();
      if (s.contains("eval_size")) c.select.eval_size = s.at("eval_size").get<std::size_t>();
      take(s, "allow_eval_overlap", c.select.allow_eval_overlap);
      take(s, "known_first", c.select.known_first);
      take(s, "corrupt", c.select.corrupt);
      take(s, "eval_corrupt", c.select.eval_corrupt);
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["version"] = c.version;
  j["paths"] = {{"triplets", c.paths.triplets.string()},     {"graph", c.paths.graph.string()},
                {"templates", c.paths.templates.string()},   {"cache", c.paths.cache.string()},
                {"embeddings", c.paths.embeddings.string()}, {"scores", c.paths.scores.string()},
                {"checkpoint", c.paths.checkpoint.string()}, {"out_dir", c.paths.out_dir.string()}};
  j["columns"] = c.columns;
  j["component"] = to_string(c.component);
  j["temporal"] = c.temporal;
  j["seed"] = c.seed;
  j["centrality"] = {{"damping", c.centrality.damping}, {"katz_alpha", c.centrality.katz_alpha}};
  j["mock"] = {{"enabled", c.mock.enabled}, {"rate", c.mock.rate}};
  j["llm"] = {{"endpoint", c.llm.endpoint},
              {"model", c.llm.model},
              {"api_key_env", c.llm.api_key_env},
              {"max_parallel", c.llm.max_parallel},
              {"requests_per_second", c.llm.requests_per_second},
              {"max_attempts", c.llm.retry.max_attempts},
              {"initial_backoff_ms", c.llm.retry.initial_backoff.count()},
              {"max_backoff_ms", c.llm.retry.max_backoff.count()},
              {"system_message", c.llm.system_message},
              {"temporal_system_message", c.llm.temporal_system_message},
              {"timeout_s", c.llm.timeout.count()}};
  j["features"] = gnn::to_string(c.features);
  j["model"] = {{"architecture", gnn::to_string(c.model.architecture)},
                {"aggregation", gnn::to_string(c.model.aggregation)},
                {"hidden", c.model.hidden},
                {"squash", gnn::to_string(c.model.squash)}};
  j["train"] = {{"learning_rate", c.train.learning_rate}, {"epochs", c.train.epochs},
                {"train_fraction", c.train.train_fraction}, {"patience", c.train.patience},
                {"weight_decay", c.train.weight_decay},     {"optimizer", gnn::to_string(c.train.optimizer)},
                {"beta1", c.train.beta1},                   {"beta2", c.train.beta2},
                {"epsilon", c.train.epsilon}};
  j["select"] = {{"budget", c.select.budget},
                 {"allow_eval_overlap", c.select.allow_eval_overlap},
                 {"known_first", c.select.known_first},
                 {"corrupt", c.select.corrupt},
                 {"eval_corrupt", c.select.eval_corrupt}};
  if (c.select.seed) j["select"]["seed"] = *c.select.seed;
  if (c.select.eval_size) j["select"]["eval_size"] = *c.select.eval_size;
  return j;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw InputError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace kgprobe::cli
