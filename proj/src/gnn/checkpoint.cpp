#include "kgprobe/gnn/checkpoint.hpp"

#include <fstream>

#include "kgprobe/error.hpp"

namespace kgprobe::gnn {
namespace {

nlohmann::json matrix_json(const Matrix& m) {
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::vector<double>(m.values().begin(), m.values().end())}};
}

Matrix matrix_from(const nlohmann::json& j) {
  Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  auto data = j.at("data").get<std::vector<double>>();
  if (data.size() != m.size()) throw InputError("checkpoint matrix size mismatch");
  std::copy(data.begin(), data.end(), m.values().begin());
  return m;
}

}  // namespace

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt) {
  const auto& m = ckpt.model;
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : m.layers) {
    nlohmann::json lj = {{"weight", matrix_json(layer.weight)}, {"bias", layer.bias}};
    if (!layer.neighbor_weight.empty()) lj["neighbor_weight"] = matrix_json(layer.neighbor_weight);
    layers.push_back(std::move(lj));
  }
  return {{"format", "kgprobe-gnn"},
          {"version", kCheckpointVersion},
          {"seed", m.seed},
          {"architecture",
           {{"arch", to_string(m.spec.architecture)},
            {"aggregation", to_string(m.spec.aggregation)},
            {"hidden", m.spec.hidden},
            {"squash", to_string(m.spec.squash)}}},
          {"features", {{"mode", to_string(m.feature_mode)}, {"dim", m.input_dim}}},
          {"entities", ckpt.entities},
          {"layers", layers},
          {"head", {{"weight", m.head_weight}, {"bias", m.head_bias}}}};
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  try {
    if (!j.contains("version")) throw InputError("checkpoint lacks a version field");
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) throw InputError("unsupported checkpoint version " + std::to_string(version));
    Checkpoint c;
    auto& m = c.model;
    m.seed = j.at("seed").get<std::uint64_t>();
    const auto& a = j.at("architecture");
    m.spec.architecture = parse_architecture(a.at("arch").get<std::string>());
    m.spec.aggregation = parse_aggregation(a.at("aggregation").get<std::string>());
    m.spec.hidden = a.at("hidden").get<std::vector<std::size_t>>();
    m.spec.squash = parse_squash(a.at("squash").get<std::string>());
    m.feature_mode = parse_feature_mode(j.at("features").at("mode").get<std::string>());
    m.input_dim = j.at("features").at("dim").get<std::size_t>();
    c.entities = j.at("entities").get<std::vector<std::string>>();
    for (const auto& lj : j.at("layers")) {
      Layer layer;
      layer.weight = matrix_from(lj.at("weight"));
      if (lj.contains("neighbor_weight")) layer.neighbor_weight = matrix_from(lj.at("neighbor_weight"));
      layer.bias = lj.at("bias").get<std::vector<double>>();
      m.layers.push_back(std::move(layer));
    }
    m.head_weight = j.at("head").at("weight").get<std::vector<double>>();
    m.head_bias = j.at("head").at("bias").get<double>();

    if (m.layers.size() != m.spec.hidden.size()) throw InputError("checkpoint layer count mismatch");
    std::size_t in = m.input_dim;
    for (std::size_t l = 0; l < m.layers.size(); ++l) {
      const auto& layer = m.layers[l];
      const std::size_t out = m.spec.hidden[l];
      if (layer.weight.rows() != in || layer.weight.cols() != out || layer.bias.size() != out)
        throw InputError("checkpoint layer " + std::to_string(l) + " has inconsistent shapes");
      in = out;
    }
    if (m.head_weight.size() != in) throw InputError("checkpoint head has inconsistent shape");
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed checkpoint: ") + e.what());
  }
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(ckpt).dump() << '\n';
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open checkpoint " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid checkpoint JSON in " + path.string() + ": " + e.what());
  }
  return checkpoint_from_json(j);
}

}  // namespace kgprobe::gnn
