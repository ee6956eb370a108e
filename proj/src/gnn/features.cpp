#include "kgprobe/gnn/features.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <string>
#include <vector>

#include "kgprobe/error.hpp"

namespace kgprobe::gnn {

FeatureSource FeatureSource::one_hot(std::size_t num_entities) {
  FeatureSource f;
  f.mode = FeatureMode::one_hot;
  f.num_entities = num_entities;
  return f;
}

FeatureSource FeatureSource::from_matrix(Matrix features) {
  if (features.cols() == 0) throw InputError("external features need at least one column");
  FeatureSource f;
  f.mode = FeatureMode::external;
  f.num_entities = features.rows();
  f.external = std::move(features);
  return f;
}

namespace {

// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') { out.back() += '"'; ++i; }
      else if (c == '"') quoted = false;
      else out.back() += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

}  // namespace

FeatureSource read_embeddings_csv(std::istream& in, const kg::KnowledgeGraph& g) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("embedding file is empty");
  auto header = split_csv(line);
  if (header.size() < 2 || header[0] != "entity") throw ParseError(1, "embedding header must be entity,v_0,...");
  const std::size_t dim = header.size() - 1;
  Matrix m(g.num_entities(), dim);
  std::vector<bool> seen(g.num_entities(), false);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = split_csv(line);
    if (fields.size() != dim + 1)
      throw ParseError(lineno, "expected " + std::to_string(dim + 1) + " fields, got " + std::to_string(fields.size()));
    auto id = g.find_entity(fields[0]);
    if (!id) continue;
    for (std::size_t j = 0; j < dim; ++j) {
      const auto& f = fields[j + 1];
      double x = 0.0;
      auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), x);
      if (ec != std::errc{} || p != f.data() + f.size()) throw ParseError(lineno, "invalid number \"" + f + "\"");
      m(*id, j) = x;
    }
    seen[*id] = true;
  }
  for (kg::EntityId v = 0; v < g.num_entities(); ++v)
    if (!seen[v]) throw InputError("no embedding for entity \"" + g.entity_name(v) + "\"");
  return FeatureSource::from_matrix(std::move(m));
}

FeatureSource load_embeddings(const std::filesystem::path& path, const kg::KnowledgeGraph& g) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open embedding file " + path.string());
  return read_embeddings_csv(in, g);
}

}  // namespace kgprobe::gnn
