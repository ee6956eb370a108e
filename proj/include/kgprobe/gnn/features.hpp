#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

#include "kgprobe/gnn/dense.hpp"
#include "kgprobe/kg/graph.hpp"

namespace kgprobe::gnn {

enum class FeatureMode { one_hot, external };

/// Initial node representations. One-hot inputs are never materialised: the
/// first layer's weight matrix then has one row per entity.
struct FeatureSource {
  FeatureMode mode = FeatureMode::one_hot;
  std::size_t num_entities = 0;
  Matrix external;  // num_entities x dim, external mode only

  std::size_t dim() const noexcept { return mode == FeatureMode::one_hot ? num_entities : external.cols(); }

  static FeatureSource one_hot(std::size_t num_entities);
  static FeatureSource from_matrix(Matrix features);
};

/// Reads `entity,v_0,...,v_{d-1}` rows (header required) and orders them by
/// graph entity id. Every graph entity needs a row; extra rows are ignored.
FeatureSource read_embeddings_csv(std::istream& in, const kg::KnowledgeGraph& g);
FeatureSource load_embeddings(const std::filesystem::path& path, const kg::KnowledgeGraph& g);

}  // namespace kgprobe::gnn
