#pragma once

#include <cstddef>
#include <string_view>

#include "kgprobe/kg/graph.hpp"

namespace kgprobe::kg {

enum class DegreeKind { triplet, neighbor };

/// triplet: |T(v)|; neighbor: |N(v)|.
std::size_t degree(const KnowledgeGraph& g, EntityId v, DegreeKind kind);
std::size_t degree(const KnowledgeGraph& g, std::string_view entity, DegreeKind kind);

/// Local clustering on the undirected simple view; 0 when |N(v)| < 2.
double clustering_coefficient(const KnowledgeGraph& g, EntityId v);
double clustering_coefficient(const KnowledgeGraph& g, std::string_view entity);

/// Columns of the component statistics table.
struct GraphSummary {
  std::size_t nodes = 0;
  std::size_t triplets = 0;
  std::size_t relations = 0;
  double avg_degree_triplet = 0.0;
  double avg_degree_neighbor = 0.0;
  double avg_clustering = 0.0;
};

GraphSummary summarize(const KnowledgeGraph& g);

}  // namespace kgprobe::kg
