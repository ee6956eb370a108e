#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "kgprobe/kg/triplet.hpp"

namespace kgprobe::kg {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;
using TripletId = std::size_t;

struct Edge {
  EntityId head;
  RelationId relation;
  EntityId tail;
};

/// Immutable directed multigraph over triplets.
///
/// Entities are indexed in first-appearance order. Derived views:
///  - incident(v): T(v), every triplet with v as head or tail (a self-loop once)
///  - neighbors(v): N(v), distinct undirected neighbours, sorted, excluding v
///  - successors(v): distinct directed out-neighbours, excluding v
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;

  static KnowledgeGraph from_triplets(TripletSet triplets);

  /// Builds a graph with an explicit entity order. Entities may be isolated;
  /// every triplet endpoint must be listed.
  static KnowledgeGraph with_entities(std::vector<std::string> entities, TripletSet triplets);

  std::size_t num_entities() const noexcept { return entities_.size(); }
  std::size_t num_triplets() const noexcept { return triplets_.size(); }
  std::size_t num_relations() const noexcept { return relations_.size(); }
  bool empty() const noexcept { return entities_.empty(); }

  const std::vector<std::string>& entities() const noexcept { return entities_; }
  const std::vector<std::string>& relations() const noexcept { return relations_; }
  const TripletSet& triplets() const noexcept { return triplets_; }

  const std::string& entity_name(EntityId id) const { return entities_.at(id); }
  const Triplet& triplet(TripletId id) const { return triplets_.at(id); }
  const Edge& edge(TripletId id) const { return edges_.at(id); }
  std::span<const Edge> edges() const noexcept { return edges_; }

  std::optional<EntityId> find_entity(std::string_view name) const;
  /// Throws InputError for unknown names.
  EntityId require_entity(std::string_view name) const;

  std::span<const TripletId> incident(EntityId v) const;
  std::span<const EntityId> neighbors(EntityId v) const;
  std::span<const EntityId> successors(EntityId v) const;

  /// Number of undirected simple edges (parallel edges and self-loops collapsed).
  std::size_t num_simple_edges() const noexcept { return neighbor_ids_.size() / 2; }

 private:
  void index();

  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  TripletSet triplets_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, EntityId> entity_index_;

  std::vector<std::size_t> incident_offsets_;
  std::vector<TripletId> incident_ids_;
  std::vector<std::size_t> neighbor_offsets_;
  std::vector<EntityId> neighbor_ids_;
  std::vector<std::size_t> successor_offsets_;
  std::vector<EntityId> successor_ids_;
};

inline KnowledgeGraph build_graph(TripletSet triplets) {
  return KnowledgeGraph::from_triplets(std::move(triplets));
}

}  // namespace kgprobe::kg
