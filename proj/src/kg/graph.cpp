#include "kgprobe/kg/graph.hpp"

#include <algorithm>
#include <limits>

#include "kgprobe/error.hpp"

namespace kgprobe::kg {
namespace {

template <class Pairs>
void to_csr(std::size_t n, Pairs& pairs, std::vector<std::size_t>& offsets, std::vector<EntityId>& ids) {
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  offsets.assign(n + 1, 0);
  for (const auto& [a, b] : pairs) ++offsets[a + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  ids.resize(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) ids[i] = pairs[i].second;
}

}  // namespace

KnowledgeGraph KnowledgeGraph::from_triplets(TripletSet triplets) {
  KnowledgeGraph g;
  g.triplets_ = std::move(triplets);
  for (const auto& t : g.triplets_) {
    for (const std::string* name : {&t.head, &t.tail}) {
      if (g.entity_index_.emplace(*name, static_cast<EntityId>(g.entities_.size())).second)
        g.entities_.push_back(*name);
    }
  }
  g.index();
  return g;
}

KnowledgeGraph KnowledgeGraph::with_entities(std::vector<std::string> entities, TripletSet triplets) {
  KnowledgeGraph g;
  g.entities_ = std::move(entities);
  for (std::size_t i = 0; i < g.entities_.size(); ++i) {
    if (!g.entity_index_.emplace(g.entities_[i], static_cast<EntityId>(i)).second)
      throw InputError("duplicate entity \"" + g.entities_[i] + "\"");
  }
  g.triplets_ = std::move(triplets);
  for (const auto& t : g.triplets_) {
    if (!g.entity_index_.count(t.head) || !g.entity_index_.count(t.tail))
      throw InputError("triplet endpoint missing from entity list: " + t.head + " / " + t.tail);
  }
  g.index();
  return g;
}

void KnowledgeGraph::index() {
  if (entities_.size() >= std::numeric_limits<EntityId>::max()) throw InputError("too many entities");
  const std::size_t n = entities_.size();

  std::unordered_map<std::string, RelationId> relation_index;
  edges_.clear();
  edges_.reserve(triplets_.size());
  for (const auto& t : triplets_) {
    auto [it, inserted] = relation_index.emplace(t.relation, static_cast<RelationId>(relations_.size()));
    if (inserted) relations_.push_back(t.relation);
    edges_.push_back({entity_index_.at(t.head), it->second, entity_index_.at(t.tail)});
  }

  incident_offsets_.assign(n + 1, 0);
  for (const auto& e : edges_) {
    ++incident_offsets_[e.head + 1];
    if (e.tail != e.head) ++incident_offsets_[e.tail + 1];
  }
  for (std::size_t i = 0; i < n; ++i) incident_offsets_[i + 1] += incident_offsets_[i];
  incident_ids_.resize(incident_offsets_[n]);
  std::vector<std::size_t> cursor(incident_offsets_.begin(), incident_offsets_.end() - 1);
  for (TripletId i = 0; i < edges_.size(); ++i) {
    const auto& e = edges_[i];
    incident_ids_[cursor[e.head]++] = i;
    if (e.tail != e.head) incident_ids_[cursor[e.tail]++] = i;
  }

  std::vector<std::pair<EntityId, EntityId>> undirected;
  std::vector<std::pair<EntityId, EntityId>> directed;
  undirected.reserve(2 * edges_.size());
  directed.reserve(edges_.size());
  for (const auto& e : edges_) {
    if (e.head == e.tail) continue;
    undirected.emplace_back(e.head, e.tail);
    undirected.emplace_back(e.tail, e.head);
    directed.emplace_back(e.head, e.tail);
  }
  to_csr(n, undirected, neighbor_offsets_, neighbor_ids_);
  to_csr(n, directed, successor_offsets_, successor_ids_);
}

std::optional<EntityId> KnowledgeGraph::find_entity(std::string_view name) const {
  auto it = entity_index_.find(std::string(name));
  if (it == entity_index_.end()) return std::nullopt;
  return it->second;
}

EntityId KnowledgeGraph::require_entity(std::string_view name) const {
  auto id = find_entity(name);
  if (!id) throw InputError("unknown entity \"" + std::string(name) + "\"");
  return *id;
}

std::span<const TripletId> KnowledgeGraph::incident(EntityId v) const {
  if (v >= entities_.size()) throw InputError("entity id out of range");
  return {incident_ids_.data() + incident_offsets_[v], incident_offsets_[v + 1] - incident_offsets_[v]};
}

std::span<const EntityId> KnowledgeGraph::neighbors(EntityId v) const {
  if (v >= entities_.size()) throw InputError("entity id out of range");
  return {neighbor_ids_.data() + neighbor_offsets_[v], neighbor_offsets_[v + 1] - neighbor_offsets_[v]};
}

std::span<const EntityId> KnowledgeGraph::successors(EntityId v) const {
  if (v >= entities_.size()) throw InputError("entity id out of range");
  return {successor_ids_.data() + successor_offsets_[v], successor_offsets_[v + 1] - successor_offsets_[v]};
}

}  // namespace kgprobe::kg
