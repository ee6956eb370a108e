#include "kgprobe/kg/structure.hpp"

#include <algorithm>

namespace kgprobe::kg {

std::size_t degree(const KnowledgeGraph& g, EntityId v, DegreeKind kind) {
  return kind == DegreeKind::triplet ? g.incident(v).size() : g.neighbors(v).size();
}

std::size_t degree(const KnowledgeGraph& g, std::string_view entity, DegreeKind kind) {
  return degree(g, g.require_entity(entity), kind);
}

double clustering_coefficient(const KnowledgeGraph& g, EntityId v) {
  auto nv = g.neighbors(v);
  const std::size_t k = nv.size();
  if (k < 2) return 0.0;
  std::size_t links = 0;
  // Neighbour lists are sorted: count |N(u) ∩ N(v)| for u in N(v) by merging.
  for (EntityId u : nv) {
    auto nu = g.neighbors(u);
    auto a = nv.begin();
    auto b = nu.begin();
    while (a != nv.end() && b != nu.end()) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else { ++links; ++a; ++b; }
    }
  }
  // Each triangle edge among neighbours was counted twice.
  return static_cast<double>(links) / static_cast<double>(k * (k - 1));
}

double clustering_coefficient(const KnowledgeGraph& g, std::string_view entity) {
  return clustering_coefficient(g, g.require_entity(entity));
}

GraphSummary summarize(const KnowledgeGraph& g) {
  GraphSummary s;
  s.nodes = g.num_entities();
  s.triplets = g.num_triplets();
  s.relations = g.num_relations();
  if (s.nodes == 0) return s;
  double td = 0, nd = 0, cc = 0;
  for (EntityId v = 0; v < s.nodes; ++v) {
    td += static_cast<double>(g.incident(v).size());
    nd += static_cast<double>(g.neighbors(v).size());
    cc += clustering_coefficient(g, v);
  }
  const double n = static_cast<double>(s.nodes);
  s.avg_degree_triplet = td / n;
  s.avg_degree_neighbor = nd / n;
  s.avg_clustering = cc / n;
  return s;
}

}  // namespace kgprobe::kg
