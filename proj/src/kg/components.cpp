#include "kgprobe/kg/components.hpp"

#include <algorithm>
#include <limits>

#include "kgprobe/error.hpp"

namespace kgprobe::kg {
namespace {

constexpr std::uint32_t kUnvisited = std::numeric_limits<std::uint32_t>::max();

std::vector<std::uint32_t> weak_labels(const KnowledgeGraph& g) {
  const std::size_t n = g.num_entities();
  std::vector<std::uint32_t> label(n, kUnvisited);
  std::vector<EntityId> stack;
  std::uint32_t next = 0;
  for (EntityId s = 0; s < n; ++s) {
    if (label[s] != kUnvisited) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      EntityId v = stack.back();
      stack.pop_back();
      for (EntityId w : g.neighbors(v)) {
        if (label[w] == kUnvisited) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }
  return label;
}

// Iterative Tarjan over the directed successor lists.
std::vector<std::uint32_t> strong_labels(const KnowledgeGraph& g) {
  const std::size_t n = g.num_entities();
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), label(n, kUnvisited);
  std::vector<bool> on_stack(n, false);
  std::vector<EntityId> scc_stack;
  struct Frame {
    EntityId v;
    std::size_t next_edge;
  };
  std::vector<Frame> call;
  std::uint32_t counter = 0, next_label = 0;

  for (EntityId root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.push_back({root, 0});
    index[root] = low[root] = counter++;
    scc_stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      Frame& f = call.back();
      auto succ = g.successors(f.v);
      if (f.next_edge < succ.size()) {
        EntityId w = succ[f.next_edge++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          scc_stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      EntityId v = f.v;
      call.pop_back();
      if (!call.empty()) low[call.back().v] = std::min(low[call.back().v], low[v]);
      if (low[v] == index[v]) {
        EntityId w;
        do {
          w = scc_stack.back();
          scc_stack.pop_back();
          on_stack[w] = false;
          label[w] = next_label;
        } while (w != v);
        ++next_label;
      }
    }
  }
  return label;
}

}  // namespace

Connectivity parse_connectivity(std::string_view text) {
  if (text == "weak") return Connectivity::weak;
  if (text == "strong") return Connectivity::strong;
  throw InputError("unknown component mode \"" + std::string(text) + "\" (expected weak or strong)");
}

std::vector<std::vector<EntityId>> connected_components(const KnowledgeGraph& g, Connectivity mode) {
  auto label = mode == Connectivity::weak ? weak_labels(g) : strong_labels(g);
  std::vector<std::vector<EntityId>> groups;
  std::vector<std::uint32_t> slot(g.num_entities(), kUnvisited);
  // Iterating ids in ascending order yields groups sorted by smallest member.
  for (EntityId v = 0; v < g.num_entities(); ++v) {
    auto& s = slot[label[v]];
    if (s == kUnvisited) {
      s = static_cast<std::uint32_t>(groups.size());
      groups.emplace_back();
    }
    groups[s].push_back(v);
  }
  return groups;
}

KnowledgeGraph induced_subgraph(const KnowledgeGraph& g, std::span<const EntityId> members) {
  std::vector<bool> keep(g.num_entities(), false);
  for (EntityId v : members) keep.at(v) = true;
  std::vector<std::string> entities;
  for (EntityId v = 0; v < g.num_entities(); ++v)
    if (keep[v]) entities.push_back(g.entity_name(v));
  TripletSet triplets;
  for (TripletId i = 0; i < g.num_triplets(); ++i) {
    const auto& e = g.edge(i);
    if (keep[e.head] && keep[e.tail]) triplets.push_back(g.triplet(i));
  }
  return KnowledgeGraph::with_entities(std::move(entities), std::move(triplets));
}

KnowledgeGraph largest_connected_component(const KnowledgeGraph& g, Connectivity mode) {
  if (g.empty()) throw InputError("cannot extract a component from an empty graph");
  auto groups = connected_components(g, mode);
  std::size_t best = 0;
  for (std::size_t i = 1; i < groups.size(); ++i)
    if (groups[i].size() > groups[best].size()) best = i;
  return induced_subgraph(g, groups[best]);
}

}  // namespace kgprobe::kg
