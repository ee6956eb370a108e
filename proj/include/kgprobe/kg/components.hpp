#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "kgprobe/kg/graph.hpp"

namespace kgprobe::kg {

enum class Connectivity { weak, strong };

Connectivity parse_connectivity(std::string_view text);

/// Components as sorted entity-id lists, ordered by their smallest member.
std::vector<std::vector<EntityId>> connected_components(const KnowledgeGraph& g, Connectivity mode);

/// Subgraph on `members` keeping every triplet with both endpoints inside.
/// Entity and triplet order follow the parent graph.
KnowledgeGraph induced_subgraph(const KnowledgeGraph& g, std::span<const EntityId> members);

/// Largest component; equal sizes resolve to the one holding the entity that
/// appeared first. Throws InputError on an empty graph.
KnowledgeGraph largest_connected_component(const KnowledgeGraph& g, Connectivity mode);

}  // namespace kgprobe::kg
