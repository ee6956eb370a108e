#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgprobe/kg/graph.hpp"
#include "kgprobe/prompting/probe.hpp"

namespace kgprobe::knowledge {

enum class Variant { plain, temporal };

std::string_view to_string(Variant v);

struct EntityScore {
  std::optional<double> knowledgeability;  // absent when nothing was probed
  std::size_t n_probed = 0;
  std::size_t n_failed = 0;
};

/// Per-entity knowledgeability, indexed like the graph the table was built on.
struct ScoreTable {
  Variant variant = Variant::plain;
  std::vector<std::string> entities;
  std::vector<EntityScore> scores;

  std::size_t size() const noexcept { return scores.size(); }
  std::size_t scored_count() const;
  std::vector<std::optional<double>> values() const;
  std::vector<kg::EntityId> scored_ids() const;
};

/// Mean verdict over each entity's incident probed triplets. Parallel
/// triplets count separately; a self-loop counts once. Failed probes are
/// tallied in n_failed and excluded from the mean. Throws InputError when a
/// record or failure refers to a triplet absent from `g`.
ScoreTable entity_knowledgeability(std::span<const prompting::ProbeRecord> records,
                                   std::span<const prompting::ProbeFailure> failures, const kg::KnowledgeGraph& g,
                                   Variant variant = Variant::plain);

/// Table from explicit per-entity values (synthetic benchmarks, tests).
ScoreTable score_table_from_values(const kg::KnowledgeGraph& g, std::span<const std::optional<double>> values,
                                   Variant variant = Variant::plain);

}  // namespace kgprobe::knowledge
