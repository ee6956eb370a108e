#pragma once

#include <optional>
#include <vector>

#include "kgprobe/knowledge/scores.hpp"

namespace kgprobe::knowledge {

/// 1 - mean |K(v) - K(u)| over the scored neighbours u of v. Empty when v is
/// unscored or has no scored neighbour.
std::optional<double> node_homophily(kg::EntityId v, const ScoreTable& scores, const kg::KnowledgeGraph& g);

struct HomophilyTable {
  std::vector<std::optional<double>> values;
  std::size_t defined = 0;
  std::optional<double> graph_mean;
};

HomophilyTable homophily_table(const ScoreTable& scores, const kg::KnowledgeGraph& g);

/// Mean of the defined node homophilies. Throws InputError when none is defined.
double graph_homophily(const ScoreTable& scores, const kg::KnowledgeGraph& g);

}  // namespace kgprobe::knowledge
