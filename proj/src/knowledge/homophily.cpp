#include "kgprobe/knowledge/homophily.hpp"

#include <cmath>

#include "kgprobe/error.hpp"

namespace kgprobe::knowledge {

std::optional<double> node_homophily(kg::EntityId v, const ScoreTable& scores, const kg::KnowledgeGraph& g) {
  if (scores.size() != g.num_entities()) throw InputError("score table does not match graph");
  const auto& kv = scores.scores.at(v).knowledgeability;
  if (!kv) return std::nullopt;
  double sum = 0.0;
  std::size_t m = 0;
  for (kg::EntityId u : g.neighbors(v)) {
    const auto& ku = scores.scores[u].knowledgeability;
    if (!ku) continue;
    sum += std::abs(*kv - *ku);
    ++m;
  }
  if (m == 0) return std::nullopt;
  return 1.0 - sum / static_cast<double>(m);
}

HomophilyTable homophily_table(const ScoreTable& scores, const kg::KnowledgeGraph& g) {
  HomophilyTable table;
  table.values.resize(g.num_entities());
  double sum = 0.0;
  for (kg::EntityId v = 0; v < g.num_entities(); ++v) {
    table.values[v] = node_homophily(v, scores, g);
    if (table.values[v]) {
      sum += *table.values[v];
      ++table.defined;
    }
  }
  if (table.defined > 0) table.graph_mean = sum / static_cast<double>(table.defined);
  return table;
}

double graph_homophily(const ScoreTable& scores, const kg::KnowledgeGraph& g) {
  auto table = homophily_table(scores, g);
  if (!table.graph_mean) throw InputError("graph homophily undefined: no entity has a scored neighbour");
  return *table.graph_mean;
}

}  // namespace kgprobe::knowledge
