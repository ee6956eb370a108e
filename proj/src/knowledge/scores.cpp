#include "kgprobe/knowledge/scores.hpp"

#include <map>
#include <tuple>

#include "kgprobe/error.hpp"

namespace kgprobe::knowledge {
namespace {

using TripletKey = std::tuple<std::string, std::string, std::string, std::string>;

TripletKey key_of(const kg::Triplet& t) {
  return {t.head, t.relation, t.tail, t.timestamp ? kg::format_date(*t.timestamp) : std::string()};
}

std::string describe(const kg::Triplet& t) { return "(" + t.head + ", " + t.relation + ", " + t.tail + ")"; }

}  // namespace

std::string_view to_string(Variant v) { return v == Variant::plain ? "plain" : "temporal"; }

std::size_t ScoreTable::scored_count() const {
  std::size_t n = 0;
  for (const auto& s : scores) n += s.knowledgeability.has_value();
  return n;
}

std::vector<std::optional<double>> ScoreTable::values() const {
  std::vector<std::optional<double>> out;
  out.reserve(scores.size());
  for (const auto& s : scores) out.push_back(s.knowledgeability);
  return out;
}

std::vector<kg::EntityId> ScoreTable::scored_ids() const {
  std::vector<kg::EntityId> out;
  for (kg::EntityId v = 0; v < scores.size(); ++v)
    if (scores[v].knowledgeability) out.push_back(v);
  return out;
}

ScoreTable entity_knowledgeability(std::span<const prompting::ProbeRecord> records,
                                   std::span<const prompting::ProbeFailure> failures, const kg::KnowledgeGraph& g,
                                   Variant variant) {
  std::map<TripletKey, std::vector<kg::TripletId>> ids;
  for (kg::TripletId i = 0; i < g.num_triplets(); ++i) ids[key_of(g.triplet(i))].push_back(i);

  // 0/1 verdict, 2 = failed, -1 = unprobed
  std::vector<int> state(g.num_triplets(), -1);
  for (const auto& f : failures) {
    auto it = ids.find(key_of(f.triplet));
    if (it == ids.end()) throw InputError("probe failure refers to unknown triplet " + describe(f.triplet));
    for (auto i : it->second)
      if (state[i] < 0) state[i] = 2;
  }
  for (const auto& r : records) {
    auto it = ids.find(key_of(r.triplet));
    if (it == ids.end()) throw InputError("probe record refers to unknown triplet " + describe(r.triplet));
    for (auto i : it->second) state[i] = r.verdict;
  }

  ScoreTable table;
  table.variant = variant;
  table.entities = g.entities();
  table.scores.resize(g.num_entities());
  for (kg::EntityId v = 0; v < g.num_entities(); ++v) {
    std::size_t positive = 0;
    auto& s = table.scores[v];
    for (kg::TripletId i : g.incident(v)) {
      if (state[i] == 2) {
        ++s.n_failed;
      } else if (state[i] >= 0) {
        ++s.n_probed;
        positive += static_cast<std::size_t>(state[i]);
      }
    }
    if (s.n_probed > 0) s.knowledgeability = static_cast<double>(positive) / static_cast<double>(s.n_probed);
  }
  return table;
}

ScoreTable score_table_from_values(const kg::KnowledgeGraph& g, std::span<const std::optional<double>> values,
                                   Variant variant) {
  if (values.size() != g.num_entities()) throw InputError("score vector length differs from entity count");
  ScoreTable table;
  table.variant = variant;
  table.entities = g.entities();
  table.scores.resize(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] && !(*values[i] >= 0.0 && *values[i] <= 1.0))
      throw InputError("knowledgeability must lie in [0, 1] for entity " + g.entity_name(static_cast<kg::EntityId>(i)));
    table.scores[i].knowledgeability = values[i];
    table.scores[i].n_probed = values[i] ? 1 : 0;
  }
  return table;
}

}  // namespace kgprobe::knowledge
