#include "kgprobe/selection/selection.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <tuple>

#include "kgprobe/error.hpp"
#include "kgprobe/prompting/probe.hpp"
#include "kgprobe/selection/random.hpp"

namespace kgprobe::selection {
namespace {

enum Stream : std::uint64_t { kEval = 1, kInitial = 2, kRank = 3, kExpansion = 4, kRandom = 5, kCorrupt = 6 };

void sort_ids(TripletIds& ids) { std::sort(ids.begin(), ids.end()); }

}  // namespace

std::string_view to_string(Strategy s) { return s == Strategy::graph ? "graph" : "random"; }

Strategy parse_strategy(std::string_view s) {
  if (s == "graph") return Strategy::graph;
  if (s == "random") return Strategy::random;
  throw InputError("unknown strategy \"" + std::string(s) + "\" (expected graph or random)");
}

void TripletPool::exclude(std::span<const kg::TripletId> ids) {
  for (auto id : ids) {
    if (id >= allowed_.size()) throw InputError("triplet id out of range");
    if (allowed_[id]) {
      allowed_[id] = false;
      --size_;
    }
  }
}

TripletIds build_initial_query_set(const kg::KnowledgeGraph& g, std::size_t budget, std::uint64_t seed,
                                   const TripletPool& pool) {
  if (budget < 5) throw InputError("budget must be at least 5, got " + std::to_string(budget));
  if (budget > pool.size())
    throw InputError("budget " + std::to_string(budget) + " exceeds the " + std::to_string(pool.size()) +
                     " selectable triplets");
  Rng rng(derive_seed(seed, kInitial));
  std::vector<kg::EntityId> entities(g.num_entities());
  for (kg::EntityId v = 0; v < entities.size(); ++v) entities[v] = v;
  rng.shuffle(entities);

  std::size_t need = initial_quota(budget);
  std::vector<bool> taken(g.num_triplets(), false);
  TripletIds out;
  for (kg::EntityId v : entities) {
    if (need == 0) break;
    std::vector<kg::TripletId> fresh;
    for (auto id : g.incident(v))
      if (pool.contains(id) && !taken[id]) fresh.push_back(id);
    if (fresh.size() > need) rng.sample_in_place(fresh, need);
    for (auto id : fresh) taken[id] = true;
    need -= fresh.size();
    out.insert(out.end(), fresh.begin(), fresh.end());
  }
  sort_ids(out);
  return out;
}

TripletIds build_initial_query_set(const kg::KnowledgeGraph& g, std::size_t budget, std::uint64_t seed) {
  return build_initial_query_set(g, budget, seed, TripletPool(g.num_triplets()));
}

bool ranks_before(const RankedEntity& a, const RankedEntity& b, bool known_first) {
  if (a.ignorance != b.ignorance) return known_first ? a.ignorance < b.ignorance : a.ignorance > b.ignorance;
  if (a.degree != b.degree) return a.degree < b.degree;
  if (a.draw != b.draw) return a.draw < b.draw;
  return a.entity < b.entity;
}

IgnoranceRanking rank_by_ignorance(std::span<const std::optional<double>> predicted, const kg::KnowledgeGraph& g,
                                   std::uint64_t seed, std::span<const kg::EntityId> exclude, bool known_first) {
  if (predicted.size() != g.num_entities()) throw InputError("prediction vector length differs from entity count");
  std::vector<bool> skip(g.num_entities(), false);
  for (auto v : exclude) skip.at(v) = true;
  Rng rng(derive_seed(seed, kRank));
  IgnoranceRanking ranking;
  for (kg::EntityId v = 0; v < g.num_entities(); ++v) {
    const std::uint64_t draw = rng.next();  // drawn for every entity so exclusions don't shift others
    if (skip[v]) continue;
    if (!predicted[v]) throw InputError("no predicted knowledgeability for entity \"" + g.entity_name(v) + "\"");
    ranking.order.push_back({v, 1.0 - *predicted[v], g.incident(v).size(), draw});
  }
  std::sort(ranking.order.begin(), ranking.order.end(),
            [known_first](const RankedEntity& a, const RankedEntity& b) { return ranks_before(a, b, known_first); });
  return ranking;
}

namespace {

std::vector<bool> mark(std::size_t n, std::span<const kg::TripletId> ids) {
  std::vector<bool> m(n, false);
  for (auto id : ids) m.at(id) = true;
  return m;
}

std::size_t available(const TripletPool& pool, const std::vector<bool>& taken) {
  std::size_t n = 0;
  for (std::size_t id = 0; id < taken.size(); ++id) n += pool.contains(id) && !taken[id];
  return n;
}

}  // namespace

TripletIds build_expansion_set(const kg::KnowledgeGraph& g, const IgnoranceRanking& ranking, std::size_t remaining,
                               std::span<const kg::TripletId> already, std::uint64_t seed, const TripletPool& pool) {
  auto taken = mark(g.num_triplets(), already);
  if (remaining > available(pool, taken))
    throw InputError("not enough unselected triplets for an expansion of " + std::to_string(remaining));
  Rng rng(derive_seed(seed, kExpansion));
  TripletIds out;
  std::size_t need = remaining;
  for (const auto& entry : ranking.order) {
    if (need == 0) break;
    std::vector<kg::TripletId> fresh;
    for (auto id : g.incident(entry.entity))
      if (pool.contains(id) && !taken[id]) fresh.push_back(id);
    if (fresh.size() > need) rng.sample_in_place(fresh, need);
    for (auto id : fresh) taken[id] = true;
    need -= fresh.size();
    out.insert(out.end(), fresh.begin(), fresh.end());
  }
  if (need > 0) throw InputError("ranking ran out of entities with unselected triplets");
  sort_ids(out);
  return out;
}

TripletIds build_random_expansion(const kg::KnowledgeGraph& g, std::size_t remaining,
                                  std::span<const kg::TripletId> already, std::uint64_t seed,
                                  const TripletPool& pool) {
  auto taken = mark(g.num_triplets(), already);
  TripletIds candidates;
  for (kg::TripletId id = 0; id < g.num_triplets(); ++id)
    if (pool.contains(id) && !taken[id]) candidates.push_back(id);
  if (remaining > candidates.size())
    throw InputError("not enough unselected triplets for an expansion of " + std::to_string(remaining));
  Rng rng(derive_seed(seed, kRandom));
  rng.sample_in_place(candidates, remaining);
  sort_ids(candidates);
  return candidates;
}

TripletIds carve_eval_set(const kg::KnowledgeGraph& g, std::size_t size, std::uint64_t seed) {
  if (size > g.num_triplets()) throw InputError("eval set larger than the triplet set");
  TripletIds all(g.num_triplets());
  for (kg::TripletId id = 0; id < all.size(); ++id) all[id] = id;
  Rng rng(derive_seed(seed, kEval));
  rng.sample_in_place(all, size);
  sort_ids(all);
  return all;
}

PlanBase prepare_plan(const kg::KnowledgeGraph& g, const PlanOptions& options) {
  PlanBase base;
  base.options = options;
  base.pool = TripletPool(g.num_triplets());
  base.eval_ids = carve_eval_set(g, options.eval_size, options.seed);
  if (!options.allow_eval_overlap) base.pool.exclude(base.eval_ids);
  base.initial_ids = build_initial_query_set(g, options.budget, options.seed, base.pool);
  return base;
}

SelectionPlan finish_random_plan(const kg::KnowledgeGraph& g, const PlanBase& base) {
  SelectionPlan plan{base.options.budget, base.options.seed, Strategy::random, base.initial_ids, {}, base.eval_ids};
  plan.expansion_ids = build_random_expansion(g, base.options.budget - base.initial_ids.size(), base.initial_ids,
                                              base.options.seed, base.pool);
  return plan;
}

SelectionPlan finish_graph_plan(const kg::KnowledgeGraph& g, const PlanBase& base,
                                std::span<const std::optional<double>> predicted) {
  SelectionPlan plan{base.options.budget, base.options.seed, Strategy::graph, base.initial_ids, {}, base.eval_ids};
  auto ranking = rank_by_ignorance(predicted, g, base.options.seed, {}, base.options.known_first);
  plan.expansion_ids = build_expansion_set(g, ranking, base.options.budget - base.initial_ids.size(),
                                           base.initial_ids, base.options.seed, base.pool);
  return plan;
}

nlohmann::json plan_to_json(const SelectionPlan& plan) {
  return {{"budget", plan.budget},
          {"seed", plan.seed},
          {"strategy", to_string(plan.strategy)},
          {"initial_ids", plan.initial_ids},
          {"expansion_ids", plan.expansion_ids},
          {"eval_ids", plan.eval_ids},
          {"generator_version", kGeneratorVersion}};
}

SelectionPlan plan_from_json(const nlohmann::json& j) {
  try {
    SelectionPlan p;
    p.budget = j.at("budget").get<std::size_t>();
    p.seed = j.at("seed").get<std::uint64_t>();
    p.strategy = parse_strategy(j.at("strategy").get<std::string>());
    p.initial_ids = j.at("initial_ids").get<TripletIds>();
    p.expansion_ids = j.at("expansion_ids").get<TripletIds>();
    p.eval_ids = j.at("eval_ids").get<TripletIds>();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed plan manifest: ") + e.what());
  }
}

namespace {

nlohmann::json make_record(const kg::Triplet& t, std::string statement, bool label, kg::TripletId id) {
  nlohmann::json r = {{"statement", std::move(statement)},
                      {"label", label ? "True" : "False"},
                      {"head", t.head},
                      {"relation", t.relation},
                      {"tail", t.tail},
                      {"triplet_id", id}};
  if (t.timestamp) r["timestamp"] = kg::format_date(*t.timestamp);
  return r;
}

}  // namespace

EmitResult emit_finetune_records(const kg::KnowledgeGraph& g, std::span<const kg::TripletId> ids,
                                 const prompting::TemplateMap& templates, const EmitOptions& options) {
  std::vector<kg::Triplet> chosen;
  for (auto id : ids) chosen.push_back(g.triplet(id));
  templates.require_all(chosen);

  std::set<std::tuple<kg::EntityId, kg::RelationId, kg::EntityId>> facts;
  std::vector<kg::EntityId> heads, tails;
  if (options.corrupt) {
    std::vector<bool> is_head(g.num_entities(), false), is_tail(g.num_entities(), false);
    for (const auto& e : g.edges()) {
      facts.emplace(e.head, e.relation, e.tail);
      is_head[e.head] = true;
      is_tail[e.tail] = true;
    }
    for (kg::EntityId v = 0; v < g.num_entities(); ++v) {
      if (is_head[v]) heads.push_back(v);
      if (is_tail[v]) tails.push_back(v);
    }
  }

  Rng rng(derive_seed(options.seed, kCorrupt));
  EmitResult result;
  for (auto id : ids) {
    const auto& t = g.triplet(id);
    result.records.push_back(make_record(t, prompting::statement_for(t, templates, options.temporal), true, id));
    if (!options.corrupt) continue;
    const auto& e = g.edge(id);
    bool found = false;
    for (int draw = 0; draw < options.max_corruption_draws && !found; ++draw) {
      const bool replace_head = rng.below(2) == 0;
      const auto& pool = replace_head ? heads : tails;
      const kg::EntityId pick = pool[rng.below(pool.size())];
      const kg::EntityId h = replace_head ? pick : e.head;
      const kg::EntityId tl = replace_head ? e.tail : pick;
      if (facts.count({h, e.relation, tl})) continue;
      kg::Triplet neg = t;
      (replace_head ? neg.head : neg.tail) = g.entity_name(pick);
      auto rec = make_record(neg, prompting::statement_for(neg, templates, options.temporal), false, id);
      rec["corrupted"] = replace_head ? "head" : "tail";
      result.records.push_back(std::move(rec));
      found = true;
    }
    if (!found)
      result.errors.push_back("no valid negative for triplet " + std::to_string(id) + " (" + t.head + ", " +
                              t.relation + ", " + t.tail + ") after " +
                              std::to_string(options.max_corruption_draws) + " draws");
  }
  return result;
}

void write_jsonl(std::ostream& out, std::span<const nlohmann::json> records) {
  for (const auto& r : records) out << r.dump() << '\n';
}

}  // namespace kgprobe::selection
