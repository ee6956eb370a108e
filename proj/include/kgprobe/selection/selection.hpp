#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "kgprobe/kg/graph.hpp"
#include "kgprobe/prompting/templates.hpp"

namespace kgprobe::selection {

using TripletIds = std::vector<kg::TripletId>;  // kept sorted ascending

enum class Strategy { graph, random };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

inline constexpr std::string_view kGeneratorVersion = "kgprobe-selection/1";

/// ceil(0.2 * budget)
constexpr std::size_t initial_quota(std::size_t budget) { return (budget + 4) / 5; }

/// Triplets eligible for selection; by default every triplet.
class TripletPool {
 public:
  explicit TripletPool(std::size_t num_triplets) : allowed_(num_triplets, true), size_(num_triplets) {}

  void exclude(std::span<const kg::TripletId> ids);
  bool contains(kg::TripletId id) const { return id < allowed_.size() && allowed_[id]; }
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return allowed_.size(); }

 private:
  std::vector<bool> allowed_;
  std::size_t size_;
};

/// Seeded entity shuffle; each entity contributes its unselected triplets
/// until ceil(0.2 * budget) is reached, the overshooting entity being
/// uniformly subsampled. Throws InputError unless 5 <= budget <= pool size.
TripletIds build_initial_query_set(const kg::KnowledgeGraph& g, std::size_t budget, std::uint64_t seed,
                                   const TripletPool& pool);
TripletIds build_initial_query_set(const kg::KnowledgeGraph& g, std::size_t budget, std::uint64_t seed);

struct RankedEntity {
  kg::EntityId entity = 0;
  double ignorance = 0.0;  // 1 - predicted knowledgeability
  std::size_t degree = 0;  // triplet degree
  std::uint64_t draw = 0;  // seeded tie-break

  bool operator==(const RankedEntity&) const = default;
};

struct IgnoranceRanking {
  std::vector<RankedEntity> order;
};

/// Strict weak order used by rank_by_ignorance: ignorance descending (or
/// ascending with known_first), then degree ascending, then draw ascending.
bool ranks_before(const RankedEntity& a, const RankedEntity& b, bool known_first = false);

/// Ranks every entity not in `exclude`. `predicted` is indexed by entity id;
/// throws InputError when a ranked entity has no prediction.
IgnoranceRanking rank_by_ignorance(std::span<const std::optional<double>> predicted, const kg::KnowledgeGraph& g,
                                   std::uint64_t seed, std::span<const kg::EntityId> exclude = {},
                                   bool known_first = false);

/// Walks the ranking adding each entity's triplets that are neither in
/// `already` nor outside the pool; the last entity is subsampled to hit
/// `remaining` exactly. Throws InputError when not enough triplets remain.
TripletIds build_expansion_set(const kg::KnowledgeGraph& g, const IgnoranceRanking& ranking, std::size_t remaining,
                               std::span<const kg::TripletId> already, std::uint64_t seed, const TripletPool& pool);

/// Uniform sample without replacement of `remaining` unselected pool triplets.
TripletIds build_random_expansion(const kg::KnowledgeGraph& g, std::size_t remaining,
                                  std::span<const kg::TripletId> already, std::uint64_t seed,
                                  const TripletPool& pool);

/// Uniform sample of `size` triplets for evaluation.
TripletIds carve_eval_set(const kg::KnowledgeGraph& g, std::size_t size, std::uint64_t seed);

struct PlanOptions {
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  std::size_t eval_size = 0;
  bool allow_eval_overlap = false;
  bool known_first = false;  // rank well-known entities first instead
};

/// Pieces shared by both strategies.
struct PlanBase {
  PlanOptions options;
  TripletIds eval_ids;
  TripletIds initial_ids;
  TripletPool pool{0};
};

struct SelectionPlan {
  std::size_t budget = 0;
  std::uint64_t seed = 0;
  Strategy strategy = Strategy::random;
  TripletIds initial_ids;
  TripletIds expansion_ids;
  TripletIds eval_ids;

  bool operator==(const SelectionPlan&) const = default;
};

PlanBase prepare_plan(const kg::KnowledgeGraph& g, const PlanOptions& options);
SelectionPlan finish_random_plan(const kg::KnowledgeGraph& g, const PlanBase& base);
SelectionPlan finish_graph_plan(const kg::KnowledgeGraph& g, const PlanBase& base,
                                std::span<const std::optional<double>> predicted);

nlohmann::json plan_to_json(const SelectionPlan& plan);
SelectionPlan plan_from_json(const nlohmann::json& j);

struct EmitOptions {
  bool temporal = false;
  bool corrupt = false;  // add one corrupted "False" statement per triplet
  std::uint64_t seed = 0;
  int max_corruption_draws = 100;
};

struct EmitResult {
  std::vector<nlohmann::json> records;
  std::vector<std::string> errors;  // triplets for which no negative was found
};

/// One {statement, label:"True", head, relation, tail[, timestamp], triplet_id}
/// record per id; with corrupt, each is followed by a "False" record whose
/// head or tail is replaced by a random entity seen in that role, never
/// reproducing an existing fact.
EmitResult emit_finetune_records(const kg::KnowledgeGraph& g, std::span<const kg::TripletId> ids,
                                 const prompting::TemplateMap& templates, const EmitOptions& options);

void write_jsonl(std::ostream& out, std::span<const nlohmann::json> records);

}  // namespace kgprobe::selection
