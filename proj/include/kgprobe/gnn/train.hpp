#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kgprobe/gnn/model.hpp"
#include "kgprobe/knowledge/scores.hpp"

namespace kgprobe::gnn {

enum class OptimizerKind { sgd, adam };

OptimizerKind parse_optimizer(std::string_view s);
std::string_view to_string(OptimizerKind k);

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 200;
  double train_fraction = 0.8;  // of the scored entities; the rest validates
  std::size_t patience = 20;
  double weight_decay = 0.0;    // L2 penalty on weight matrices
  OptimizerKind optimizer = OptimizerKind::adam;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t seed = 0;

  /// Throws InputError on out-of-range values.
  void validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_mae = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainResult {
  GnnModel model;  // best validation-MAE checkpoint
  std::vector<EpochRecord> history;
  std::size_t best_epoch = 0;
  std::vector<kg::EntityId> train_ids;
  std::vector<kg::EntityId> val_ids;
};

inline constexpr std::size_t kMinScoredEntities = 10;

/// Split of the scored entities, stratified by 21-bin histogram bucket.
/// Both sides are non-empty.
std::pair<std::vector<kg::EntityId>, std::vector<kg::EntityId>> stratified_split(
    const knowledge::ScoreTable& scores, double train_fraction, std::uint64_t seed);

/// Full-batch training on the scored entities of `scores`. Deterministic for a
/// fixed seed. Throws InputError when fewer than 10 entities are scored and
/// NumericError when the loss stops being finite.
TrainResult train(const kg::KnowledgeGraph& g, const FeatureSource& feats, const knowledge::ScoreTable& scores,
                  const TrainConfig& cfg, const ModelSpec& spec);

struct Metrics {
  double one_minus_mae = 0.0;
  double mae = 0.0;
  double mse = 0.0;
};

Metrics evaluate_predictions(std::span<const double> predictions, const knowledge::ScoreTable& scores,
                             std::span<const kg::EntityId> test_set);

/// Throws InputError on an empty test set or unscored test entities.
Metrics evaluate(const GnnModel& model, const kg::KnowledgeGraph& g, const FeatureSource& feats,
                 const knowledge::ScoreTable& scores, std::span<const kg::EntityId> test_set);

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history);

}  // namespace kgprobe::gnn
