#include "kgprobe/gnn/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <tuple>

#include "kgprobe/error.hpp"
#include "kgprobe/gnn/kernels.hpp"
#include "kgprobe/knowledge/distribution.hpp"

namespace kgprobe::gnn {

OptimizerKind parse_optimizer(std::string_view s) {
  if (s == "adam") return OptimizerKind::adam;
  if (s == "sgd") return OptimizerKind::sgd;
  throw InputError("unknown optimizer \"" + std::string(s) + "\" (expected adam or sgd)");
}

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "sgd"; }

void TrainConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InputError("train fraction must lie in (0, 1)");
  if (epochs < 1) throw InputError("epochs must be at least 1");
  if (!(learning_rate > 0.0)) throw InputError("learning rate must be positive");
  if (!(weight_decay >= 0.0)) throw InputError("weight decay must be non-negative");
  if (optimizer == OptimizerKind::adam &&
      !(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0 && epsilon > 0.0))
    throw InputError("adam parameters out of range");
}

std::pair<std::vector<kg::EntityId>, std::vector<kg::EntityId>> stratified_split(
    const knowledge::ScoreTable& scores, double train_fraction, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eed5b1177ULL);
  std::vector<std::tuple<std::size_t, std::uint64_t, kg::EntityId>> order;
  for (kg::EntityId v = 0; v < scores.size(); ++v) {
    const auto& k = scores.scores[v].knowledgeability;
    if (!k) continue;
    order.emplace_back(knowledge::histogram_bin(*k, knowledge::kDefaultHistogramBins), rng(), v);
  }
  std::sort(order.begin(), order.end());
  // Systematic sampling over the stratum-sorted list keeps every bucket
  // close to the requested proportion.
  std::vector<kg::EntityId> train_ids, val_ids;
  double acc = 0.5;
  for (const auto& [bin, key, v] : order) {
    acc += train_fraction;
    if (acc >= 1.0) {
      acc -= 1.0;
      train_ids.push_back(v);
    } else {
      val_ids.push_back(v);
    }
  }
  if (val_ids.empty() && train_ids.size() > 1) {
    val_ids.push_back(train_ids.back());
    train_ids.pop_back();
  }
  if (train_ids.empty() && val_ids.size() > 1) {
    train_ids.push_back(val_ids.back());
    val_ids.pop_back();
  }
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(val_ids.begin(), val_ids.end());
  return {train_ids, val_ids};
}

Metrics evaluate_predictions(std::span<const double> predictions, const knowledge::ScoreTable& scores,
                             std::span<const kg::EntityId> test_set) {
  if (test_set.empty()) throw InputError("evaluation needs a non-empty test set");
  double abs_sum = 0.0, sq_sum = 0.0;
  for (auto id : test_set) {
    const auto& k = scores.scores.at(id).knowledgeability;
    if (!k) throw InputError("test entity \"" + scores.entities.at(id) + "\" has no knowledgeability score");
    const double d = predictions[id] - *k;
    abs_sum += std::abs(d);
    sq_sum += d * d;
  }
  const double n = static_cast<double>(test_set.size());
  Metrics m;
  m.mae = abs_sum / n;
  m.mse = sq_sum / n;
  m.one_minus_mae = 1.0 - m.mae;
  return m;
}

Metrics evaluate(const GnnModel& model, const kg::KnowledgeGraph& g, const FeatureSource& feats,
                 const knowledge::ScoreTable& scores, std::span<const kg::EntityId> test_set) {
  if (test_set.empty()) throw InputError("evaluation needs a non-empty test set");
  auto preds = forward(model, g, feats);
  return evaluate_predictions(preds, scores, test_set);
}

namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& cfg, const GnnModel& model) : cfg_(cfg), m_(zeros_like(model)), v_(zeros_like(model)) {}

  void step(GnnModel& model, const GnnModel& grad) {
    const auto& k = simd::active_kernels();
    ++t_;
    std::vector<std::span<double>> params, moments1, moments2;
    std::vector<std::span<const double>> grads;
    for_each_parameter(model, [&](std::span<double> p) { params.push_back(p); });
    for_each_parameter(grad, [&](auto p) { grads.emplace_back(p.data(), p.size()); });
    for_each_parameter(m_, [&](std::span<double> p) { moments1.push_back(p); });
    for_each_parameter(v_, [&](std::span<double> p) { moments2.push_back(p); });

    if (cfg_.optimizer == OptimizerKind::sgd) {
      for (std::size_t b = 0; b < params.size(); ++b)
        k.axpy(-cfg_.learning_rate, grads[b].data(), params[b].data(), params[b].size());
      return;
    }
    const double t = static_cast<double>(t_);
    const double c1 = 1.0 - std::pow(cfg_.beta1, t);
    const double c2 = std::sqrt(1.0 - std::pow(cfg_.beta2, t));
    const double lr_t = cfg_.learning_rate * c2 / c1;
    const double eps_t = cfg_.epsilon * c2;
    for (std::size_t b = 0; b < params.size(); ++b)
      k.adam(params[b].data(), grads[b].data(), moments1[b].data(), moments2[b].data(), params[b].size(), lr_t,
             cfg_.beta1, cfg_.beta2, eps_t);
  }

 private:
  TrainConfig cfg_;
  GnnModel m_;
  GnnModel v_;
  std::size_t t_ = 0;
};

void add_weight_decay(const GnnModel& model, GnnModel& grad, double lambda) {
  if (lambda == 0.0) return;
  const auto& k = simd::active_kernels();
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const auto& w = model.layers[l].weight;
    k.axpy(2.0 * lambda, w.data(), grad.layers[l].weight.data(), w.size());
    const auto& wn = model.layers[l].neighbor_weight;
    if (!wn.empty()) k.axpy(2.0 * lambda, wn.data(), grad.layers[l].neighbor_weight.data(), wn.size());
  }
  k.axpy(2.0 * lambda, model.head_weight.data(), grad.head_weight.data(), model.head_weight.size());
}

}  // namespace

TrainResult train(const kg::KnowledgeGraph& g, const FeatureSource& feats, const knowledge::ScoreTable& scores,
                  const TrainConfig& cfg, const ModelSpec& spec) {
  cfg.validate();
  if (scores.size() != g.num_entities()) throw InputError("score table does not match graph");
  const std::size_t scored = scores.scored_count();
  if (scored < kMinScoredEntities)
    throw InputError("training needs at least " + std::to_string(kMinScoredEntities) + " scored entities, got " +
                     std::to_string(scored));

  TrainResult result;
  std::tie(result.train_ids, result.val_ids) = stratified_split(scores, cfg.train_fraction, cfg.seed);

  std::vector<double> targets(g.num_entities(), 0.0);
  for (kg::EntityId v = 0; v < g.num_entities(); ++v)
    if (scores.scores[v].knowledgeability) targets[v] = *scores.scores[v].knowledgeability;

  Propagation prop(g, spec);
  GnnModel model = init_model(spec, feats.mode, feats.dim(), cfg.seed);
  Optimizer opt(cfg, model);
  double best_mae = std::numeric_limits<double>::infinity();
  result.model = model;

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    auto state = forward_state(model, prop, feats);
    const double train_loss = loss(state.predictions, targets, result.train_ids);
    if (!std::isfinite(train_loss)) throw NumericError("training diverged at epoch " + std::to_string(epoch));
    const double val_mae = evaluate_predictions(state.predictions, scores, result.val_ids).mae;
    result.history.push_back({epoch, train_loss, val_mae});
    if (val_mae < best_mae) {
      best_mae = val_mae;
      result.best_epoch = epoch;
      result.model = model;
    } else if (epoch - result.best_epoch >= cfg.patience) {
      break;
    }
    GnnModel grad = backward(model, prop, feats, state, targets, result.train_ids);
    add_weight_decay(model, grad, cfg.weight_decay);
    opt.step(model, grad);
  }
  return result;
}

void write_history_csv(std::ostream& out, std::span<const EpochRecord> history) {
  out << "epoch,train_loss,val_mae\n";
  for (const auto& e : history)
    out << e.epoch << ',' << knowledge::format_double(e.train_loss) << ',' << knowledge::format_double(e.val_mae)
        << '\n';
}

}  // namespace kgprobe::gnn
