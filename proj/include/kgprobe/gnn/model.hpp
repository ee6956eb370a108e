#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "kgprobe/gnn/dense.hpp"
#include "kgprobe/gnn/features.hpp"
#include "kgprobe/kg/graph.hpp"

namespace kgprobe::gnn {

enum class Architecture { gnn, mlp };

/// mean: average over N(v) ∪ {v}
/// gcn:  sum over N(v) ∪ {v} weighted 1 / sqrt((d_v + 1)(d_u + 1))
/// sage: self transform plus a separate transform of the N(v) mean
enum class Aggregation { mean, gcn, sage };

enum class Squash { clamp, sigmoid };

std::string_view to_string(Architecture a);
std::string_view to_string(Aggregation a);
std::string_view to_string(Squash s);
std::string_view to_string(FeatureMode m);
Architecture parse_architecture(std::string_view s);
Aggregation parse_aggregation(std::string_view s);
Squash parse_squash(std::string_view s);
FeatureMode parse_feature_mode(std::string_view s);

struct ModelSpec {
  Architecture architecture = Architecture::gnn;
  Aggregation aggregation = Aggregation::mean;
  std::vector<std::size_t> hidden{64, 64};  // one entry per message-passing layer
  Squash squash = Squash::clamp;

  bool operator==(const ModelSpec&) const = default;
};

struct Layer {
  Matrix weight;           // in x out
  Matrix neighbor_weight;  // in x out, sage aggregation only
  std::vector<double> bias;

  bool operator==(const Layer&) const = default;
};

/// Message-passing regressor. Layer l computes
///   Z = Agg(H) W + b,  H' = ReLU(Z)  (identity on the last layer)
/// and the head maps the last representation to clamp(h . w + c).
struct GnnModel {
  ModelSpec spec;
  FeatureMode feature_mode = FeatureMode::one_hot;
  std::size_t input_dim = 0;
  std::uint64_t seed = 0;
  std::vector<Layer> layers;
  std::vector<double> head_weight;
  double head_bias = 0.0;

  bool operator==(const GnnModel&) const = default;
};

/// Glorot-uniform weights from a seeded mt19937_64, zero biases, head bias 0.5.
GnnModel init_model(const ModelSpec& spec, FeatureMode mode, std::size_t input_dim, std::uint64_t seed);

/// Same shapes, all parameters zero.
GnnModel zeros_like(const GnnModel& model);

/// Visits every parameter block in a fixed order (per layer: weight,
/// neighbour weight, bias; then head weight, head bias).
template <class Model, class Fn>
void for_each_parameter(Model& model, Fn&& fn) {
  for (auto& layer : model.layers) {
    fn(layer.weight.values());
    if (!layer.neighbor_weight.empty()) fn(layer.neighbor_weight.values());
    fn(std::span(layer.bias));
  }
  fn(std::span(model.head_weight));
  fn(std::span(&model.head_bias, 1));
}

std::size_t parameter_count(const GnnModel& model);

/// Graph-dependent propagation operator for a model spec.
class Propagation {
 public:
  Propagation(const kg::KnowledgeGraph& g, const ModelSpec& spec);

  std::size_t size() const noexcept { return n_; }
  Architecture architecture() const noexcept { return architecture_; }
  Aggregation aggregation() const noexcept { return aggregation_; }
  /// Agg operator: N(v) ∪ {v} for mean/gcn, N(v) only for sage.
  const SparseOperator& op() const noexcept { return op_; }

 private:
  std::size_t n_ = 0;
  Architecture architecture_;
  Aggregation aggregation_;
  SparseOperator op_;
};

/// Intermediate values kept for the backward pass.
struct ForwardState {
  std::vector<Matrix> inputs;   // inputs[l] = H fed to layer l (inputs[0] empty for one-hot)
  std::vector<Matrix> preacts;  // Z of each layer
  std::vector<double> head_pre; // s = h . w + c
  std::vector<double> predictions;
};

ForwardState forward_state(const GnnModel& model, const Propagation& prop, const FeatureSource& feats);

/// Predictions in [0, 1] indexed by entity id. Throws InputError on feature
/// shape mismatch.
std::vector<double> forward(const GnnModel& model, const kg::KnowledgeGraph& g, const FeatureSource& feats);

/// Mean squared error over `train_set` (duplicates count twice). Throws
/// InputError on an empty set.
double loss(std::span<const double> predictions, std::span<const double> targets,
            std::span<const kg::EntityId> train_set);

/// Exact gradient of loss() with respect to every parameter. Clamp squashing
/// has subgradient 1 strictly inside (0, 1) and 0 elsewhere.
GnnModel backward(const GnnModel& model, const Propagation& prop, const FeatureSource& feats,
                  const ForwardState& state, std::span<const double> targets,
                  std::span<const kg::EntityId> train_set);

GnnModel backward(const GnnModel& model, const kg::KnowledgeGraph& g, const FeatureSource& feats,
                  std::span<const double> targets, std::span<const kg::EntityId> train_set);

/// Smallest |pre-activation| over ReLU and squash kinks; finite-difference
/// checks need it to exceed the step.
double min_kink_distance(const GnnModel& model, const ForwardState& state);

}  // namespace kgprobe::gnn
