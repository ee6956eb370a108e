#include "kgprobe/gnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "kgprobe/error.hpp"
#include "kgprobe/gnn/kernels.hpp"

namespace kgprobe::gnn {

std::string_view to_string(Architecture a) { return a == Architecture::gnn ? "gnn" : "mlp"; }
std::string_view to_string(Aggregation a) {
  switch (a) {
    case Aggregation::mean: return "mean";
    case Aggregation::gcn: return "gcn";
    case Aggregation::sage: return "sage";
  }
  return "mean";
}
std::string_view to_string(Squash s) { return s == Squash::clamp ? "clamp" : "sigmoid"; }
std::string_view to_string(FeatureMode m) { return m == FeatureMode::one_hot ? "one_hot" : "external"; }

Architecture parse_architecture(std::string_view s) {
  if (s == "gnn") return Architecture::gnn;
  if (s == "mlp") return Architecture::mlp;
  throw InputError("unknown architecture \"" + std::string(s) + "\" (expected gnn or mlp)");
}
Aggregation parse_aggregation(std::string_view s) {
  if (s == "mean") return Aggregation::mean;
  if (s == "gcn") return Aggregation::gcn;
  if (s == "sage") return Aggregation::sage;
  throw InputError("unknown aggregation \"" + std::string(s) + "\" (expected mean, gcn or sage)");
}
Squash parse_squash(std::string_view s) {
  if (s == "clamp") return Squash::clamp;
  if (s == "sigmoid") return Squash::sigmoid;
  throw InputError("unknown squash \"" + std::string(s) + "\" (expected clamp or sigmoid)");
}
FeatureMode parse_feature_mode(std::string_view s) {
  if (s == "one_hot" || s == "onehot") return FeatureMode::one_hot;
  if (s == "external") return FeatureMode::external;
  throw InputError("unknown feature mode \"" + std::string(s) + "\" (expected one_hot or external)");
}

namespace {

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void glorot(Matrix& w, std::mt19937_64& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
  for (double& x : w.values()) x = (2.0 * uniform01(rng) - 1.0) * a;
}

bool uses_neighbor_weight(const ModelSpec& spec) {
  return spec.architecture == Architecture::gnn && spec.aggregation == Aggregation::sage;
}

// H W, or W itself when H is the implicit identity (one-hot input).
void project(const Matrix* input, const Matrix& weight, Matrix& out) {
  if (input) matmul(*input, weight, out);
  else out = weight;
}

void project_grad(const Matrix* input, const Matrix& grad_out, Matrix& grad_weight) {
  if (input) matmul_at_b(*input, grad_out, grad_weight);
  else grad_weight = grad_out;
}

void add_into(const Matrix& src, Matrix& dst) {
  simd::active_kernels().axpy(1.0, src.data(), dst.data(), src.size());
}

double squash(Squash s, double x) {
  if (s == Squash::clamp) return std::clamp(x, 0.0, 1.0);
  return 1.0 / (1.0 + std::exp(-x));
}

double squash_slope(Squash s, double x, double y) {
  if (s == Squash::clamp) return (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
  return y * (1.0 - y);
}

}  // namespace

GnnModel init_model(const ModelSpec& spec, FeatureMode mode, std::size_t input_dim, std::uint64_t seed) {
  if (spec.hidden.empty()) throw InputError("model needs at least one message-passing layer");
  if (input_dim == 0) throw InputError("input dimension must be positive");
  GnnModel m;
  m.spec = spec;
  m.feature_mode = mode;
  m.input_dim = input_dim;
  m.seed = seed;
  std::mt19937_64 rng(seed);
  std::size_t in = input_dim;
  for (std::size_t out : spec.hidden) {
    if (out == 0) throw InputError("hidden dimensions must be positive");
    Layer layer;
    layer.weight = Matrix(in, out);
    glorot(layer.weight, rng);
    if (uses_neighbor_weight(spec)) {
      layer.neighbor_weight = Matrix(in, out);
      glorot(layer.neighbor_weight, rng);
    }
    layer.bias.assign(out, 0.0);
    m.layers.push_back(std::move(layer));
    in = out;
  }
  Matrix head(in, 1);
  glorot(head, rng);
  m.head_weight.assign(head.values().begin(), head.values().end());
  m.head_bias = 0.5;
  return m;
}

GnnModel zeros_like(const GnnModel& model) {
  GnnModel z = model;
  for_each_parameter(z, [](std::span<double> p) { std::fill(p.begin(), p.end(), 0.0); });
  return z;
}

std::size_t parameter_count(const GnnModel& model) {
  std::size_t n = 0;
  for_each_parameter(model, [&](auto p) { n += p.size(); });
  return n;
}

Propagation::Propagation(const kg::KnowledgeGraph& g, const ModelSpec& spec)
    : n_(g.num_entities()), architecture_(spec.architecture), aggregation_(spec.aggregation) {
  if (architecture_ == Architecture::mlp) return;
  std::vector<std::size_t> offsets{0};
  std::vector<std::uint32_t> cols;
  std::vector<double> weights;
  for (kg::EntityId v = 0; v < n_; ++v) {
    auto nb = g.neighbors(v);
    const double dv = static_cast<double>(nb.size());
    if (aggregation_ == Aggregation::sage) {
      for (kg::EntityId u : nb) {
        cols.push_back(u);
        weights.push_back(1.0 / dv);
      }
    } else {
      // N(v) is sorted; splice v in to keep ascending column order.
      bool self_done = false;
      auto push = [&](kg::EntityId u) {
        cols.push_back(u);
        if (aggregation_ == Aggregation::mean) {
          weights.push_back(1.0 / (dv + 1.0));
        } else {
          const double du = static_cast<double>(g.neighbors(u).size());
          weights.push_back(1.0 / std::sqrt((dv + 1.0) * (du + 1.0)));
        }
      };
      for (kg::EntityId u : nb) {
        if (!self_done && v < u) {
          push(v);
          self_done = true;
        }
        push(u);
      }
      if (!self_done) push(v);
    }
    offsets.push_back(cols.size());
  }
  op_ = SparseOperator(n_, std::move(offsets), std::move(cols), std::move(weights));
}

namespace {

void check_shapes(const GnnModel& model, const Propagation& prop, const FeatureSource& feats) {
  if (feats.mode != model.feature_mode) throw InputError("feature mode differs from the model's");
  if (feats.num_entities != prop.size()) throw InputError("feature rows differ from the graph's entity count");
  if (feats.dim() != model.input_dim)
    throw InputError("feature dimension " + std::to_string(feats.dim()) + " differs from model input dimension " +
                     std::to_string(model.input_dim));
  if (prop.architecture() != model.spec.architecture ||
      (model.spec.architecture == Architecture::gnn && prop.aggregation() != model.spec.aggregation))
    throw InputError("propagation operator built for a different model spec");
}

const Matrix* layer_input(const ForwardState& state, const FeatureSource& feats, std::size_t l) {
  if (l > 0) return &state.inputs[l];
  return feats.mode == FeatureMode::one_hot ? nullptr : &feats.external;
}

}  // namespace

ForwardState forward_state(const GnnModel& model, const Propagation& prop, const FeatureSource& feats) {
  check_shapes(model, prop, feats);
  const auto& k = simd::active_kernels();
  const std::size_t n = prop.size();
  const std::size_t depth = model.layers.size();
  ForwardState st;
  st.inputs.resize(depth + 1);
  st.preacts.resize(depth);

  for (std::size_t l = 0; l < depth; ++l) {
    const Layer& layer = model.layers[l];
    const Matrix* h = layer_input(st, feats, l);
    Matrix projected;
    project(h, layer.weight, projected);
    Matrix& z = st.preacts[l];
    if (model.spec.architecture == Architecture::mlp) {
      z = std::move(projected);
    } else if (model.spec.aggregation == Aggregation::sage) {
      z = std::move(projected);
      Matrix pn, agg;
      project(h, layer.neighbor_weight, pn);
      prop.op().apply(pn, agg);
      add_into(agg, z);
    } else {
      prop.op().apply(projected, z);
    }
    for (std::size_t i = 0; i < n; ++i) k.axpy(1.0, layer.bias.data(), z.row(i).data(), z.cols());

    Matrix& next = st.inputs[l + 1];
    if (l + 1 < depth) {
      next.resize(z.rows(), z.cols());
      k.relu(z.data(), next.data(), z.size());
    } else {
      next = z;
    }
  }

  const Matrix& last = st.inputs[depth];
  st.head_pre.resize(n);
  st.predictions.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    st.head_pre[i] = k.dot(last.row(i).data(), model.head_weight.data(), last.cols()) + model.head_bias;
    st.predictions[i] = squash(model.spec.squash, st.head_pre[i]);
  }
  return st;
}

std::vector<double> forward(const GnnModel& model, const kg::KnowledgeGraph& g, const FeatureSource& feats) {
  Propagation prop(g, model.spec);
  return forward_state(model, prop, feats).predictions;
}

double loss(std::span<const double> predictions, std::span<const double> targets,
            std::span<const kg::EntityId> train_set) {
  if (train_set.empty()) throw InputError("loss needs a non-empty training set");
  double s = 0.0;
  for (auto id : train_set) {
    const double d = predictions[id] - targets[id];
    s += d * d;
  }
  return s / static_cast<double>(train_set.size());
}

GnnModel backward(const GnnModel& model, const Propagation& prop, const FeatureSource& feats,
                  const ForwardState& state, std::span<const double> targets,
                  std::span<const kg::EntityId> train_set) {
  check_shapes(model, prop, feats);
  if (train_set.empty()) throw InputError("backward needs a non-empty training set");
  if (targets.size() != prop.size()) throw InputError("target vector length differs from entity count");
  const auto& k = simd::active_kernels();
  const std::size_t n = prop.size();
  const std::size_t depth = model.layers.size();
  GnnModel grad = zeros_like(model);

  std::vector<double> gs(n, 0.0);
  const double scale = 2.0 / static_cast<double>(train_set.size());
  for (auto id : train_set) gs[id] += scale * (state.predictions[id] - targets[id]);
  for (std::size_t i = 0; i < n; ++i)
    if (gs[i] != 0.0) gs[i] *= squash_slope(model.spec.squash, state.head_pre[i], state.predictions[i]);

  const Matrix& last = state.inputs[depth];
  Matrix dh(n, last.cols());
  for (std::size_t i = 0; i < n; ++i) {
    if (gs[i] == 0.0) continue;
    k.axpy(gs[i], last.row(i).data(), grad.head_weight.data(), last.cols());
    grad.head_bias += gs[i];
    k.axpy(gs[i], model.head_weight.data(), dh.row(i).data(), last.cols());
  }

  for (std::size_t l = depth; l-- > 0;) {
    const Layer& layer = model.layers[l];
    Layer& gl = grad.layers[l];
    Matrix dz = std::move(dh);
    if (l + 1 < depth) k.relu_backward(state.preacts[l].data(), dz.data(), dz.size());
    for (std::size_t i = 0; i < n; ++i) k.axpy(1.0, dz.row(i).data(), gl.bias.data(), dz.cols());

    const Matrix* h = layer_input(state, feats, l);
    const bool need_input_grad = l > 0;
    if (model.spec.architecture == Architecture::mlp) {
      project_grad(h, dz, gl.weight);
      if (need_input_grad) {
        dh = Matrix(n, layer.weight.rows());
        matmul_a_bt_add(dz, layer.weight, dh);
      }
    } else if (model.spec.aggregation == Aggregation::sage) {
      Matrix dn(n, dz.cols());
      prop.op().apply_transpose_add(dz, dn);
      project_grad(h, dz, gl.weight);
      project_grad(h, dn, gl.neighbor_weight);
      if (need_input_grad) {
        dh = Matrix(n, layer.weight.rows());
        matmul_a_bt_add(dz, layer.weight, dh);
        matmul_a_bt_add(dn, layer.neighbor_weight, dh);
      }
    } else {
      Matrix dm(n, dz.cols());
      prop.op().apply_transpose_add(dz, dm);
      project_grad(h, dm, gl.weight);
      if (need_input_grad) {
        dh = Matrix(n, layer.weight.rows());
        matmul_a_bt_add(dm, layer.weight, dh);
      }
    }
  }
  return grad;
}

GnnModel backward(const GnnModel& model, const kg::KnowledgeGraph& g, const FeatureSource& feats,
                  std::span<const double> targets, std::span<const kg::EntityId> train_set) {
  Propagation prop(g, model.spec);
  auto state = forward_state(model, prop, feats);
  return backward(model, prop, feats, state, targets, train_set);
}

double min_kink_distance(const GnnModel& model, const ForwardState& state) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < state.preacts.size(); ++l)
    for (double z : state.preacts[l].values()) best = std::min(best, std::abs(z));
  if (model.spec.squash == Squash::clamp)
    for (double s : state.head_pre) best = std::min({best, std::abs(s), std::abs(s - 1.0)});
  return best;
}

}  // namespace kgprobe::gnn
