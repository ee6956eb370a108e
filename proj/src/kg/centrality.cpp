#include "kgprobe/kg/centrality.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "kgprobe/error.hpp"
#include "kgprobe/kg/structure.hpp"

namespace kgprobe::kg {
namespace {

std::vector<double> degree_centrality(const KnowledgeGraph& g) {
  const std::size_t n = g.num_entities();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (EntityId v = 0; v < n; ++v)
    out[v] = static_cast<double>(g.neighbors(v).size()) / static_cast<double>(n - 1);
  return out;
}

std::vector<double> pagerank(const KnowledgeGraph& g, const CentralityParams& p) {
  const std::size_t n = g.num_entities();
  if (n == 0) return {};
  if (!(p.damping >= 0.0 && p.damping < 1.0)) throw InputError("pagerank damping must lie in [0, 1)");
  const double nd = static_cast<double>(n);
  std::vector<double> x(n, 1.0 / nd), next(n);
  for (std::size_t it = 0; it < p.max_iterations; ++it) {
    double dangling = 0.0;
    for (EntityId v = 0; v < n; ++v)
      if (g.neighbors(v).empty()) dangling += x[v];
    const double base = (1.0 - p.damping) / nd + p.damping * dangling / nd;
    for (EntityId v = 0; v < n; ++v) {
      double in = 0.0;
      for (EntityId u : g.neighbors(v)) in += x[u] / static_cast<double>(g.neighbors(u).size());
      next[v] = base + p.damping * in;
    }
    double residual = 0.0;
    for (EntityId v = 0; v < n; ++v) residual += std::abs(next[v] - x[v]);
    x.swap(next);
    if (residual < p.pagerank_tolerance) {
      // Renormalise away round-off drift so the vector sums to one.
      double sum = 0.0;
      for (double xi : x) sum += xi;
      for (double& xi : x) xi /= sum;
      return x;
    }
  }
  throw NumericError("pagerank did not converge within " + std::to_string(p.max_iterations) + " iterations");
}

std::vector<double> katz(const KnowledgeGraph& g, const CentralityParams& p) {
  const std::size_t n = g.num_entities();
  if (n == 0) return {};
  if (!(p.katz_alpha > 0.0)) throw InputError("katz alpha must be positive");
  const double lambda = spectral_radius_estimate(g);
  if (lambda > 0.0 && p.katz_alpha >= 1.0 / lambda)
    throw NumericError("katz alpha " + std::to_string(p.katz_alpha) + " >= 1/lambda_max (lambda_max ~ " +
                       std::to_string(lambda) + ")");
  std::vector<double> x(n, p.katz_beta), next(n);
  for (std::size_t it = 0; it < p.max_iterations; ++it) {
    double step = 0.0;
    for (EntityId v = 0; v < n; ++v) {
      double s = 0.0;
      for (EntityId u : g.neighbors(v)) s += x[u];
      next[v] = p.katz_beta + p.katz_alpha * s;
      step = std::max(step, std::abs(next[v] - x[v]));
    }
    x.swap(next);
    if (step < p.katz_tolerance * std::max(1.0, std::abs(p.katz_beta))) return x;
  }
  throw NumericError("katz iteration did not converge");
}

std::vector<double> closeness(const KnowledgeGraph& g) {
  const std::size_t n = g.num_entities();
  std::vector<double> out(n, 0.0);
  std::vector<std::uint32_t> dist(n);
  std::vector<EntityId> queue(n);
  constexpr auto inf = std::numeric_limits<std::uint32_t>::max();
  for (EntityId s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), inf);
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    std::uint64_t total = 0;
    while (head < tail) {
      EntityId v = queue[head++];
      total += dist[v];
      for (EntityId w : g.neighbors(v)) {
        if (dist[w] == inf) {
          dist[w] = dist[v] + 1;
          queue[tail++] = w;
        }
      }
    }
    // tail = size of s's component
    if (total > 0) out[s] = static_cast<double>(tail - 1) / static_cast<double>(total);
  }
  return out;
}

// Brandes accumulation, one BFS per source in entity order.
std::vector<double> betweenness(const KnowledgeGraph& g) {
  const std::size_t n = g.num_entities();
  std::vector<double> cb(n, 0.0);
  if (n < 3) return cb;
  std::vector<double> sigma(n), delta(n);
  std::vector<std::int64_t> dist(n);
  std::vector<EntityId> order;
  order.reserve(n);
  for (EntityId s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    order.push_back(s);
    for (std::size_t head = 0; head < order.size(); ++head) {
      EntityId v = order[head];
      for (EntityId w : g.neighbors(v)) {
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          order.push_back(w);
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      EntityId w = *it;
      for (EntityId v : g.neighbors(w)) {
        if (dist[v] == dist[w] - 1) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
      }
      if (w != s) cb[w] += delta[w];
    }
  }
  // Undirected pairs were visited from both ends, hence (n-1)(n-2) rather than half of it.
  const double scale = 1.0 / (static_cast<double>(n - 1) * static_cast<double>(n - 2));
  for (double& c : cb) c *= scale;
  return cb;
}

}  // namespace

std::string_view to_string(CentralityKind kind) {
  switch (kind) {
    case CentralityKind::degree: return "degree";
    case CentralityKind::pagerank: return "pagerank";
    case CentralityKind::katz: return "katz";
    case CentralityKind::clustering: return "clustering";
    case CentralityKind::closeness: return "closeness";
    case CentralityKind::betweenness: return "betweenness";
  }
  return "unknown";
}

CentralityKind parse_centrality_kind(std::string_view name) {
  for (auto kind : kAllCentralities)
    if (to_string(kind) == name) return kind;
  throw InputError("unknown centrality kind \"" + std::string(name) + "\"");
}

double spectral_radius_estimate(const KnowledgeGraph& g, std::size_t max_iterations, double tolerance) {
  const std::size_t n = g.num_entities();
  if (g.num_simple_edges() == 0) return 0.0;
  // Iterate on A + I: same Perron vector, but no oscillation on bipartite graphs.
  std::vector<double> x(n, 1.0 / std::sqrt(static_cast<double>(n))), y(n);
  double estimate = 0.0;
  for (std::size_t it = 0; it < max_iterations; ++it) {
    for (EntityId v = 0; v < n; ++v) {
      double s = x[v];
      for (EntityId u : g.neighbors(v)) s += x[u];
      y[v] = s;
    }
    double norm = 0.0, rayleigh = 0.0;
    for (EntityId v = 0; v < n; ++v) {
      norm += y[v] * y[v];
      rayleigh += x[v] * y[v];
    }
    norm = std::sqrt(norm);
    for (EntityId v = 0; v < n; ++v) x[v] = y[v] / norm;
    if (std::abs(rayleigh - estimate) < tolerance * std::max(1.0, rayleigh)) {
      estimate = rayleigh;
      break;
    }
    estimate = rayleigh;
  }
  return estimate - 1.0;
}

CentralityMap centrality(const KnowledgeGraph& g, CentralityKind kind, const CentralityParams& params) {
  CentralityMap m{kind, {}};
  switch (kind) {
    case CentralityKind::degree: m.values = degree_centrality(g); break;
    case CentralityKind::pagerank: m.values = pagerank(g, params); break;
    case CentralityKind::katz: m.values = katz(g, params); break;
    case CentralityKind::closeness: m.values = closeness(g); break;
    case CentralityKind::betweenness: m.values = betweenness(g); break;
    case CentralityKind::clustering:
      m.values.resize(g.num_entities());
      for (EntityId v = 0; v < g.num_entities(); ++v) m.values[v] = clustering_coefficient(g, v);
      break;
  }
  return m;
}

CentralityMap centrality(const KnowledgeGraph& g, std::string_view kind, const CentralityParams& params) {
  return centrality(g, parse_centrality_kind(kind), params);
}

}  // namespace kgprobe::kg
