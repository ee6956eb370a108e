#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "kgprobe/kg/graph.hpp"

namespace kgprobe::kg {

enum class CentralityKind { degree, pagerank, katz, clustering, closeness, betweenness };

inline constexpr CentralityKind kAllCentralities[] = {
    CentralityKind::degree,    CentralityKind::pagerank,  CentralityKind::katz,
    CentralityKind::clustering, CentralityKind::closeness, CentralityKind::betweenness};

std::string_view to_string(CentralityKind kind);
/// Throws InputError for unknown names.
CentralityKind parse_centrality_kind(std::string_view name);

struct CentralityParams {
  double damping = 0.85;
  double pagerank_tolerance = 1e-10;  // L1 residual
  double katz_alpha = 0.005;
  double katz_beta = 1.0;
  double katz_tolerance = 1e-13;      // max-norm step
  std::size_t max_iterations = 100000;
};

/// Values indexed by EntityId.
struct CentralityMap {
  CentralityKind kind;
  std::vector<double> values;
};

/// All kinds run on the undirected simple view (parallel edges collapsed,
/// self-loops dropped).
///  - degree: |N(v)| / (|V| - 1)
///  - pagerank: power iteration, isolated nodes redistribute uniformly
///  - katz: x = beta + alpha * A x, rejected when alpha >= 1 / lambda_max
///  - closeness: (n_c - 1) / sum of distances inside v's component
///  - betweenness: Brandes, normalised by (|V| - 1)(|V| - 2) / 2
CentralityMap centrality(const KnowledgeGraph& g, CentralityKind kind, const CentralityParams& params = {});
CentralityMap centrality(const KnowledgeGraph& g, std::string_view kind, const CentralityParams& params = {});

/// Power-iteration estimate of the largest adjacency eigenvalue.
double spectral_radius_estimate(const KnowledgeGraph& g, std::size_t max_iterations = 10000,
                                double tolerance = 1e-12);

}  // namespace kgprobe::kg
