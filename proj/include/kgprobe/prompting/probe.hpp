#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "kgprobe/prompting/llm_client.hpp"
#include "kgprobe/prompting/probe_cache.hpp"
#include "kgprobe/prompting/templates.hpp"

namespace kgprobe::prompting {

enum class FailureKind { network, unparseable };

struct ProbeFailure {
  kg::Triplet triplet;
  std::string statement;
  FailureKind kind = FailureKind::network;
  std::string message;
  int attempts = 0;
};

struct ProbeOptions {
  bool temporal = false;
  int max_parallel = 4;
  double requests_per_second = 5.0;
  RetryPolicy retry;
  std::string system_message{kDefaultSystemMessage};
  std::string temporal_system_message{kDefaultTemporalSystemMessage};
};

/// records and failures together hold one entry per input triplet, each in
/// input order.
struct ProbeOutcome {
  std::vector<ProbeRecord> records;
  std::vector<ProbeFailure> failures;
  std::size_t cache_hits = 0;   // input triplets answered from the cache
  std::size_t requests = 0;     // HTTP/mock calls issued, retries included
  std::size_t fresh = 0;        // statements newly appended to the cache
};

std::string statement_for(const kg::Triplet& t, const TemplateMap& templates, bool temporal);

/// Probes every triplet, reusing cached verdicts. Each distinct statement is
/// sent at most once per call. Templates (and timestamps in temporal mode)
/// are validated before any request; a CacheIoError aborts the batch.
ProbeOutcome probe_batch(std::span<const kg::Triplet> triplets, const TemplateMap& templates, ChatClient& client,
                         ProbeCache& cache, const ProbeOptions& options);

/// Cache-only lookup: records for triplets with a cached verdict under
/// (model, temporal). Triplets without a template are skipped.
std::vector<ProbeRecord> lookup_cached(std::span<const kg::Triplet> triplets, const TemplateMap& templates,
                                       const ProbeCache& cache, const std::string& model, bool temporal);

}  // namespace kgprobe::prompting
