#include "kgprobe/prompting/probe.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <thread>

#include "kgprobe/prompting/verdict.hpp"

namespace kgprobe::prompting {

std::string statement_for(const kg::Triplet& t, const TemplateMap& templates, bool temporal) {
  return temporal ? instantiate_temporal_statement(t, templates) : instantiate_statement(t, templates);
}

namespace {

struct Job {
  CacheKey key;
  const kg::Triplet* triplet = nullptr;
  // results
  bool ok = false;
  int verdict = 0;
  std::string raw;
  FailureKind kind = FailureKind::network;
  std::string message;
  int attempts = 0;
};

void run_job(Job& job, ChatClient& client, const ProbeOptions& opt, TokenBucket& bucket,
             std::atomic<std::size_t>& requests) {
  const std::string& system = opt.temporal ? opt.temporal_system_message : opt.system_message;
  for (int attempt = 1; attempt <= opt.retry.max_attempts; ++attempt) {
    job.attempts = attempt;
    bool retryable = true;
    try {
      bucket.acquire();
      ++requests;
      job.raw = client.complete(system, job.key.statement);
      job.verdict = parse_verdict(job.raw);
      job.ok = true;
      return;
    } catch (const UnparseableResponse& e) {
      job.kind = FailureKind::unparseable;
      job.message = e.what();
    } catch (const TransientError& e) {
      job.kind = FailureKind::network;
      job.message = e.what();
    } catch (const NetworkError& e) {
      job.kind = FailureKind::network;
      job.message = e.what();
      retryable = false;
    } catch (const std::exception& e) {
      // A misbehaving client must not take down the worker pool.
      job.kind = FailureKind::network;
      job.message = e.what();
      retryable = false;
    }
    if (!retryable) return;
    if (attempt < opt.retry.max_attempts) std::this_thread::sleep_for(opt.retry.backoff(attempt));
  }
}

}  // namespace

ProbeOutcome probe_batch(std::span<const kg::Triplet> triplets, const TemplateMap& templates, ChatClient& client,
                         ProbeCache& cache, const ProbeOptions& options) {
  if (options.max_parallel < 1) throw InputError("max_parallel must be at least 1");
  templates.require_all(triplets);

  ProbeOutcome outcome;
  if (triplets.empty()) return outcome;

  const std::string model = client.model_tag();
  std::vector<CacheKey> keys;
  keys.reserve(triplets.size());
  for (const auto& t : triplets) keys.push_back({model, options.temporal, statement_for(t, templates, options.temporal)});

  std::vector<Job> jobs;
  std::map<CacheKey, std::size_t> job_of;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    if (cache.find(keys[i]) || job_of.count(keys[i])) continue;
    job_of.emplace(keys[i], jobs.size());
    Job job;
    job.key = keys[i];
    job.triplet = &triplets[i];
    jobs.push_back(std::move(job));
  }

  TokenBucket bucket(options.requests_per_second, options.requests_per_second);
  std::atomic<std::size_t> next{0}, requests{0};
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    while (!abort) {
      const std::size_t i = next++;
      if (i >= jobs.size()) return;
      Job& job = jobs[i];
      run_job(job, client, options, bucket, requests);
      if (!job.ok) continue;
      try {
        cache.append({*job.triplet, job.key.statement, job.verdict, model, options.temporal, utc_timestamp_now(),
                      job.raw});
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        abort = true;
      }
    }
  };

  const std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(options.max_parallel), jobs.size());
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  outcome.requests = requests.load();
  for (const auto& job : jobs)
    if (job.ok) ++outcome.fresh;

  for (std::size_t i = 0; i < triplets.size(); ++i) {
    auto it = job_of.find(keys[i]);
    const bool from_job = it != job_of.end();
    if (from_job && !jobs[it->second].ok) {
      const Job& job = jobs[it->second];
      outcome.failures.push_back({triplets[i], keys[i].statement, job.kind, job.message, job.attempts});
      continue;
    }
    auto cached = cache.find(keys[i]);
    if (!from_job) ++outcome.cache_hits;
    ProbeRecord record = *cached;
    record.triplet = triplets[i];
    outcome.records.push_back(std::move(record));
  }
  return outcome;
}

std::vector<ProbeRecord> lookup_cached(std::span<const kg::Triplet> triplets, const TemplateMap& templates,
                                       const ProbeCache& cache, const std::string& model, bool temporal) {
  std::vector<ProbeRecord> out;
  for (const auto& t : triplets) {
    if (!templates.find(t.relation) || (temporal && !t.timestamp)) continue;
    auto hit = cache.find({model, temporal, statement_for(t, templates, temporal)});
    if (!hit) continue;
    hit->triplet = t;
    out.push_back(std::move(*hit));
  }
  return out;
}

}  // namespace kgprobe::prompting
