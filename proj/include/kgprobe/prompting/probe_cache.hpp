#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "kgprobe/error.hpp"
#include "kgprobe/kg/triplet.hpp"

namespace kgprobe::prompting {

struct ProbeRecord {
  kg::Triplet triplet;
  std::string statement;
  int verdict = 0;
  std::string model;
  bool temporal = false;
  std::string probed_at;  // ISO-8601 UTC wall clock
  std::string raw_response;
};

struct CacheKey {
  std::string model;
  bool temporal = false;
  std::string statement;

  auto operator<=>(const CacheKey&) const = default;
};

inline CacheKey key_of(const ProbeRecord& r) { return {r.model, r.temporal, r.statement}; }

nlohmann::json to_json(const ProbeRecord& r);
ProbeRecord record_from_json(const nlohmann::json& j);

class CacheIoError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

/// Append-only JSON-Lines probe store. Later lines win on key collisions. A
/// truncated final line (interrupted write) is ignored on load.
class ProbeCache {
 public:
  /// In-memory cache with no backing file.
  ProbeCache() = default;
  explicit ProbeCache(std::filesystem::path path);

  std::optional<ProbeRecord> find(const CacheKey& key) const;
  /// Thread-safe; the line is written and flushed before returning.
  void append(const ProbeRecord& record);

  std::size_t size() const;
  /// Latest record per key, ordered by key.
  std::vector<ProbeRecord> records() const;
  const std::filesystem::path& path() const noexcept { return path_; }

  /// Rewrites `path` keeping only the latest record per key, in first-seen
  /// order. Returns {lines before, lines after}.
  static std::pair<std::size_t, std::size_t> compact(const std::filesystem::path& path);

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  mutable std::mutex mutex_;
  std::map<CacheKey, ProbeRecord> entries_;
};

std::string utc_timestamp_now();

}  // namespace kgprobe::prompting
