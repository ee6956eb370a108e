#include "kgprobe/prompting/probe_cache.hpp"

#include <ctime>
#include <sstream>

namespace kgprobe::prompting {

nlohmann::json to_json(const ProbeRecord& r) {
  nlohmann::json triplet = {{"head", r.triplet.head}, {"relation", r.triplet.relation}, {"tail", r.triplet.tail}};
  if (r.triplet.timestamp) triplet["timestamp"] = kg::format_date(*r.triplet.timestamp);
  return {{"triplet", triplet},     {"statement", r.statement}, {"verdict", r.verdict},
          {"model", r.model},       {"temporal", r.temporal},   {"probed_at", r.probed_at},
          {"raw_response", r.raw_response}};
}

ProbeRecord record_from_json(const nlohmann::json& j) {
  try {
    ProbeRecord r;
    const auto& t = j.at("triplet");
    r.triplet.head = t.at("head").get<std::string>();
    r.triplet.relation = t.at("relation").get<std::string>();
    r.triplet.tail = t.at("tail").get<std::string>();
    if (t.contains("timestamp") && !t.at("timestamp").is_null()) {
      auto d = kg::parse_date(t.at("timestamp").get<std::string>());
      if (!d) throw InputError("invalid timestamp in probe record");
      r.triplet.timestamp = *d;
    }
    r.statement = j.at("statement").get<std::string>();
    r.verdict = j.at("verdict").get<int>();
    if (r.verdict != 0 && r.verdict != 1) throw InputError("probe record verdict must be 0 or 1");
    r.model = j.at("model").get<std::string>();
    r.temporal = j.at("temporal").get<bool>();
    r.probed_at = j.value("probed_at", "");
    r.raw_response = j.value("raw_response", "");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed probe record: ") + e.what());
  }
}

namespace {

// Parses a JSONL file; a final line lacking its newline and failing to parse
// is treated as an interrupted write and dropped.
std::vector<ProbeRecord> read_jsonl(const std::filesystem::path& path) {
  std::vector<ProbeRecord> out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::size_t pos = 0, lineno = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    std::string_view line(text.data() + pos, (terminated ? nl : text.size()) - pos);
    pos = terminated ? nl + 1 : text.size();
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const std::exception& e) {
      if (!terminated) break;
      throw ParseError(lineno, std::string(e.what()) + " in " + path.string());
    }
  }
  return out;
}

}  // namespace

ProbeCache::ProbeCache(std::filesystem::path path) : path_(std::move(path)) {
  for (auto& r : read_jsonl(path_)) entries_.insert_or_assign(key_of(r), std::move(r));
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  // Drop a torn tail so the next append starts on a fresh line.
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary | std::ios::ate);
    auto size = static_cast<std::size_t>(in.tellg());
    if (size > 0) {
      in.seekg(-1, std::ios::end);
      char last = 0;
      in.get(last);
      in.close();
      if (last != '\n') {
        std::ifstream all(path_, std::ios::binary);
        std::string text((std::istreambuf_iterator<char>(all)), {});
        all.close();
        auto cut = text.rfind('\n');
        text.resize(cut == std::string::npos ? 0 : cut + 1);
        std::ofstream rewrite(path_, std::ios::binary | std::ios::trunc);
        rewrite << text;
      }
    }
  }
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw CacheIoError("cannot open probe cache " + path_.string() + " for appending");
}

std::optional<ProbeRecord> ProbeCache::find(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void ProbeCache::append(const ProbeRecord& record) {
  std::lock_guard lock(mutex_);
  if (!path_.empty()) {
    const std::string line = to_json(record).dump() + "\n";
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) throw CacheIoError("failed writing probe cache " + path_.string());
  }
  entries_.insert_or_assign(key_of(record), record);
}

std::size_t ProbeCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

std::vector<ProbeRecord> ProbeCache::records() const {
  std::lock_guard lock(mutex_);
  std::vector<ProbeRecord> out;
  out.reserve(entries_.size());
  for (const auto& [k, r] : entries_) out.push_back(r);
  return out;
}

std::pair<std::size_t, std::size_t> ProbeCache::compact(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw InputError("probe cache " + path.string() + " does not exist");
  auto all = read_jsonl(path);
  std::map<CacheKey, std::size_t> latest;
  for (std::size_t i = 0; i < all.size(); ++i) latest[key_of(all[i])] = i;
  std::vector<std::size_t> keep;
  std::map<CacheKey, bool> emitted;
  for (std::size_t i = 0; i < all.size(); ++i) {
    auto key = key_of(all[i]);
    if (emitted[key]) continue;
    emitted[key] = true;
    keep.push_back(latest[key]);
  }
  auto tmp = path;
  tmp += ".compact.tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CacheIoError("cannot write " + tmp.string());
    for (auto i : keep) out << to_json(all[i]).dump() << '\n';
    if (!out) throw CacheIoError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
  return {all.size(), keep.size()};
}

std::string utc_timestamp_now() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace kgprobe::prompting
