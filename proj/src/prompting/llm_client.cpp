#include "kgprobe/prompting/llm_client.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "kgprobe/prompting/verdict.hpp"

namespace kgprobe::prompting {

std::chrono::milliseconds RetryPolicy::backoff(int attempt) const {
  double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, std::max(0, attempt - 1));
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

void LlmClientConfig::validate() const {
  if (max_parallel < 1) throw InputError("max_parallel must be at least 1");
  if (!(requests_per_second > 0.0)) throw InputError("requests_per_second must be positive");
  if (retry.max_attempts < 1) throw InputError("retry max_attempts must be at least 1");
}

MockChatClient::MockChatClient(std::uint64_t seed, double target_rate) : seed_(seed), rate_(target_rate) {
  if (!(target_rate >= 0.0 && target_rate <= 1.0)) throw InputError("mock rate must lie in [0, 1]");
}

std::string MockChatClient::complete(std::string_view, std::string_view statement) {
  ++calls_;
  return mock_verdict(statement, seed_, rate_) ? "True" : "False";
}

std::string MockChatClient::model_tag() const {
  char buf[96];
  std::snprintf(buf, sizeof buf, "mock:rate=%.17g:seed=%llu", rate_, static_cast<unsigned long long>(seed_));
  return buf;
}

nlohmann::json build_chat_request(std::string_view model, std::string_view system_message,
                                  std::string_view statement) {
  return {{"model", model},
          {"messages",
           nlohmann::json::array({{{"role", "system"}, {"content", system_message}},
                                  {{"role", "user"}, {"content", statement}}})}};
}

std::string extract_chat_content(std::string_view body) {
  try {
    auto j = nlohmann::json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw NetworkError(std::string("malformed chat completion response: ") + e.what());
  }
}

HttpChatClient::HttpChatClient(LlmClientConfig config) : config_(std::move(config)) {
  config_.validate();
  if (!config_.api_key_env.empty()) {
    if (const char* key = std::getenv(config_.api_key_env.c_str())) api_key_ = key;
  }
  const auto& url = config_.endpoint;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InputError("endpoint must be an absolute http(s) URL: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
#ifndef KGPROBE_HAVE_OPENSSL
  if (url.rfind("https://", 0) == 0) throw InputError("built without OpenSSL; https endpoints are unavailable");
#endif
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::complete(std::string_view system_message, std::string_view statement) {
  // httplib clients are not thread-safe; one per call keeps workers independent.
  httplib::Client client(scheme_host_port_);
  const auto secs = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(secs, 0);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  const auto body = build_chat_request(config_.model, system_message, statement).dump();
  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) throw TransientError("request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()));
  if (res->status == 429 || res->status >= 500)
    throw TransientError("HTTP " + std::to_string(res->status) + " from " + config_.endpoint);
  if (res->status < 200 || res->status >= 300)
    throw NetworkError("HTTP " + std::to_string(res->status) + " from " + config_.endpoint + ": " +
                       res->body.substr(0, 200));
  return extract_chat_content(res->body);
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second), burst_(std::max(1.0, burst)), tokens_(std::max(1.0, burst)), last_(clock::now()) {
  if (!(rate_per_second > 0.0)) throw InputError("token bucket rate must be positive");
}

void TokenBucket::acquire() {
  std::unique_lock lock(mutex_);
  while (true) {
    auto now = clock::now();
    tokens_ = std::min(burst_, tokens_ + std::chrono::duration<double>(now - last_).count() * rate_);
    last_ = now;
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    auto wait = std::chrono::duration<double>((1.0 - tokens_) / rate_);
    lock.unlock();
    std::this_thread::sleep_for(wait);
    lock.lock();
  }
}

}  // namespace kgprobe::prompting
