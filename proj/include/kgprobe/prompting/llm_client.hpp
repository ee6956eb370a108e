#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <json.hpp>

#include "kgprobe/error.hpp"

namespace kgprobe::prompting {

inline constexpr std::string_view kDefaultSystemMessage =
    "Evaluate the statement based on your knowledge and respond with True or False.";
inline constexpr std::string_view kDefaultTemporalSystemMessage =
    "Evaluate the statement below; reply only True or False.";

/// Retryable failure: connection errors, timeouts, HTTP 429 and 5xx.
class TransientError : public NetworkError {
 public:
  using NetworkError::NetworkError;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  /// Delay before attempt `attempt + 1` (attempt is 1-based).
  std::chrono::milliseconds backoff(int attempt) const;
};

struct LlmClientConfig {
  std::string endpoint = "https://api.openai.com/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key_env = "OPENAI_API_KEY";
  int max_parallel = 4;
  double requests_per_second = 5.0;
  RetryPolicy retry;
  std::string system_message{kDefaultSystemMessage};
  std::string temporal_system_message{kDefaultTemporalSystemMessage};
  std::chrono::seconds timeout{60};

  /// Throws InputError when max_parallel < 1 or the rate is not positive.
  void validate() const;
};

/// One chat completion per call. Implementations must be thread-safe.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(std::string_view system_message, std::string_view statement) = 0;
  /// Model tag recorded in probe records and used in the cache key.
  virtual std::string model_tag() const = 0;
};

/// Deterministic offline stand-in answering "True"/"False" via mock_verdict.
class MockChatClient final : public ChatClient {
 public:
  MockChatClient(std::uint64_t seed, double target_rate);

  std::string complete(std::string_view system_message, std::string_view statement) override;
  std::string model_tag() const override;
  std::size_t calls() const noexcept { return calls_.load(); }

 private:
  std::uint64_t seed_;
  double rate_;
  std::atomic<std::size_t> calls_{0};
};

nlohmann::json build_chat_request(std::string_view model, std::string_view system_message,
                                  std::string_view statement);
/// choices[0].message.content; throws NetworkError on malformed bodies.
std::string extract_chat_content(std::string_view body);

/// Chat-completion client over HTTP(S). The bearer token is read from the
/// configured environment variable at construction.
class HttpChatClient final : public ChatClient {
 public:
  explicit HttpChatClient(LlmClientConfig config);
  ~HttpChatClient() override;

  std::string complete(std::string_view system_message, std::string_view statement) override;
  std::string model_tag() const override { return config_.model; }

 private:
  LlmClientConfig config_;
  std::string api_key_;
  std::string scheme_host_port_;
  std::string path_;
};

/// Token bucket shared by request workers.
class TokenBucket {
 public:
  TokenBucket(double rate_per_second, double burst);
  void acquire();

 private:
  using clock = std::chrono::steady_clock;
  std::mutex mutex_;
  double rate_;
  double burst_;
  double tokens_;
  clock::time_point last_;
};

}  // namespace kgprobe::prompting
