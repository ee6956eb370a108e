#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "kgprobe/error.hpp"
#include "kgprobe/prompting/llm_client.hpp"
#include "kgprobe/prompting/probe.hpp"

using namespace kgprobe;
using namespace kgprobe::prompting;

namespace {

// Local chat-completion endpoint answering "True" unless told otherwise.
class FakeEndpoint {
 public:
  FakeEndpoint() {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex_);
      ++hits_;
      last_body_ = req.body;
      last_auth_ = req.get_header_value("Authorization");
      if (fail_next_ > 0) {
        --fail_next_;
        res.status = fail_status_;
        res.set_content("busy", "text/plain");
        return;
      }
      nlohmann::json body = {{"choices", {{{"message", {{"role", "assistant"}, {"content", answer_}}}}}}};
      res.set_content(body.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }
  void fail(int times, int status) {
    std::lock_guard lock(mutex_);
    fail_next_ = times;
    fail_status_ = status;
  }
  void answer(std::string a) {
    std::lock_guard lock(mutex_);
    answer_ = std::move(a);
  }
  int hits() {
    std::lock_guard lock(mutex_);
    return hits_;
  }
  std::string last_body() {
    std::lock_guard lock(mutex_);
    return last_body_;
  }
  std::string last_auth() {
    std::lock_guard lock(mutex_);
    return last_auth_;
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  int hits_ = 0;
  int fail_next_ = 0;
  int fail_status_ = 503;
  std::string answer_ = "True";
  std::string last_body_, last_auth_;
};

LlmClientConfig config_for(const FakeEndpoint& ep) {
  LlmClientConfig c;
  c.endpoint = ep.url();
  c.model = "test-model";
  c.api_key_env = "KGPROBE_TEST_API_KEY";
  c.timeout = std::chrono::seconds(5);
  return c;
}

ProbeOptions fast_options() {
  ProbeOptions o;
  o.max_parallel = 2;
  o.requests_per_second = 1000;
  o.retry.initial_backoff = std::chrono::milliseconds(1);
  o.retry.max_backoff = std::chrono::milliseconds(2);
  return o;
}

}  // namespace

TEST(HttpChatClient, SendsChatBodyWithBearerToken) {
  FakeEndpoint ep;
  ::setenv("KGPROBE_TEST_API_KEY", "sk-test-123", 1);
  HttpChatClient client(config_for(ep));
  EXPECT_EQ(client.complete("system text", "Paris is the capital of France."), "True");
  EXPECT_EQ(ep.last_auth(), "Bearer sk-test-123");
  const auto body = nlohmann::json::parse(ep.last_body());
  EXPECT_EQ(body, build_chat_request("test-model", "system text", "Paris is the capital of France."));
  EXPECT_EQ(body.at("messages").at(0).at("role"), "system");
  EXPECT_EQ(body.at("messages").at(1).at("content"), "Paris is the capital of France.");
  EXPECT_EQ(client.model_tag(), "test-model");
  ::unsetenv("KGPROBE_TEST_API_KEY");
}

TEST(HttpChatClient, NoKeyMeansNoAuthorizationHeader) {
  FakeEndpoint ep;
  ::unsetenv("KGPROBE_TEST_API_KEY");
  HttpChatClient client(config_for(ep));
  client.complete("s", "x");
  EXPECT_EQ(ep.last_auth(), "");
}

TEST(HttpChatClient, StatusMapping) {
  FakeEndpoint ep;
  HttpChatClient client(config_for(ep));
  ep.fail(1, 503);
  EXPECT_THROW(client.complete("s", "x"), TransientError);
  ep.fail(1, 429);
  EXPECT_THROW(client.complete("s", "x"), TransientError);
  ep.fail(1, 401);
  try {
    client.complete("s", "x");
    FAIL();
  } catch (const TransientError&) {
    FAIL() << "401 must not be retryable";
  } catch (const NetworkError&) {
  }
}

TEST(HttpChatClient, UnreachableIsTransient) {
  int port;
  {
    httplib::Server s;
    port = s.bind_to_any_port("127.0.0.1");
  }  // closed again: nothing listens there now
  LlmClientConfig c;
  c.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  c.timeout = std::chrono::seconds(2);
  HttpChatClient client(c);
  EXPECT_THROW(client.complete("s", "x"), TransientError);
}

TEST(HttpChatClient, RejectsRelativeEndpoint) {
  LlmClientConfig c;
  c.endpoint = "localhost/v1";
  EXPECT_THROW(HttpChatClient{c}, InputError);
  c.endpoint = "http://localhost";
  c.max_parallel = 0;
  EXPECT_THROW(HttpChatClient{c}, InputError);
}

TEST(ExtractChatContent, MalformedBodies) {
  EXPECT_EQ(extract_chat_content(R"({"choices":[{"message":{"content":"False."}}]})"), "False.");
  EXPECT_THROW(extract_chat_content("not json"), NetworkError);
  EXPECT_THROW(extract_chat_content(R"({"choices":[]})"), NetworkError);
}

TEST(HttpProbe, RetriesServerErrorsThenSucceeds) {
  FakeEndpoint ep;
  HttpChatClient client(config_for(ep));
  TemplateMap templates;
  templates.add("r", "{sub} r {obj}");
  ProbeCache cache;
  ep.fail(2, 500);
  auto opt = fast_options();
  opt.max_parallel = 1;
  auto out = probe_batch(std::vector<kg::Triplet>{{"a", "r", "b", std::nullopt}}, templates, client, cache, opt);
  EXPECT_TRUE(out.failures.empty());
  EXPECT_EQ(out.requests, 3u);
  EXPECT_EQ(ep.hits(), 3);
  EXPECT_EQ(out.records.at(0).model, "test-model");
  EXPECT_EQ(out.records.at(0).raw_response, "True");
}

TEST(HttpProbe, ProseAnswersAreUnparseableFailures) {
  FakeEndpoint ep;
  ep.answer("I believe this is True");
  HttpChatClient client(config_for(ep));
  TemplateMap templates;
  templates.add("r", "{sub} r {obj}");
  ProbeCache cache;
  auto out = probe_batch(std::vector<kg::Triplet>{{"a", "r", "b", std::nullopt}}, templates, client, cache,
                         fast_options());
  ASSERT_EQ(out.failures.size(), 1u);
  EXPECT_EQ(out.failures[0].kind, FailureKind::unparseable);
  EXPECT_EQ(ep.hits(), 3);
  EXPECT_EQ(cache.size(), 0u);
}
