#include <gtest/gtest.h>

#include <httplib.h>
#include <json.hpp>

#include <mutex>
#include <thread>

#include "mnemo/cuegen.hpp"
#include "mnemo/providers.hpp"

namespace mnemo {
namespace {

using nlohmann::json;

// Minimal OpenAI-style endpoint on a loopback port.
class StubServer {
 public:
  StubServer() {
    server_.Post("/v1/completions", [this](const httplib::Request& req, httplib::Response& res) {
      record(req);
      const auto body = json::parse(req.body);
      const auto parsed = parse_verbal_prompt(body.at("prompt").get<std::string>());
      const std::string text = parsed ? "  Imagine a " + parsed->first + " near a " + parsed->second + ".\n" : "?";
      res.set_content(json{{"choices", {{{"text", text}}}}}.dump(), "application/json");
    });
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      record(req);
      res.set_content(json{{"choices", {{{"message", {{"role", "assistant"}, {"content", "Imagine chat."}}}}}}}.dump(),
                      "application/json");
    });
    server_.Post("/v1/images/generations", [this](const httplib::Request& req, httplib::Response& res) {
      record(req);
      res.set_content(json{{"data", {{{"b64_json", "Qk0AAA=="}}}}}.dump(), "application/json");
    });
    server_.Post("/broken", [](const httplib::Request&, httplib::Response& res) {
      res.status = 500;
      res.set_content("boom", "text/plain");
    });
    server_.Post("/garbage", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("{not json", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  LiveProviderOptions options() const {
    LiveProviderOptions o;
    o.base_url = "http://127.0.0.1:" + std::to_string(port_);
    o.api_key = "test-key";
    o.timeout_s = 5;
    return o;
  }

  json last_body() {
    std::lock_guard lock(mutex_);
    return last_body_;
  }
  std::string last_auth() {
    std::lock_guard lock(mutex_);
    return last_auth_;
  }

 private:
  void record(const httplib::Request& req) {
    std::lock_guard lock(mutex_);
    last_body_ = json::parse(req.body);
    last_auth_ = req.get_header_value("Authorization");
  }

  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  json last_body_;
  std::string last_auth_;
};

TEST(LiveText, CompletionEndpoint) {
  StubServer stub;
  LiveTextProvider provider(stub.options());
  const auto text = provider.complete({build_verbal_prompt("flashy", "bottle"), "text-davinci-003", 0.5});
  EXPECT_EQ(text, "Imagine a flashy near a bottle.");
  const auto body = stub.last_body();
  EXPECT_EQ(body.at("model"), "text-davinci-003");
  EXPECT_DOUBLE_EQ(body.at("temperature").get<double>(), 0.5);
  EXPECT_EQ(stub.last_auth(), "Bearer test-key");
}

TEST(LiveText, ChatEndpoint) {
  StubServer stub;
  auto options = stub.options();
  options.use_chat = true;
  LiveTextProvider provider(options);
  EXPECT_EQ(provider.complete({"hello", "gpt", 0.2}), "Imagine chat.");
  EXPECT_EQ(stub.last_body().at("messages").at(0).at("content"), "hello");
}

TEST(LiveText, PipelineThroughLiveProvider) {
  StubServer stub;
  LiveTextProvider provider(stub.options());
  const auto cue = generate_verbal_cue(provider, {"Reuben", "to call", "rufen"}, ProviderConfig{});
  EXPECT_EQ(cue.text, "Imagine a Reuben near a to call.");
}

TEST(LiveImage, DecodesBase64Payload) {
  StubServer stub;
  LiveImageProvider provider(stub.options());
  const auto bytes = provider.generate({"a flashy bottle.", "dall-e-2"});
  EXPECT_EQ(bytes, (std::vector<std::uint8_t>{'B', 'M', 0, 0}));
  const auto body = stub.last_body();
  EXPECT_EQ(body.at("prompt"), "a flashy bottle.");
  EXPECT_EQ(body.at("response_format"), "b64_json");
}

TEST(LiveErrors, HttpAndPayloadFailuresAreProviderErrors) {
  StubServer stub;
  auto options = stub.options();
  options.completions_path = "/broken";
  EXPECT_THROW(LiveTextProvider(options).complete({"x", "m", 0.5}), ProviderError);
  options.completions_path = "/garbage";
  EXPECT_THROW(LiveTextProvider(options).complete({"x", "m", 0.5}), ProviderError);
  options.completions_path = "/v1/chat/completions";  // wrong response shape
  EXPECT_THROW(LiveTextProvider(options).complete({"x", "m", 0.5}), ProviderError);

  auto unreachable = stub.options();
  unreachable.base_url = "http://127.0.0.1:1";
  unreachable.timeout_s = 1;
  EXPECT_THROW(LiveImageProvider(unreachable).generate({"x", "m"}), ProviderError);
}

TEST(LiveErrors, MissingKeyIsRejected) {
  ::unsetenv("MNEMO_API_KEY");
  ::unsetenv("OPENAI_API_KEY");
  ProviderConfig config;
  config.kind = ProviderKind::kLive;
  EXPECT_THROW(make_providers(config), ProviderError);
  ::setenv("MNEMO_API_KEY", "k", 1);
  ::setenv("MNEMO_API_BASE", "http://127.0.0.1:9", 1);
  const auto options = LiveProviderOptions::from_env();
  EXPECT_EQ(options.api_key, "k");
  EXPECT_EQ(options.base_url, "http://127.0.0.1:9");
  EXPECT_NO_THROW(make_providers(config));
  ::unsetenv("MNEMO_API_KEY");
  ::unsetenv("MNEMO_API_BASE");
}

}  // namespace
}  // namespace mnemo
