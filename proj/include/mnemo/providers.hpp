#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/digest.hpp"
#include "mnemo/error.hpp"

namespace mnemo {

enum class ProviderKind { kMock, kLive };

struct ProviderConfig {
  ProviderKind kind = ProviderKind::kMock;
  std::string text_model = "text-davinci-003";
  std::string image_model = "dall-e-2";
  double temperature = 0.5;
  int retry_limit = 3;
  std::int64_t seed = 0;  // mock providers only
};

struct TextRequest {
  std::string prompt;
  std::string model;
  double temperature = 0.5;
};

struct ImageRequest {
  std::string prompt;
  std::string model;
};

// Transport-level failure talking to a provider.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// Text in, text out. Implementations must be safe for concurrent calls.
class TextProvider {
 public:
  virtual ~TextProvider() = default;
  virtual std::string complete(const TextRequest& request) = 0;
};

// Text in, image bytes out. Implementations must be safe for concurrent calls.
class ImageProvider {
 public:
  virtual ~ImageProvider() = default;
  virtual std::vector<std::uint8_t> generate(const ImageRequest& request) = 0;
};

/// Deterministic offline text generator. It reads the keyword and meaning
/// back out of the verbal-cue prompt and fills a template chosen by a hash of
/// (seed, keyword, meaning). Placeholders: {keyword}, {meaning} (verbatim) and
/// {head} (meaning without a leading "to"/article).
class MockTextProvider : public TextProvider {
 public:
  explicit MockTextProvider(std::int64_t seed, std::vector<std::string> templates = {});

  // The first `count` calls return a cue that fails validation.
  void fail_first(std::size_t count) { fail_first_ = count; }
  void always_fail(bool value) { always_fail_ = value; }
  std::size_t call_count() const noexcept { return calls_.load(); }

  std::string complete(const TextRequest& request) override;

 private:
  std::int64_t seed_;
  std::vector<std::string> templates_;
  std::size_t fail_first_ = 0;
  bool always_fail_ = false;
  std::atomic<std::size_t> calls_{0};
};

// digest(prompt, seed) = SHA-256 over the prompt bytes, '\n', then the seed
// in decimal.
Sha256 mock_image_digest(std::string_view prompt, std::int64_t seed);

// 8x8 24-bit BMP whose pixel array repeats the digest bytes.
std::vector<std::uint8_t> render_digest_bmp(const Sha256& digest);

class MockImageProvider : public ImageProvider {
 public:
  explicit MockImageProvider(std::int64_t seed) : seed_(seed) {}
  std::vector<std::uint8_t> generate(const ImageRequest& request) override;
  std::size_t call_count() const noexcept { return calls_.load(); }

 private:
  std::int64_t seed_;
  std::atomic<std::size_t> calls_{0};
};

struct LiveProviderOptions {
  std::string base_url = "https://api.openai.com";
  std::string api_key;
  std::string completions_path = "/v1/completions";
  std::string chat_path = "/v1/chat/completions";
  std::string images_path = "/v1/images/generations";
  bool use_chat = false;
  int timeout_s = 60;

  // MNEMO_API_BASE, MNEMO_API_KEY (or OPENAI_API_KEY), MNEMO_USE_CHAT=1.
  static LiveProviderOptions from_env();
};

// OpenAI-style HTTP completion endpoint.
class LiveTextProvider : public TextProvider {
 public:
  explicit LiveTextProvider(LiveProviderOptions options) : options_(std::move(options)) {}
  std::string complete(const TextRequest& request) override;

 private:
  LiveProviderOptions options_;
};

// OpenAI-style image endpoint returning base64 payloads.
class LiveImageProvider : public ImageProvider {
 public:
  explicit LiveImageProvider(LiveProviderOptions options) : options_(std::move(options)) {}
  std::vector<std::uint8_t> generate(const ImageRequest& request) override;

 private:
  LiveProviderOptions options_;
};

struct ProviderPair {
  std::unique_ptr<TextProvider> text;
  std::unique_ptr<ImageProvider> image;
};

ProviderPair make_providers(const ProviderConfig& config);

}  // namespace mnemo
