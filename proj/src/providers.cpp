#include "mnemo/providers.hpp"

#include <cstdlib>
#include <cstring>

#include <httplib.h>
#include <json.hpp>

#include "mnemo/cuegen.hpp"
#include "mnemo/text.hpp"

namespace mnemo {
namespace {

const std::vector<std::string>& noun_templates() {
  static const std::vector<std::string> bank = {
      "Imagine a {keyword} sitting next to a {head}.",
      "Imagine a {head} shaped exactly like a {keyword}.",
      "Imagine a {keyword} and a {head} sharing a secret.",
      "Imagine a {keyword} hiding inside a giant {head}!",
      "Imagine a tiny {head} riding on a {keyword}.",
  };
  return bank;
}

const std::vector<std::string>& verb_templates() {
  static const std::vector<std::string> bank = {
      "Imagine a {keyword} trying {meaning} in the rain.",
      "Imagine you {head} right past a {keyword}.",
      "Imagine a {keyword} that loves {meaning} all day long!",
      "Imagine you {head} while holding a {keyword}.",
      "Imagine a {keyword} teaching everyone how {meaning}.",
  };
  return bank;
}

std::string replace_all(std::string text, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
  return text;
}

std::uint64_t hash_key(std::int64_t seed, std::string_view keyword, std::string_view meaning) {
  std::string key = std::to_string(seed);
  key += '\x1f';
  key += keyword;
  key += '\x1f';
  key += meaning;
  const auto d = sha256(key);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | d[static_cast<std::size_t>(i)];
  return v;
}

void put_le16(std::vector<std::uint8_t>& out, std::size_t at, std::uint16_t v) {
  out[at] = static_cast<std::uint8_t>(v & 0xFF);
  out[at + 1] = static_cast<std::uint8_t>(v >> 8);
}

void put_le32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v >> (8 * i));
}

httplib::Client make_client(const LiveProviderOptions& options) {
  httplib::Client client(options.base_url);
  client.set_connection_timeout(options.timeout_s, 0);
  client.set_read_timeout(options.timeout_s, 0);
  client.set_write_timeout(options.timeout_s, 0);
  if (!options.api_key.empty()) client.set_bearer_token_auth(options.api_key);
  return client;
}

nlohmann::json post_json(const LiveProviderOptions& options, const std::string& path, const nlohmann::json& body) {
  auto client = make_client(options);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw ProviderError("request to " + options.base_url + path + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError("provider returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProviderError(std::string("provider returned malformed JSON: ") + e.what());
  }
}

}  // namespace

MockTextProvider::MockTextProvider(std::int64_t seed, std::vector<std::string> templates)
    : seed_(seed), templates_(std::move(templates)) {}

std::string MockTextProvider::complete(const TextRequest& request) {
  const auto call = calls_.fetch_add(1) + 1;
  const auto parsed = parse_verbal_prompt(request.prompt);
  if (!parsed) throw ProviderError("mock text provider: unrecognized prompt");
  const auto& [keyword, meaning] = *parsed;

  if (always_fail_ || call <= fail_first_) return "A " + keyword + " appears.";

  const bool verb = to_lower(meaning).starts_with("to ");
  const auto& bank = !templates_.empty() ? templates_ : (verb ? verb_templates() : noun_templates());
  const auto& tmpl = bank[hash_key(seed_, keyword, meaning) % bank.size()];

  auto out = replace_all(tmpl, "{keyword}", keyword);
  out = replace_all(out, "{meaning}", meaning);
  out = replace_all(out, "{head}", meaning_head(meaning));
  return out;
}

Sha256 mock_image_digest(std::string_view prompt, std::int64_t seed) {
  std::string material(prompt);
  material += '\n';
  material += std::to_string(seed);
  return sha256(material);
}

std::vector<std::uint8_t> render_digest_bmp(const Sha256& digest) {
  constexpr std::uint32_t kSide = 8;
  constexpr std::uint32_t kRowBytes = kSide * 3;  // already a multiple of 4
  constexpr std::uint32_t kPixelBytes = kRowBytes * kSide;
  constexpr std::uint32_t kHeader = 14 + 40;

  std::vector<std::uint8_t> out(kHeader + kPixelBytes, 0);
  out[0] = 'B';
  out[1] = 'M';
  put_le32(out, 2, kHeader + kPixelBytes);
  put_le32(out, 10, kHeader);
  put_le32(out, 14, 40);
  put_le32(out, 18, kSide);
  put_le32(out, 22, kSide);
  put_le16(out, 26, 1);
  put_le16(out, 28, 24);
  put_le32(out, 34, kPixelBytes);
  put_le32(out, 38, 2835);
  put_le32(out, 42, 2835);
  for (std::uint32_t i = 0; i < kPixelBytes; ++i) out[kHeader + i] = digest[i % digest.size()];
  return out;
}

std::vector<std::uint8_t> MockImageProvider::generate(const ImageRequest& request) {
  calls_.fetch_add(1);
  return render_digest_bmp(mock_image_digest(request.prompt, seed_));
}

LiveProviderOptions LiveProviderOptions::from_env() {
  LiveProviderOptions options;
  if (const char* base = std::getenv("MNEMO_API_BASE"); base && *base) options.base_url = base;
  if (const char* key = std::getenv("MNEMO_API_KEY"); key && *key) {
    options.api_key = key;
  } else if (const char* oai = std::getenv("OPENAI_API_KEY"); oai && *oai) {
    options.api_key = oai;
  }
  if (const char* chat = std::getenv("MNEMO_USE_CHAT"); chat && std::strcmp(chat, "1") == 0) {
    options.use_chat = true;
  }
  return options;
}

std::string LiveTextProvider::complete(const TextRequest& request) {
  nlohmann::json body;
  body["model"] = request.model;
  body["temperature"] = request.temperature;
  body["max_tokens"] = 96;
  if (options_.use_chat) {
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}});
    const auto doc = post_json(options_, options_.chat_path, body);
    try {
      return trim(doc.at("choices").at(0).at("message").at("content").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw ProviderError(std::string("unexpected chat response: ") + e.what());
    }
  }
  body["prompt"] = request.prompt;
  const auto doc = post_json(options_, options_.completions_path, body);
  try {
    return trim(doc.at("choices").at(0).at("text").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("unexpected completion response: ") + e.what());
  }
}

std::vector<std::uint8_t> LiveImageProvider::generate(const ImageRequest& request) {
  nlohmann::json body;
  body["model"] = request.model;
  body["prompt"] = request.prompt;
  body["n"] = 1;
  body["size"] = "512x512";
  body["response_format"] = "b64_json";
  const auto doc = post_json(options_, options_.images_path, body);
  std::string encoded;
  try {
    encoded = doc.at("data").at(0).at("b64_json").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProviderError(std::string("unexpected image response: ") + e.what());
  }
  try {
    return base64_decode(encoded);
  } catch (const Error& e) {
    throw ProviderError(e.what());
  }
}

ProviderPair make_providers(const ProviderConfig& config) {
  ProviderPair pair;
  if (config.kind == ProviderKind::kMock) {
    pair.text = std::make_unique<MockTextProvider>(config.seed);
    pair.image = std::make_unique<MockImageProvider>(config.seed);
  } else {
    const auto options = LiveProviderOptions::from_env();
    if (options.api_key.empty()) throw ProviderError("live provider requires MNEMO_API_KEY");
    pair.text = std::make_unique<LiveTextProvider>(options);
    pair.image = std::make_unique<LiveImageProvider>(options);
  }
  return pair;
}

}  // namespace mnemo
