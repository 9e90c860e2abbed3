#include "mnemo/cuegen.hpp"

#include <fstream>

#include "mnemo/text.hpp"

namespace mnemo {
namespace {

constexpr std::string_view kPromptPrefix = "Write a short, catchy sentence that connects ";
constexpr std::string_view kPromptSuffix = ". Start the sentence with \"Imagine\".";
constexpr std::string_view kImagine = "Imagine";
constexpr std::size_t kStemPrefix = 4;

std::size_t common_prefix(std::string_view a, std::string_view b) {
  std::size_t n = 0;
  while (n < a.size() && n < b.size() && a[n] == b[n]) ++n;
  return n;
}

std::string image_extension(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() >= 2 && bytes[0] == 'B' && bytes[1] == 'M') return "bmp";
  if (bytes.size() >= 4 && bytes[0] == 0x89 && bytes[1] == 'P' && bytes[2] == 'N' && bytes[3] == 'G') return "png";
  if (bytes.size() >= 2 && bytes[0] == 0xFF && bytes[1] == 0xD8) return "jpg";
  return "bin";
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    fields.push_back(trim(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start)));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

}  // namespace

std::string_view to_string(CueViolation v) {
  switch (v) {
    case CueViolation::kMissingImagine: return "missing leading \"Imagine\"";
    case CueViolation::kKeywordAbsent: return "keyword absent";
    case CueViolation::kMeaningAbsent: return "meaning absent";
  }
  return "unknown";
}

std::string build_verbal_prompt(std::string_view keyword, std::string_view l1_meaning) {
  std::string prompt(kPromptPrefix);
  prompt += keyword;
  prompt += " and ";
  prompt += l1_meaning;
  prompt += kPromptSuffix;
  return prompt;
}

std::optional<std::pair<std::string, std::string>> parse_verbal_prompt(std::string_view prompt) {
  if (!prompt.starts_with(kPromptPrefix) || !prompt.ends_with(kPromptSuffix)) return std::nullopt;
  const auto body = prompt.substr(kPromptPrefix.size(), prompt.size() - kPromptPrefix.size() - kPromptSuffix.size());
  const auto sep = body.find(" and ");
  if (sep == std::string_view::npos) return std::nullopt;
  return std::pair{std::string(body.substr(0, sep)), std::string(body.substr(sep + 5))};
}

std::string meaning_head(std::string_view l1_meaning) {
  auto tokens = tokenize(l1_meaning);
  for (const auto& tok : tokens) {
    if (tok == "to" || tok == "a" || tok == "an" || tok == "the") continue;
    return tok;
  }
  return tokens.empty() ? std::string() : tokens.back();
}

CueValidation validate_verbal_cue(std::string_view cue_text, std::string_view keyword,
                                  std::string_view l1_meaning) {
  CueValidation result;
  if (!starts_with_token(cue_text, kImagine)) result.violations.push_back(CueViolation::kMissingImagine);
  if (keyword.empty() || !contains_ci(cue_text, keyword)) {
    result.violations.push_back(CueViolation::kKeywordAbsent);
  }

  const auto head = meaning_head(l1_meaning);
  bool meaning_present = !head.empty() && contains_ci(cue_text, head);
  if (!meaning_present && head.size() >= kStemPrefix) {
    for (const auto& tok : tokenize(cue_text)) {
      if (common_prefix(tok, head) >= kStemPrefix) {
        meaning_present = true;
        break;
      }
    }
  }
  if (!meaning_present) result.violations.push_back(CueViolation::kMeaningAbsent);
  return result;
}

GenerationFailed::GenerationFailed(std::string last_candidate, CueValidation validation, int attempts)
    : Error([&] {
        std::string msg = "verbal cue generation failed after " + std::to_string(attempts) +
                          " attempt(s); last candidate \"" + last_candidate + "\":";
        for (auto v : validation.violations) {
          msg += " ";
          msg += to_string(v);
          msg += ";";
        }
        return msg;
      }()),
      last_candidate_(std::move(last_candidate)),
      validation_(std::move(validation)),
      attempts_(attempts) {}

VerbalCue generate_verbal_cue(TextProvider& provider, const CueRequest& request, const ProviderConfig& config) {
  if (request.keyword.empty() || request.l1_meaning.empty() || request.l2_word.empty()) {
    throw ContractError("cue request fields must be non-empty");
  }
  if (config.retry_limit < 1) throw ContractError("retry_limit must be positive");

  const TextRequest text_request{build_verbal_prompt(request.keyword, request.l1_meaning), config.text_model,
                                 config.temperature};
  std::string candidate;
  CueValidation validation;
  for (int attempt = 1; attempt <= config.retry_limit; ++attempt) {
    candidate = trim(provider.complete(text_request));
    validation = validate_verbal_cue(candidate, request.keyword, request.l1_meaning);
    if (validation.ok()) return {candidate, request.keyword, request.l1_meaning};
  }
  throw GenerationFailed(candidate, validation, config.retry_limit);
}

std::string to_image_prompt(std::string_view cue_text) {
  if (!starts_with_token(cue_text, kImagine)) {
    throw ContractError("cue does not start with \"Imagine\": " + std::string(cue_text));
  }
  auto rest = cue_text.substr(kImagine.size());
  if (rest.starts_with(", ")) {
    rest.remove_prefix(2);
  } else if (rest.starts_with(" ") || rest.starts_with(",")) {
    rest.remove_prefix(1);
  }
  return std::string(rest);
}

std::string to_image_prompt(const VerbalCue& cue) { return to_image_prompt(cue.text); }

VisualCue generate_visual_cue(ImageProvider& provider, const VerbalCue& cue, const ProviderConfig& config,
                              const std::filesystem::path& media_dir, std::string_view media_prefix) {
  VisualCue visual;
  visual.prompt = to_image_prompt(cue);
  const auto bytes = provider.generate({visual.prompt, config.image_model});
  if (bytes.empty()) throw ProviderError("image provider returned no bytes");
  visual.content_hash = to_hex(sha256(bytes));
  const auto file_name = visual.content_hash + "." + image_extension(bytes);

  std::filesystem::create_directories(media_dir);
  const auto path = media_dir / file_name;
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write image " + path.string());
  visual.image_ref = std::string(media_prefix) + "/" + file_name;
  return visual;
}

std::vector<WordSpec> load_word_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open word list");
  std::vector<WordSpec> words;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto f = split_tabs(line);
    if (f.size() < 3 || f[0].empty() || f[1].empty() || f[2].empty()) {
      throw LoadError(path.string(), line_no, "expected l2<TAB>l1<TAB>keyword");
    }
    WordSpec w;
    w.l2_word = f[0];
    w.l1_meaning = f[1];
    w.keyword = f[2];
    if (f.size() > 3) w.manual_keyword = f[3];
    if (f.size() > 4) w.manual_verbal_cue = f[4];
    if (f.size() > 5 && !f[5].empty()) w.fixed_verbal_cue = f[5];
    if (f.size() > 6 && !f[6].empty()) w.audio_ref = f[6];
    words.push_back(std::move(w));
  }
  return words;
}

DeckGenerationResult generate_deck(const std::vector<WordSpec>& words, TextProvider& text, ImageProvider& image,
                                   const ProviderConfig& config, const DeckGenerationOptions& options) {
  if (words.empty()) throw ContractError("generate_deck: no words");
  DeckGenerationResult result;
  result.deck.name = options.deck_name;

  for (const auto& w : words) {
    VerbalCue verbal;
    try {
      if (w.fixed_verbal_cue) {
        if (!starts_with_token(*w.fixed_verbal_cue, kImagine)) {
          throw ContractError("fixed cue must start with \"Imagine\"");
        }
        verbal = {*w.fixed_verbal_cue, w.keyword, w.l1_meaning};
      } else {
        verbal = generate_verbal_cue(text, {w.keyword, w.l1_meaning, w.l2_word}, config);
      }
    } catch (const Error& e) {
      result.failures.push_back({w.l2_word, "verbal", e.what()});
      continue;
    }

    VisualCue visual;
    try {
      visual = generate_visual_cue(image, verbal, config, options.media_dir, options.media_prefix);
    } catch (const Error& e) {
      result.failures.push_back({w.l2_word, "visual", e.what()});
      continue;
    }

    WordEntry entry;
    entry.l2_word = w.l2_word;
    entry.l1_meaning = w.l1_meaning;
    entry.auto_keyword = w.keyword;
    entry.manual_keyword = w.manual_keyword;
    entry.auto_verbal_cue = verbal.text;
    entry.manual_verbal_cue = w.manual_verbal_cue;
    entry.image_ref = visual.image_ref;
    entry.audio_ref = w.audio_ref;
    entry.set_index = static_cast<int>(result.deck.entries.size() % kSetCount);
    result.deck.entries.push_back(std::move(entry));
  }
  if (result.deck.entries.empty()) throw DeckError("every word failed generation");
  return result;
}

}  // namespace mnemo
