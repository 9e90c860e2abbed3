#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mnemo/deck.hpp"
#include "mnemo/providers.hpp"

namespace mnemo {

struct CueRequest {
  std::string keyword;
  std::string l1_meaning;
  std::string l2_word;
};

struct VerbalCue {
  std::string text;
  std::string keyword;
  std::string l1_meaning;
};

struct VisualCue {
  std::string prompt;
  std::string image_ref;
  std::string content_hash;
};

enum class CueViolation { kMissingImagine, kKeywordAbsent, kMeaningAbsent };

std::string_view to_string(CueViolation v);

struct CueValidation {
  std::vector<CueViolation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

std::string build_verbal_prompt(std::string_view keyword, std::string_view l1_meaning);

// Inverse of build_verbal_prompt; nullopt when `prompt` does not follow the
// template.
std::optional<std::pair<std::string, std::string>> parse_verbal_prompt(std::string_view prompt);

// Content word of a meaning: leading "to" and articles dropped, first
// remaining token ("to step" -> "step").
std::string meaning_head(std::string_view l1_meaning);

// The cue must start with "Imagine", contain the keyword, and contain the
// meaning's head word (substring, or a token sharing a 4+ character prefix).
CueValidation validate_verbal_cue(std::string_view cue_text, std::string_view keyword,
                                  std::string_view l1_meaning);

class GenerationFailed : public Error {
 public:
  GenerationFailed(std::string last_candidate, CueValidation validation, int attempts);
  const std::string& last_candidate() const noexcept { return last_candidate_; }
  const CueValidation& validation() const noexcept { return validation_; }
  int attempts() const noexcept { return attempts_; }

 private:
  std::string last_candidate_;
  CueValidation validation_;
  int attempts_;
};

// Calls the provider at most config.retry_limit times and returns the first
// valid cue.
VerbalCue generate_verbal_cue(TextProvider& provider, const CueRequest& request, const ProviderConfig& config);

// Drops the leading "Imagine" and one following separator (" ", "," or ", ").
std::string to_image_prompt(std::string_view cue_text);
std::string to_image_prompt(const VerbalCue& cue);

// Writes the image under `media_dir` named by the SHA-256 of its bytes.
// image_ref is "<media_prefix>/<hash>.<ext>".
VisualCue generate_visual_cue(ImageProvider& provider, const VerbalCue& cue, const ProviderConfig& config,
                              const std::filesystem::path& media_dir, std::string_view media_prefix = "media");

struct WordSpec {
  std::string l2_word;
  std::string l1_meaning;
  std::string keyword;
  std::string manual_keyword;
  std::string manual_verbal_cue;
  // A pre-authored auto cue used verbatim instead of calling the text
  // provider. It must still start with "Imagine".
  std::optional<std::string> fixed_verbal_cue;
  std::optional<std::string> audio_ref;
};

// Tab-separated: l2, l1, keyword[, manual_keyword, manual_cue, fixed_cue,
// audio_ref]. Empty optional columns are allowed; '#' starts a comment.
std::vector<WordSpec> load_word_specs(const std::filesystem::path& path);

struct WordFailure {
  std::string l2_word;
  std::string stage;  // "verbal" | "visual"
  std::string message;
};

struct DeckGenerationOptions {
  std::string deck_name = "generated";
  std::filesystem::path media_dir = "media";
  std::string media_prefix = "media";
};

struct DeckGenerationResult {
  Deck deck;
  std::vector<WordFailure> failures;
};

// Runs the verbal-then-visual pipeline per word. Successful entries keep
// input order and receive set indices 0,1,2 round-robin. Throws DeckError
// when every word fails.
DeckGenerationResult generate_deck(const std::vector<WordSpec>& words, TextProvider& text, ImageProvider& image,
                                   const ProviderConfig& config, const DeckGenerationOptions& options);

}  // namespace mnemo
