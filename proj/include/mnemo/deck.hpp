#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mnemo {

inline constexpr int kSetCount = 3;

struct WordEntry {
  std::string l2_word;
  std::string l1_meaning;
  std::string auto_keyword;
  std::string manual_keyword;
  std::string auto_verbal_cue;
  std::string manual_verbal_cue;
  std::optional<std::string> image_ref;
  std::optional<std::string> audio_ref;
  int set_index = 0;

  bool operator==(const WordEntry&) const = default;
};

struct Deck {
  std::string name;
  std::vector<WordEntry> entries;

  bool operator==(const Deck&) const = default;

  const WordEntry* find(std::string_view l2_word) const;
  // Entries with the given set index, in deck order.
  std::vector<const WordEntry*> set(int set_index) const;
};

// Throws DeckError describing the first violated invariant: empty word or
// meaning, an auto cue that does not start with "Imagine", a set index
// outside {0,1,2}, duplicate l2 words, or unequal set sizes.
void validate_deck(const Deck& deck);

Deck deck_from_json(std::string_view json_text);
// Stable field order, two-space indent, trailing newline.
std::string deck_to_json(const Deck& deck);

Deck load_deck(const std::filesystem::path& path);
void save_deck(const Deck& deck, const std::filesystem::path& path);

}  // namespace mnemo
