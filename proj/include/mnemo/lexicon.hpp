#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mnemo {

/// Token -> real vector map. Keys are stored lowercased and lookups lowercase
/// the query. Vectors are kept exactly as read; normalization happens in
/// `cosine`.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return vectors_.size(); }

  // Throws ContractError on a dimension mismatch or non-finite component.
  void insert(std::string_view token, std::vector<double> vector);

  const std::vector<double>* find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token) != nullptr; }

 private:
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

// Text vector format: header "count dimension", then "token v1 ... vd" rows.
EmbeddingStore load_word_vectors(const std::filesystem::path& path);

// Componentwise mean of the in-vocabulary tokens of `phrase` (tokenized by
// whitespace, lowercased, edge punctuation stripped). Throws
// OutOfVocabularyError when no token is known, ContractError on empty input.
std::vector<double> embed_phrase(const EmbeddingStore& store, std::string_view phrase);

// 0 when either vector has zero norm.
double cosine(std::span<const double> a, std::span<const double> b);

/// Articulatory features per phoneme symbol: syllabic, place, manner,
/// voicing, height, backness, rounding. All rows share one width.
class FeatureTable {
 public:
  void insert(std::string symbol, std::vector<int> features);

  const std::vector<int>* find(std::string_view symbol) const;
  std::size_t width() const noexcept { return width_; }
  std::size_t size() const noexcept { return features_.size(); }

 private:
  std::size_t width_ = 0;
  std::map<std::string, std::vector<int>, std::less<>> features_;
};

FeatureTable load_feature_table(const std::filesystem::path& path);

struct PhonemeSequence {
  std::vector<std::string> symbols;

  bool operator==(const PhonemeSequence&) const = default;
};

// Parses "PH1 PH2 ..." into a sequence; throws ContractError when empty.
PhonemeSequence parse_phonemes(std::string_view text);

class PronunciationDict {
 public:
  // Every symbol must be covered by `table`.
  void insert(std::string_view word, PhonemeSequence phonemes, const FeatureTable& table);

  const PhonemeSequence* find(std::string_view word) const;
  std::size_t size() const noexcept { return entries_.size(); }
  const std::map<std::string, PhonemeSequence, std::less<>>& entries() const { return entries_; }

 private:
  std::map<std::string, PhonemeSequence, std::less<>> entries_;
};

PronunciationDict load_pronunciations(const std::filesystem::path& path, const FeatureTable& table);

class ImageabilityTable {
 public:
  static constexpr double kDefaultRating = 0.5;

  explicit ImageabilityTable(double default_rating = kDefaultRating);

  void insert(std::string_view word, double rating);
  // Rating for `word`, or the default for unlisted words.
  double rating(std::string_view word) const;
  bool contains(std::string_view word) const;
  double default_rating() const noexcept { return default_rating_; }
  const std::map<std::string, double, std::less<>>& ratings() const { return ratings_; }

 private:
  double default_rating_;
  std::map<std::string, double, std::less<>> ratings_;
};

ImageabilityTable load_imageability(const std::filesystem::path& path);

}  // namespace mnemo
