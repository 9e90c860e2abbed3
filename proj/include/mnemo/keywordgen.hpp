#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/lexicon.hpp"

namespace mnemo {

// Edit distance between phoneme sequences with unit insertion/deletion cost
// and substitution cost equal to the fraction of differing features.
double phoneme_edit_distance(const PhonemeSequence& a, const PhonemeSequence& b, const FeatureTable& table);

// 1 - D(a,b) / max(|a|,|b|). Throws ContractError naming an unknown symbol.
double phonetic_similarity(const PhonemeSequence& a, const PhonemeSequence& b, const FeatureTable& table);

// 1 - Levenshtein(lower a, lower b) / max(|a|,|b|).
double orthographic_similarity(std::string_view a, std::string_view b);

// (cosine + 1) / 2 of the phrase embeddings.
double semantic_similarity(const EmbeddingStore& store, std::string_view a, std::string_view b);

class ScoreWeights {
 public:
  // Weights are normalized to sum to 1. Negative or all-zero weights throw.
  ScoreWeights(double phonetic, double orthographic, double imageability, double semantic);
  static ScoreWeights uniform() { return {0.25, 0.25, 0.25, 0.25}; }
  // "p,o,i,s"
  static ScoreWeights parse(std::string_view text);

  double phonetic() const noexcept { return phonetic_; }
  double orthographic() const noexcept { return orthographic_; }
  double imageability() const noexcept { return imageability_; }
  double semantic() const noexcept { return semantic_; }

 private:
  double phonetic_;
  double orthographic_;
  double imageability_;
  double semantic_;
};

struct KeywordCandidate {
  std::string keyword;
  double phonetic = 0;
  double orthographic = 0;
  double imageability = 0;
  double semantic = 0;
  double total = 0;
};

struct KeywordTarget {
  std::string spelling;
  PhonemeSequence pronunciation;
  std::string l1_meaning;
};

struct CandidateWord {
  std::string word;
  std::optional<PhonemeSequence> pronunciation;
};

struct KeywordResources {
  const EmbeddingStore& vectors;
  const ImageabilityTable& imageability;
  const FeatureTable& features;
};

struct SkippedCandidate {
  std::string word;
  std::string reason;
};

struct KeywordRanking {
  std::vector<KeywordCandidate> top;
  std::vector<SkippedCandidate> skipped;
};

KeywordCandidate score_candidate(const KeywordTarget& target, const std::string& word,
                                 const PhonemeSequence& pronunciation, const ScoreWeights& weights,
                                 const KeywordResources& resources);

// Scores every candidate, sorts by total descending with ties broken by
// keyword, and keeps the first min(k, n). Candidates without a pronunciation
// or without any in-vocabulary token are skipped and reported.
KeywordRanking rank_keywords(const KeywordTarget& target, const std::vector<CandidateWord>& candidates,
                             const ScoreWeights& weights, const KeywordResources& resources, std::size_t k);

// Candidate pool: words present in both the imageability table and the
// pronunciation dictionary, in lexicographic order.
std::vector<CandidateWord> candidate_pool(const ImageabilityTable& imageability, const PronunciationDict& dict);

}  // namespace mnemo
