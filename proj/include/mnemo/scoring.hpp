#pragma once

#include <string>
#include <string_view>

#include "mnemo/lexicon.hpp"

namespace mnemo {

enum class Metric { kRecognition, kGeneration };

std::string_view to_string(Metric m);

struct ScoredResponse {
  std::string raw_response;
  std::string normalized_response;
  double score = 0;
  Metric metric = Metric::kGeneration;
  bool missing = false;           // empty response
  bool out_of_vocabulary = false;  // recognition only
};

// Lowercase, transliterate umlauts, trim.
std::string normalize_generation_answer(std::string_view text);
// Lowercase, strip punctuation, collapse whitespace.
std::string normalize_recognition_answer(std::string_view text);

// L1 -> L2 answer scored by normalized Levenshtein after case folding and
// umlaut transliteration of both sides.
ScoredResponse generation_score(std::string_view gold_l2, std::string_view response);

// L2 -> L1 answer scored by max(0, cosine) of phrase embeddings. A gold
// "to X" is compared as "X" when the response omits the leading "to".
// Throws OutOfVocabularyError when the gold itself cannot be embedded.
ScoredResponse recognition_score(const EmbeddingStore& store, std::string_view gold_l1, std::string_view response);

// Mean of the two; both must lie in [0,1].
double combined_score(double recognition, double generation);

}  // namespace mnemo
