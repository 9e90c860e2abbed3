#include "mnemo/scoring.hpp"

#include <algorithm>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {
namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace

std::string_view to_string(Metric m) {
  return m == Metric::kRecognition ? "recognition" : "generation";
}

std::string normalize_generation_answer(std::string_view text) {
  return trim(transliterate_umlauts(to_lower(text)));
}

std::string normalize_recognition_answer(std::string_view text) { return join(tokenize(text)); }

ScoredResponse generation_score(std::string_view gold_l2, std::string_view response) {
  if (trim(gold_l2).empty()) throw ContractError("generation_score: empty gold word");
  ScoredResponse out;
  out.metric = Metric::kGeneration;
  out.raw_response = std::string(response);
  out.normalized_response = normalize_generation_answer(response);
  if (out.normalized_response.empty()) {
    out.missing = true;
    out.score = 0.0;
    return out;
  }
  out.score = normalized_levenshtein(normalize_generation_answer(gold_l2), out.normalized_response);
  return out;
}

ScoredResponse recognition_score(const EmbeddingStore& store, std::string_view gold_l1, std::string_view response) {
  ScoredResponse out;
  out.metric = Metric::kRecognition;
  out.raw_response = std::string(response);
  out.normalized_response = normalize_recognition_answer(response);

  auto gold = normalize_recognition_answer(gold_l1);
  if (gold.empty()) throw ContractError("recognition_score: empty gold meaning");
  if (gold.starts_with("to ") && !out.normalized_response.starts_with("to ")) gold = gold.substr(3);
  const auto gold_vec = embed_phrase(store, gold);

  if (out.normalized_response.empty()) {
    out.missing = true;
    return out;
  }
  try {
    const auto resp_vec = embed_phrase(store, out.normalized_response);
    out.score = std::max(0.0, cosine(gold_vec, resp_vec));
  } catch (const OutOfVocabularyError&) {
    out.out_of_vocabulary = true;
    out.score = 0.0;
  }
  return out;
}

double combined_score(double recognition, double generation) {
  if (!(recognition >= 0.0 && recognition <= 1.0) || !(generation >= 0.0 && generation <= 1.0)) {
    throw ContractError("combined_score: inputs must lie in [0,1]");
  }
  return (recognition + generation) / 2.0;
}

}  // namespace mnemo
