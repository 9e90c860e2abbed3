#include "mnemo/keywordgen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {
namespace {

const std::vector<int>& features_of(const FeatureTable& table, const std::string& symbol) {
  const auto* f = table.find(symbol);
  if (!f) throw ContractError("unknown phoneme symbol '" + symbol + "'");
  return *f;
}

double substitution_cost(const std::vector<int>& a, const std::vector<int>& b) {
  std::size_t differing = 0;
  for (std::size_t k = 0; k < a.size(); ++k) differing += a[k] != b[k];
  return static_cast<double>(differing) / static_cast<double>(a.size());
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double phoneme_edit_distance(const PhonemeSequence& a, const PhonemeSequence& b, const FeatureTable& table) {
  std::vector<const std::vector<int>*> fa;
  std::vector<const std::vector<int>*> fb;
  for (const auto& s : a.symbols) fa.push_back(&features_of(table, s));
  for (const auto& s : b.symbols) fb.push_back(&features_of(table, s));

  std::vector<double> row(fb.size() + 1);
  for (std::size_t j = 0; j <= fb.size(); ++j) row[j] = static_cast<double>(j);
  for (std::size_t i = 1; i <= fa.size(); ++i) {
    double diag = row[0];
    row[0] = static_cast<double>(i);
    for (std::size_t j = 1; j <= fb.size(); ++j) {
      const double up = row[j];
      row[j] = std::min({up + 1.0, row[j - 1] + 1.0, diag + substitution_cost(*fa[i - 1], *fb[j - 1])});
      diag = up;
    }
  }
  return row[fb.size()];
}

double phonetic_similarity(const PhonemeSequence& a, const PhonemeSequence& b, const FeatureTable& table) {
  if (a.symbols.empty() || b.symbols.empty()) throw ContractError("phonetic_similarity: empty sequence");
  const double longest = static_cast<double>(std::max(a.symbols.size(), b.symbols.size()));
  return clamp01(1.0 - phoneme_edit_distance(a, b, table) / longest);
}

double orthographic_similarity(std::string_view a, std::string_view b) {
  if (a.empty() || b.empty()) throw ContractError("orthographic_similarity: empty input");
  return normalized_levenshtein(to_lower(a), to_lower(b));
}

double semantic_similarity(const EmbeddingStore& store, std::string_view a, std::string_view b) {
  const auto va = embed_phrase(store, a);
  const auto vb = embed_phrase(store, b);
  return clamp01((cosine(va, vb) + 1.0) / 2.0);
}

ScoreWeights::ScoreWeights(double phonetic, double orthographic, double imageability, double semantic) {
  for (double w : {phonetic, orthographic, imageability, semantic}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ContractError("score weights must be non-negative");
  }
  const double sum = phonetic + orthographic + imageability + semantic;
  if (sum <= 0.0) throw ContractError("score weights must not all be zero");
  phonetic_ = phonetic / sum;
  orthographic_ = orthographic / sum;
  imageability_ = imageability / sum;
  semantic_ = semantic / sum;
}

ScoreWeights ScoreWeights::parse(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto field = trim(text.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                : comma - start));
    double v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
      throw ContractError("weights must be four comma-separated numbers: '" + std::string(text) + "'");
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() != 4) throw ContractError("weights must be four comma-separated numbers");
  return {values[0], values[1], values[2], values[3]};
}

KeywordCandidate score_candidate(const KeywordTarget& target, const std::string& word,
                                 const PhonemeSequence& pronunciation, const ScoreWeights& weights,
                                 const KeywordResources& resources) {
  KeywordCandidate c;
  c.keyword = word;
  c.phonetic = phonetic_similarity(target.pronunciation, pronunciation, resources.features);
  c.orthographic = orthographic_similarity(target.spelling, word);
  c.imageability = resources.imageability.rating(word);
  c.semantic = semantic_similarity(resources.vectors, word, target.l1_meaning);
  c.total = clamp01(weights.phonetic() * c.phonetic + weights.orthographic() * c.orthographic +
                    weights.imageability() * c.imageability + weights.semantic() * c.semantic);
  return c;
}

KeywordRanking rank_keywords(const KeywordTarget& target, const std::vector<CandidateWord>& candidates,
                             const ScoreWeights& weights, const KeywordResources& resources, std::size_t k) {
  if (candidates.empty()) throw ContractError("rank_keywords: no candidates");
  if (k == 0) throw ContractError("rank_keywords: k must be at least 1");

  KeywordRanking ranking;
  std::vector<KeywordCandidate> scored;
  scored.reserve(candidates.size());
  for (const auto& cand : candidates) {
    if (!cand.pronunciation || cand.pronunciation->symbols.empty()) {
      ranking.skipped.push_back({cand.word, "no pronunciation"});
      continue;
    }
    try {
      scored.push_back(score_candidate(target, cand.word, *cand.pronunciation, weights, resources));
    } catch (const OutOfVocabularyError&) {
      ranking.skipped.push_back({cand.word, "out of vocabulary"});
    }
  }
  std::sort(scored.begin(), scored.end(), [](const KeywordCandidate& a, const KeywordCandidate& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.keyword < b.keyword;
  });
  if (scored.size() > k) scored.resize(k);
  ranking.top = std::move(scored);
  std::sort(ranking.skipped.begin(), ranking.skipped.end(),
            [](const SkippedCandidate& a, const SkippedCandidate& b) { return a.word < b.word; });
  return ranking;
}

std::vector<CandidateWord> candidate_pool(const ImageabilityTable& imageability, const PronunciationDict& dict) {
  std::vector<CandidateWord> pool;
  for (const auto& [word, rating] : imageability.ratings()) {
    if (const auto* p = dict.find(word)) pool.push_back({word, *p});
  }
  return pool;
}

}  // namespace mnemo
