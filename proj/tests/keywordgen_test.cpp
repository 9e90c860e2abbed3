#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mnemo/error.hpp"
#include "mnemo/keywordgen.hpp"
#include "oracles/oracles.hpp"
#include "oracles/toy_lexicon.hpp"
#include "test_util.hpp"

namespace mnemo {
namespace {

using testing::kDataDir;

class ShippedResources : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    features_ = new FeatureTable(load_feature_table(kDataDir / "features.tsv"));
    dict_ = new PronunciationDict(load_pronunciations(kDataDir / "pronunciations.tsv", *features_));
    vectors_ = new EmbeddingStore(load_word_vectors(kDataDir / "vectors.txt"));
    imageability_ = new ImageabilityTable(load_imageability(kDataDir / "imageability.tsv"));
  }
  static void TearDownTestSuite() {
    delete features_;
    delete dict_;
    delete vectors_;
    delete imageability_;
  }
  static const PhonemeSequence& pron(const std::string& w) { return *dict_->find(w); }

  static FeatureTable* features_;
  static PronunciationDict* dict_;
  static EmbeddingStore* vectors_;
  static ImageabilityTable* imageability_;
};

FeatureTable* ShippedResources::features_ = nullptr;
PronunciationDict* ShippedResources::dict_ = nullptr;
EmbeddingStore* ShippedResources::vectors_ = nullptr;
ImageabilityTable* ShippedResources::imageability_ = nullptr;

TEST_F(ShippedResources, PatoVersusPot) {
  // a -> ɒ differs in backness and rounding (2/7), plus one deletion.
  EXPECT_NEAR(phoneme_edit_distance(pron("pato"), pron("pot"), *features_), 9.0 / 7.0, 1e-12);
  EXPECT_NEAR(phonetic_similarity(pron("pato"), pron("pot"), *features_), 19.0 / 28.0, 1e-12);
}

TEST_F(ShippedResources, PhoneticExtremes) {
  EXPECT_DOUBLE_EQ(phonetic_similarity(pron("flasche"), pron("flasche"), *features_), 1.0);
  // /p/ and /a/ differ in every feature.
  EXPECT_DOUBLE_EQ(phonetic_similarity(parse_phonemes("p"), parse_phonemes("a"), *features_), 0.0);
}

TEST_F(ShippedResources, PhoneticMatchesRecursiveOracle) {
  std::vector<std::string> words;
  for (const auto& [w, p] : dict_->entries()) words.push_back(w);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const auto& a = pron(words[rng() % words.size()]);
    const auto& b = pron(words[rng() % words.size()]);
    const double expected = oracle::recursive_phoneme_distance(a.symbols, b.symbols, *features_);
    EXPECT_NEAR(phoneme_edit_distance(a, b, *features_), expected, 1e-12);
    EXPECT_NEAR(phoneme_edit_distance(a, b, *features_), phoneme_edit_distance(b, a, *features_), 1e-12);
  }
}

TEST_F(ShippedResources, UnknownPhonemeIsNamed) {
  try {
    phonetic_similarity(parse_phonemes("p Q"), pron("pot"), *features_);
    FAIL();
  } catch (const ContractError& e) {
    EXPECT_NE(std::string(e.what()).find("Q"), std::string::npos);
  }
}

TEST(Orthographic, KnownValues) {
  EXPECT_NEAR(orthographic_similarity("flasche", "flashy"), 5.0 / 7.0, 1e-12);
  EXPECT_DOUBLE_EQ(orthographic_similarity("Reuben", "reuben"), 1.0);
  EXPECT_DOUBLE_EQ(orthographic_similarity("abc", "xyz"), 0.0);
  EXPECT_THROW(orthographic_similarity("", "x"), ContractError);
}

TEST_F(ShippedResources, SemanticPotDuck) {
  // (4/6 + 1) / 2
  EXPECT_NEAR(semantic_similarity(*vectors_, "pot", "duck"), 5.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(semantic_similarity(*vectors_, "duck", "duck"), 1.0);
}

TEST(Semantic, OrthogonalIsOneHalf) {
  EmbeddingStore store(2);
  store.insert("x", {1, 0});
  store.insert("y", {0, 3});
  EXPECT_DOUBLE_EQ(semantic_similarity(store, "x", "y"), 0.5);
  EXPECT_THROW(semantic_similarity(store, "x", "zzz"), OutOfVocabularyError);
}

TEST(Weights, NormalizeAndParse) {
  const ScoreWeights w(1, 1, 2, 0);
  EXPECT_DOUBLE_EQ(w.imageability(), 0.5);
  EXPECT_DOUBLE_EQ(w.semantic(), 0.0);
  const auto p = ScoreWeights::parse("2, 0, 0, 2");
  EXPECT_DOUBLE_EQ(p.phonetic(), 0.5);
  EXPECT_THROW(ScoreWeights(-1, 1, 1, 1), ContractError);
  EXPECT_THROW(ScoreWeights(0, 0, 0, 0), ContractError);
  EXPECT_THROW(ScoreWeights::parse("1,1,1"), ContractError);
  EXPECT_THROW(ScoreWeights::parse("1,1,x,1"), ContractError);
}

TEST_F(ShippedResources, ScoreCandidateComponents) {
  const KeywordTarget target{"pato", pron("pato"), "duck"};
  const KeywordResources res{*vectors_, *imageability_, *features_};
  const auto c = score_candidate(target, "pot", pron("pot"), ScoreWeights::uniform(), res);
  EXPECT_NEAR(c.phonetic, 19.0 / 28.0, 1e-12);
  EXPECT_NEAR(c.orthographic, 0.5, 1e-12);  // pato -> pot: one substitution and one deletion over 4
  EXPECT_DOUBLE_EQ(c.imageability, imageability_->rating("pot"));
  EXPECT_NEAR(c.semantic, 5.0 / 6.0, 1e-12);
  EXPECT_NEAR(c.total, (c.phonetic + c.orthographic + c.imageability + c.semantic) / 4.0, 1e-12);
}

TEST_F(ShippedResources, RankingSkipsAndReports) {
  const KeywordTarget target{"pato", pron("pato"), "duck"};
  const KeywordResources res{*vectors_, *imageability_, *features_};
  std::vector<CandidateWord> cands{{"pot", pron("pot")}, {"nopron", std::nullopt}, {"zzzz", parse_phonemes("t a")}};
  const auto r = rank_keywords(target, cands, ScoreWeights::uniform(), res, 5);
  ASSERT_EQ(r.top.size(), 1u);
  EXPECT_EQ(r.top[0].keyword, "pot");
  ASSERT_EQ(r.skipped.size(), 2u);
  EXPECT_EQ(r.skipped[0].word, "nopron");
  EXPECT_EQ(r.skipped[1].word, "zzzz");
  EXPECT_THROW(rank_keywords(target, {}, ScoreWeights::uniform(), res, 5), ContractError);
  EXPECT_THROW(rank_keywords(target, cands, ScoreWeights::uniform(), res, 0), ContractError);
}

TEST_F(ShippedResources, PoolIsImageabilityIntersectPronunciations) {
  const auto pool = candidate_pool(*imageability_, *dict_);
  EXPECT_FALSE(pool.empty());
  for (const auto& c : pool) {
    EXPECT_TRUE(imageability_->contains(c.word));
    EXPECT_NE(dict_->find(c.word), nullptr);
  }
  EXPECT_TRUE(std::is_sorted(pool.begin(), pool.end(), [](auto& a, auto& b) { return a.word < b.word; }));
  // German deck words have pronunciations but no imageability rating.
  EXPECT_TRUE(std::none_of(pool.begin(), pool.end(), [](auto& c) { return c.word == "flasche"; }));
}

TEST_F(ShippedResources, PatoRanksPotFirstUnderUniformWeights) {
  const KeywordTarget target{"pato", pron("pato"), "duck"};
  const KeywordResources res{*vectors_, *imageability_, *features_};
  const auto r = rank_keywords(target, candidate_pool(*imageability_, *dict_), ScoreWeights::uniform(), res, 3);
  ASSERT_FALSE(r.top.empty());
  EXPECT_EQ(r.top[0].keyword, "pot");
}

TEST(Ranking, MatchesExhaustiveOracleOnToyLexicons) {
  const double w[4] = {0.4, 0.2, 0.1, 0.3};
  for (std::uint32_t seed = 1; seed <= 10; ++seed) {
    const auto lex = oracle::make_toy_lexicon(seed, 60);
    const KeywordTarget target{lex.target.word, PhonemeSequence{lex.target.phonemes}, lex.meaning};
    const KeywordResources res{lex.vectors, lex.imageability, lex.features};
    const auto got = rank_keywords(target, lex.candidates(), ScoreWeights(w[0], w[1], w[2], w[3]), res, 10);
    const auto want = oracle::exhaustive_rank(lex.target, lex.meaning_vector, lex.words, w, lex.features, 10);
    ASSERT_EQ(got.top.size(), want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
      EXPECT_EQ(got.top[i].keyword, want[i].keyword) << "seed " << seed << " rank " << i;
      EXPECT_NEAR(got.top[i].total, want[i].total, 1e-12);
    }
  }
}

TEST(Ranking, KLargerThanPoolReturnsAll) {
  const auto lex = oracle::make_toy_lexicon(99, 7);
  const KeywordTarget target{lex.target.word, PhonemeSequence{lex.target.phonemes}, lex.meaning};
  const KeywordResources res{lex.vectors, lex.imageability, lex.features};
  EXPECT_EQ(rank_keywords(target, lex.candidates(), ScoreWeights::uniform(), res, 50).top.size(), 7u);
}

TEST(Ranking, TiesBreakByKeyword) {
  FeatureTable features;
  features.insert("a", {1, 0});
  EmbeddingStore vectors(2);
  vectors.insert("m", {1, 0});
  for (const char* w : {"bb", "aa", "cc"}) vectors.insert(w, {1, 0});
  ImageabilityTable img;
  const KeywordTarget target{"zz", parse_phonemes("a"), "m"};
  const KeywordResources res{vectors, img, features};
  std::vector<CandidateWord> cands{{"bb", parse_phonemes("a")}, {"cc", parse_phonemes("a")}, {"aa", parse_phonemes("a")}};
  const auto r = rank_keywords(target, cands, ScoreWeights::uniform(), res, 3);
  ASSERT_EQ(r.top.size(), 3u);
  EXPECT_EQ(r.top[0].keyword, "aa");
  EXPECT_EQ(r.top[1].keyword, "bb");
  EXPECT_EQ(r.top[2].keyword, "cc");
}

TEST(Ranking, InvariantUnderCandidateShuffle) {
  const auto lex = oracle::make_toy_lexicon(7, 80);
  const KeywordTarget target{lex.target.word, PhonemeSequence{lex.target.phonemes}, lex.meaning};
  const KeywordResources res{lex.vectors, lex.imageability, lex.features};
  auto cands = lex.candidates();
  const auto base = rank_keywords(target, cands, ScoreWeights::uniform(), res, 15);
  std::mt19937 rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(cands.begin(), cands.end(), rng);
    const auto r = rank_keywords(target, cands, ScoreWeights::uniform(), res, 15);
    ASSERT_EQ(r.top.size(), base.top.size());
    for (std::size_t k = 0; k < r.top.size(); ++k) EXPECT_EQ(r.top[k].keyword, base.top[k].keyword);
  }
}

TEST(Ranking, TotalsStayInUnitInterval) {
  const auto lex = oracle::make_toy_lexicon(21, 50);
  const KeywordTarget target{lex.target.word, PhonemeSequence{lex.target.phonemes}, lex.meaning};
  const KeywordResources res{lex.vectors, lex.imageability, lex.features};
  for (const auto& c : rank_keywords(target, lex.candidates(), ScoreWeights(3, 0, 1, 2), res, 50).top) {
    for (double v : {c.phonetic, c.orthographic, c.imageability, c.semantic, c.total}) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

}  // namespace
}  // namespace mnemo
