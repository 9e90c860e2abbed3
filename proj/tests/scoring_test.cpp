#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "mnemo/csv.hpp"
#include "mnemo/error.hpp"
#include "mnemo/responses.hpp"
#include "mnemo/scoring.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

namespace mnemo {
namespace {

using testing::kDataDir;
using testing::TempDir;
using testing::write_file;

const EmbeddingStore& vectors() {
  static const auto store = load_word_vectors(kDataDir / "vectors.txt");
  return store;
}

TEST(Generation, UmlautsAndCaseAreFolded) {
  EXPECT_DOUBLE_EQ(generation_score("süß", "sus").score, 1.0);
  EXPECT_DOUBLE_EQ(generation_score("süß", "SÜß").score, 1.0);
  EXPECT_DOUBLE_EQ(generation_score("Schlüssel", "schlussel ").score, 1.0);
  EXPECT_EQ(generation_score("süß", " SÜß ").normalized_response, "sus");
}

TEST(Generation, PartialCreditIsNormalizedLevenshtein) {
  EXPECT_DOUBLE_EQ(generation_score("treten", "tretten").score, 1.0 - 1.0 / 7.0);
  EXPECT_DOUBLE_EQ(generation_score("flasche", "flashy").score, 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(generation_score("rasen", "xyz").score, 1.0 - 5.0 / 5.0);
}

TEST(Generation, EmptyAnswerIsMissing) {
  const auto s = generation_score("rasen", "   ");
  EXPECT_TRUE(s.missing);
  EXPECT_DOUBLE_EQ(s.score, 0.0);
  EXPECT_THROW(generation_score(" ", "x"), ContractError);
}

TEST(Recognition, InfinitiveMarkerMayBeOmitted) {
  EmbeddingStore store(2);
  store.insert("to", {0, 1});
  store.insert("step", {1, 0});
  EXPECT_DOUBLE_EQ(recognition_score(store, "to step", "step").score, 1.0);
  EXPECT_DOUBLE_EQ(recognition_score(store, "to step", "To step!").score, 1.0);
  EXPECT_DOUBLE_EQ(recognition_score(store, "step", "step").score, 1.0);
}

TEST(Recognition, ShippedVectorsLawnVersusPot) {
  const double expected = oracle::dot_cosine(*vectors().find("lawn"), *vectors().find("pot"));
  EXPECT_NEAR(expected, 4.0 / (3.0 * std::sqrt(6.0)), 1e-15);
  EXPECT_NEAR(recognition_score(vectors(), "lawn", "pot").score, expected, 1e-15);
}

TEST(Recognition, NegativeCosineClampsToZero) {
  EmbeddingStore store(2);
  store.insert("up", {0, 1});
  store.insert("down", {0, -1});
  store.insert("left", {-1, 0.2});
  EXPECT_DOUBLE_EQ(recognition_score(store, "up", "down").score, 0.0);
  EXPECT_DOUBLE_EQ(recognition_score(store, "up", "left").score, oracle::dot_cosine({0, 1}, {-1, 0.2}));
}

TEST(Recognition, MissingAndOutOfVocabulary) {
  const auto missing = recognition_score(vectors(), "bottle", "  ");
  EXPECT_TRUE(missing.missing);
  EXPECT_DOUBLE_EQ(missing.score, 0.0);
  const auto oov = recognition_score(vectors(), "bottle", "qwertyuiop");
  EXPECT_TRUE(oov.out_of_vocabulary);
  EXPECT_DOUBLE_EQ(oov.score, 0.0);
  EXPECT_THROW(recognition_score(vectors(), "qwertyuiop", "bottle"), OutOfVocabularyError);
}

TEST(Combined, MeanOfBoth) {
  EXPECT_DOUBLE_EQ(combined_score(0.0, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(combined_score(0.25, 0.75), 0.5);
  EXPECT_THROW(combined_score(-0.1, 0.5), ContractError);
  EXPECT_THROW(combined_score(0.5, std::nan("")), ContractError);
}

Deck two_word_deck() {
  return {"d",
          {{"süß", "sweet", "", "", "Imagine", "", std::nullopt, std::nullopt, 0},
           {"treten", "to step", "", "", "Imagine", "", std::nullopt, std::nullopt, 1}}};
}

TEST(Responses, CsvRoundTrip) {
  TempDir dir;
  const std::vector<ResponseRow> rows{{"p1", "süß", Task::kGeneration, "sus", 4200},
                                      {"p1", "treten", Task::kRecognition, "step, \"walk\"", 12000}};
  std::ostringstream out;
  write_responses(out, rows);
  EXPECT_EQ(out.str().substr(0, kResponseHeader.size()), kResponseHeader);
  EXPECT_EQ(read_responses(write_file(dir / "r.csv", out.str())), rows);
}

TEST(Responses, MalformedRowsReportLine) {
  TempDir dir;
  const std::string header = std::string(kResponseHeader) + "\n";
  for (const auto& bad : {"p1,süß,gen,sus\n", "p1,süß,write,sus,1\n", "p1,süß,gen,sus,12ms\n"}) {
    try {
      read_responses(write_file(dir / "r.csv", header + "p0,süß,gen,sus,1\n" + bad));
      FAIL() << bad;
    } catch (const LoadError& e) {
      EXPECT_EQ(e.line(), 3u) << bad;
    }
  }
}

TEST(Responses, ScoringUsesDeckGold) {
  const auto deck = two_word_deck();
  EmbeddingStore store(2);
  store.insert("sweet", {1, 0});
  store.insert("step", {0, 1});
  store.insert("to", {1, 1});
  const std::vector<ResponseRow> rows{{"p1", "süß", Task::kGeneration, "sus", 1},
                                      {"p1", "treten", Task::kRecognition, "step", 2},
                                      {"p1", "süß", Task::kRecognition, "", 3},
                                      {"p1", "süß", Task::kRecognition, "zebra", 4}};
  const auto scored = score_responses(deck, store, rows);
  ASSERT_EQ(scored.size(), 4u);
  EXPECT_DOUBLE_EQ(scored[0].scored.score, 1.0);
  EXPECT_DOUBLE_EQ(scored[1].scored.score, 1.0);
  EXPECT_TRUE(scored[2].scored.missing);
  EXPECT_TRUE(scored[3].scored.out_of_vocabulary);

  std::ostringstream out;
  write_scored(out, scored);
  const auto table = parse_csv(out.str());
  ASSERT_EQ(table.size(), 5u);
  EXPECT_EQ(table[0].back(), "flag");
  EXPECT_EQ(table[1][6], "1");
  EXPECT_EQ(table[1][7], "ok");
  EXPECT_EQ(table[3][7], "missing");
  EXPECT_EQ(table[4][7], "oov");

  EXPECT_THROW(score_responses(deck, store, {{"p1", "rasen", Task::kGeneration, "x", 1}}), DeckError);
}

}  // namespace
}  // namespace mnemo
