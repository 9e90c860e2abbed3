#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/deck.hpp"
#include "mnemo/lexicon.hpp"
#include "mnemo/responses.hpp"
#include "mnemo/stats.hpp"
#include "mnemo/study.hpp"

namespace mnemo {

// Per deck word (deck order): recognition, generation and combined score.
// A timed-out or missing answer scores 0.
std::vector<WordScore> score_session(const StudySession& session, const Deck& deck, const EmbeddingStore& store);

// Test-phase events as response rows; timeouts export an empty response.
std::vector<ResponseRow> export_responses(const StudySession& session);

// What one sample point of a condition is in the t-tests.
enum class TestUnit { kWord, kParticipant };
std::string_view to_string(TestUnit unit);
TestUnit parse_test_unit(std::string_view text);

struct Hypothesis {
  ConditionId a;
  ConditionId b;
  Tail tail;
};

// The fixed comparison set reported by `analyze`.
inline constexpr std::array<Hypothesis, 4> kHypotheses = {{
    {ConditionId::kAutoII, ConditionId::kAutoI, Tail::kRight},
    {ConditionId::kAutoII, ConditionId::kAutoI, Tail::kLeft},
    {ConditionId::kManualII, ConditionId::kAutoII, Tail::kRight},
    {ConditionId::kAutoIII, ConditionId::kAutoII, Tail::kRight},
}};

struct HypothesisResult {
  Hypothesis hypothesis;
  std::optional<ConditionComparison> comparison;
  std::string note;  // why the test could not be run
};

struct AnalysisReport {
  TestUnit unit = TestUnit::kWord;
  std::vector<ParticipantMetrics> participants;
  std::vector<WordMetrics> per_word;
  std::vector<HypothesisResult> tests;
  std::size_t excluded = 0;
  std::vector<std::string> unmatched_exclusions;
  std::vector<std::string> incomplete;  // session ids skipped
};

AnalysisReport run_analysis(std::vector<StudySession> sessions, const Deck& deck, const EmbeddingStore& store,
                            const std::vector<std::string>& exclusion_ids, TestUnit unit = TestUnit::kWord);

void write_participants_csv(std::ostream& out, const AnalysisReport& report);
void write_per_word_csv(std::ostream& out, const AnalysisReport& report);
void write_tests_csv(std::ostream& out, const AnalysisReport& report);
// Long format for box plots: participant_id,condition,metric,value.
void write_boxplot_csv(std::ostream& out, const AnalysisReport& report);

}  // namespace mnemo
