#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/error.hpp"
#include "mnemo/study.hpp"

namespace mnemo {

class StatsError : public Error {
 public:
  using Error::Error;
};

struct SampleSummary {
  std::size_t n = 0;
  double mean = 0;
  double variance = 0;  // unbiased; requires n >= 2
};

SampleSummary summarize(std::span<const double> sample);

enum class Tail { kRight, kLeft };
std::string_view to_string(Tail tail);
Tail parse_tail(std::string_view text);

struct WelchStatistic {
  double t = 0;
  double df = 0;
};

// t = (mean_a - mean_b) / sqrt(va/na + vb/nb), Welch-Satterthwaite df.
// Throws ContractError for n < 2 and StatsError when both variances are 0.
WelchStatistic welch_t(std::span<const double> sample_a, std::span<const double> sample_b);

// Regularized incomplete beta I_x(a, b), continued fraction to 1e-12.
double regularized_incomplete_beta(double a, double b, double x);

// P(T > t) (right) or P(T < t) (left) for Student's t with `df` degrees of
// freedom.
double t_tail_p(double t, double df, Tail tail);

struct TTestResult {
  double t = 0;
  double df = 0;
  double p = 0;
  Tail tail = Tail::kRight;
};

inline constexpr double kSignificanceLevel = 0.05;

struct ConditionComparison {
  ConditionId a;
  ConditionId b;
  TTestResult result;
  bool significant = false;
};

// One-tailed Welch test of condition a against condition b.
ConditionComparison compare_conditions(const std::map<ConditionId, std::vector<double>>& scores, ConditionId a,
                                       ConditionId b, Tail tail, double alpha = kSignificanceLevel);

/// Recognition, generation and combined score of one deck word for one
/// participant.
struct WordScore {
  std::string word;
  double recognition = 0;
  double generation = 0;
  double combined = 0;
};

struct ParticipantMetrics {
  std::string participant_id;
  ConditionId condition = ConditionId::kAutoI;
  double learning_time_norm = 0;  // mean learning time / 30 s
  double testing_time_norm = 0;   // mean recognition+generation time / 15 s
  double combined_score = 0;      // mean per-word combined score
  double likert_norm = 0;         // mean rating / 5
};

inline constexpr double kMaxLearningSeconds = 30.0;
inline constexpr double kMaxTestingSeconds = 15.0;
inline constexpr double kMaxLikert = 5.0;

// Throws StatsError naming the missing phases if the session is incomplete.
ParticipantMetrics aggregate_participant(const StudySession& session, std::span<const WordScore> scores);

struct ScoredSession {
  StudySession session;
  std::vector<WordScore> scores;
};

struct WordMetrics {
  std::string word;
  std::map<ConditionId, double> mean_combined;  // conditions with data only
};

// Per word (deck order), per condition: mean combined score across
// participants.
std::vector<WordMetrics> per_word_table(std::span<const ScoredSession> sessions, const std::vector<std::string>& deck_order);

struct ExclusionReport {
  std::vector<StudySession> kept;
  std::size_t removed = 0;
  std::vector<std::string> unmatched_ids;  // listed but absent
};

ExclusionReport filter_excluded(std::vector<StudySession> sessions, const std::vector<std::string>& exclusion_ids);

}  // namespace mnemo
