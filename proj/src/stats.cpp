#include "mnemo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace mnemo {
namespace {

constexpr double kEps = 1e-12;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 10'000;

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps) return h;
  }
  throw StatsError("incomplete beta continued fraction did not converge");
}

bool complete(const StudySession& s, PhaseKind kind) {
  std::size_t n = 0;
  for (const auto& e : s.events) n += e.phase.kind() == kind;
  return n == s.likert_total();
}

}  // namespace

SampleSummary summarize(std::span<const double> sample) {
  SampleSummary s;
  s.n = sample.size();
  if (s.n == 0) return s;
  double sum = 0;
  for (double v : sample) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n >= 2) {
    double ss = 0;
    for (double v : sample) ss += (v - s.mean) * (v - s.mean);
    s.variance = ss / static_cast<double>(s.n - 1);
  }
  return s;
}

std::string_view to_string(Tail tail) { return tail == Tail::kRight ? "right" : "left"; }

Tail parse_tail(std::string_view text) {
  if (text == "right") return Tail::kRight;
  if (text == "left") return Tail::kLeft;
  throw ContractError("tail must be 'right' or 'left'");
}

WelchStatistic welch_t(std::span<const double> sample_a, std::span<const double> sample_b) {
  if (sample_a.size() < 2 || sample_b.size() < 2) throw ContractError("welch_t: each sample needs n >= 2");
  const auto a = summarize(sample_a);
  const auto b = summarize(sample_b);
  const double qa = a.variance / static_cast<double>(a.n);
  const double qb = b.variance / static_cast<double>(b.n);
  const double se2 = qa + qb;
  if (se2 <= 0.0) throw StatsError("welch_t: both samples have zero variance");
  WelchStatistic w;
  w.t = (a.mean - b.mean) / std::sqrt(se2);
  w.df = se2 * se2 / (qa * qa / static_cast<double>(a.n - 1) + qb * qb / static_cast<double>(b.n - 1));
  return w;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0) || !(b > 0)) throw ContractError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ContractError("incomplete beta needs x in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double t_tail_p(double t, double df, Tail tail) {
  if (!std::isfinite(t) || !std::isfinite(df)) throw ContractError("t_tail_p: non-finite input");
  if (!(df > 0)) throw ContractError("t_tail_p: df must be positive");
  // P(|T| > |t|) / 2
  const double half = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
  const double right = t >= 0 ? half : 1.0 - half;
  return tail == Tail::kRight ? right : 1.0 - right;
}

ConditionComparison compare_conditions(const std::map<ConditionId, std::vector<double>>& scores, ConditionId a,
                                       ConditionId b, Tail tail, double alpha) {
  const auto ia = scores.find(a);
  const auto ib = scores.find(b);
  if (ia == scores.end()) throw ContractError("no scores for condition " + std::string(to_string(a)));
  if (ib == scores.end()) throw ContractError("no scores for condition " + std::string(to_string(b)));
  const auto w = welch_t(ia->second, ib->second);
  ConditionComparison c{a, b, {w.t, w.df, t_tail_p(w.t, w.df, tail), tail}, false};
  c.significant = c.result.p < alpha;
  return c;
}

ParticipantMetrics aggregate_participant(const StudySession& session, std::span<const WordScore> scores) {
  std::vector<std::string> missing;
  for (auto [kind, name] : {std::pair{PhaseKind::kLearn, "learn"}, std::pair{PhaseKind::kRecognize, "recognize"},
                            std::pair{PhaseKind::kGenerate, "generate"}}) {
    if (!complete(session, kind)) missing.emplace_back(name);
  }
  if (session.likert.size() != session.likert_total()) missing.emplace_back("likert");
  if (!missing.empty()) {
    std::string msg = "session " + session.session_id + " incomplete; missing:";
    for (const auto& m : missing) msg += " " + m;
    throw StatsError(msg);
  }
  if (scores.empty()) throw StatsError("no word scores for session " + session.session_id);

  double learn_ms = 0;
  double test_ms = 0;
  std::size_t learn_n = 0;
  std::size_t test_n = 0;
  for (const auto& e : session.events) {
    if (e.phase.kind() == PhaseKind::kLearn) {
      learn_ms += static_cast<double>(e.duration_ms());
      ++learn_n;
    } else if (e.phase.timed_test()) {
      test_ms += static_cast<double>(e.duration_ms());
      ++test_n;
    }
  }
  double combined = 0;
  for (const auto& s : scores) combined += s.combined;
  double likert = 0;
  for (const auto& [word, rating] : session.likert) likert += rating;

  ParticipantMetrics m;
  m.participant_id = session.participant_id;
  m.condition = session.condition;
  m.learning_time_norm = learn_ms / static_cast<double>(learn_n) / 1000.0 / kMaxLearningSeconds;
  m.testing_time_norm = test_ms / static_cast<double>(test_n) / 1000.0 / kMaxTestingSeconds;
  m.combined_score = combined / static_cast<double>(scores.size());
  m.likert_norm = likert / static_cast<double>(session.likert.size()) / kMaxLikert;
  return m;
}

std::vector<WordMetrics> per_word_table(std::span<const ScoredSession> sessions,
                                        const std::vector<std::string>& deck_order) {
  std::vector<WordMetrics> table;
  table.reserve(deck_order.size());
  for (const auto& word : deck_order) {
    std::map<ConditionId, std::pair<double, std::size_t>> acc;
    for (const auto& s : sessions) {
      for (const auto& ws : s.scores) {
        if (ws.word != word) continue;
        auto& [sum, n] = acc[s.session.condition];
        sum += ws.combined;
        ++n;
      }
    }
    WordMetrics row;
    row.word = word;
    for (const auto& [cond, sn] : acc) row.mean_combined[cond] = sn.first / static_cast<double>(sn.second);
    table.push_back(std::move(row));
  }
  return table;
}

ExclusionReport filter_excluded(std::vector<StudySession> sessions, const std::vector<std::string>& exclusion_ids) {
  const std::set<std::string> excluded(exclusion_ids.begin(), exclusion_ids.end());
  std::set<std::string> matched;
  ExclusionReport report;
  for (auto& s : sessions) {
    if (excluded.contains(s.participant_id)) {
      matched.insert(s.participant_id);
      ++report.removed;
    } else {
      report.kept.push_back(std::move(s));
    }
  }
  for (const auto& id : excluded) {
    if (!matched.contains(id)) report.unmatched_ids.push_back(id);
  }
  return report;
}

}  // namespace mnemo
