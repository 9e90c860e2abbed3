#include "mnemo/analysis.hpp"

#include <map>
#include <ostream>

#include "mnemo/csv.hpp"
#include "mnemo/scoring.hpp"

namespace mnemo {
namespace {

const TrialEvent* find_event(const StudySession& s, const std::string& word, PhaseKind kind) {
  for (const auto& e : s.events) {
    if (e.word == word && e.phase.kind() == kind) return &e;
  }
  return nullptr;
}

std::string answer_of(const TrialEvent* e) {
  if (!e || e->advance_kind == AdvanceKind::kTimeout || !e->response) return {};
  return *e->response;
}

}  // namespace

std::vector<WordScore> score_session(const StudySession& session, const Deck& deck, const EmbeddingStore& store) {
  std::vector<WordScore> out;
  out.reserve(deck.entries.size());
  for (const auto& entry : deck.entries) {
    const auto* rec = find_event(session, entry.l2_word, PhaseKind::kRecognize);
    const auto* gen = find_event(session, entry.l2_word, PhaseKind::kGenerate);
    WordScore ws;
    ws.word = entry.l2_word;
    ws.recognition = recognition_score(store, entry.l1_meaning, answer_of(rec)).score;
    ws.generation = generation_score(entry.l2_word, answer_of(gen)).score;
    ws.combined = combined_score(ws.recognition, ws.generation);
    out.push_back(std::move(ws));
  }
  return out;
}

std::vector<ResponseRow> export_responses(const StudySession& session) {
  std::vector<ResponseRow> rows;
  for (const auto& e : session.events) {
    if (!e.phase.timed_test()) continue;
    rows.push_back({session.participant_id, e.word,
                    e.phase.kind() == PhaseKind::kRecognize ? Task::kRecognition : Task::kGeneration, answer_of(&e),
                    e.duration_ms()});
  }
  return rows;
}

std::string_view to_string(TestUnit unit) { return unit == TestUnit::kWord ? "word" : "participant"; }

TestUnit parse_test_unit(std::string_view text) {
  if (text == "word") return TestUnit::kWord;
  if (text == "participant") return TestUnit::kParticipant;
  throw ContractError("unit must be 'word' or 'participant'");
}

AnalysisReport run_analysis(std::vector<StudySession> sessions, const Deck& deck, const EmbeddingStore& store,
                            const std::vector<std::string>& exclusion_ids, TestUnit unit) {
  AnalysisReport report;
  report.unit = unit;
  auto filtered = filter_excluded(std::move(sessions), exclusion_ids);
  report.excluded = filtered.removed;
  report.unmatched_exclusions = std::move(filtered.unmatched_ids);

  std::vector<ScoredSession> scored;
  for (auto& s : filtered.kept) {
    auto scores = score_session(s, deck, store);
    try {
      report.participants.push_back(aggregate_participant(s, scores));
    } catch (const StatsError&) {
      report.incomplete.push_back(s.session_id);
      continue;
    }
    scored.push_back({std::move(s), std::move(scores)});
  }

  std::vector<std::string> order;
  for (const auto& e : deck.entries) order.push_back(e.l2_word);
  report.per_word = per_word_table(scored, order);

  std::map<ConditionId, std::vector<double>> samples;
  if (unit == TestUnit::kWord) {
    for (const auto& row : report.per_word) {
      for (const auto& [cond, mean] : row.mean_combined) samples[cond].push_back(mean);
    }
  } else {
    for (const auto& p : report.participants) samples[p.condition].push_back(p.combined_score);
  }

  for (const auto& h : kHypotheses) {
    HypothesisResult r{h, std::nullopt, {}};
    try {
      r.comparison = compare_conditions(samples, h.a, h.b, h.tail);
    } catch (const Error& e) {
      r.note = e.what();
    }
    report.tests.push_back(std::move(r));
  }
  return report;
}

void write_participants_csv(std::ostream& out, const AnalysisReport& report) {
  out << "participant_id,condition,learning_time_norm,testing_time_norm,combined_score,likert_norm\n";
  for (const auto& p : report.participants) {
    write_csv_row(out, {p.participant_id, std::string(to_string(p.condition)), format_double(p.learning_time_norm),
                        format_double(p.testing_time_norm), format_double(p.combined_score),
                        format_double(p.likert_norm)});
  }
}

void write_per_word_csv(std::ostream& out, const AnalysisReport& report) {
  CsvRow header{"word"};
  for (auto c : kAllConditions) header.emplace_back(to_string(c));
  write_csv_row(out, header);
  for (const auto& w : report.per_word) {
    CsvRow row{w.word};
    for (auto c : kAllConditions) {
      const auto it = w.mean_combined.find(c);
      row.push_back(it == w.mean_combined.end() ? "" : format_double(it->second));
    }
    write_csv_row(out, row);
  }
}

void write_tests_csv(std::ostream& out, const AnalysisReport& report) {
  out << "condition_a,condition_b,tail,unit,t,df,p,significant,note\n";
  for (const auto& r : report.tests) {
    CsvRow row{std::string(to_string(r.hypothesis.a)), std::string(to_string(r.hypothesis.b)),
               std::string(to_string(r.hypothesis.tail)), std::string(to_string(report.unit))};
    if (r.comparison) {
      const auto& c = *r.comparison;
      row.insert(row.end(), {format_double(c.result.t), format_double(c.result.df), format_double(c.result.p),
                             c.significant ? "true" : "false", ""});
    } else {
      row.insert(row.end(), {"", "", "", "", r.note});
    }
    write_csv_row(out, row);
  }
}

void write_boxplot_csv(std::ostream& out, const AnalysisReport& report) {
  out << "participant_id,condition,metric,value\n";
  for (const auto& p : report.participants) {
    const std::string cond(to_string(p.condition));
    for (const auto& [metric, value] :
         {std::pair{"learning_time", p.learning_time_norm}, std::pair{"testing_time", p.testing_time_norm},
          std::pair{"combined_score", p.combined_score}, std::pair{"likert", p.likert_norm}}) {
      write_csv_row(out, {p.participant_id, cond, metric, format_double(value)});
    }
  }
}

}  // namespace mnemo
