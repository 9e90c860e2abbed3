#pragma once

#include <functional>
#include <string>

#include "mnemo/deck.hpp"
#include "mnemo/study.hpp"

namespace mnemo::testing {

/// Scripted participant for tests: fixed learn/test durations, one rating
/// for every word, answers supplied by a callback.
struct DriveOptions {
  std::int64_t start_ms = 1'000'000;
  std::int64_t learn_ms = 20'000;
  std::int64_t test_ms = 5'000;
  int rating = 4;
  std::function<std::string(const WordEntry&, PhaseKind)> answer = [](const WordEntry& e, PhaseKind k) {
    return k == PhaseKind::kRecognize ? e.l1_meaning : e.l2_word;
  };
  // Stop before this phase (Phase::done() runs to completion).
  Phase stop_before = Phase::done();
};

inline StudySession drive_session(const Deck& deck, ConditionId condition, const std::string& participant,
                                  std::uint64_t seed, const std::string& session_id, const DriveOptions& o = {}) {
  auto s = create_session(deck, condition, participant, seed, session_id, o.start_ms);
  std::int64_t t = o.start_ms + 1'000;
  accept_consent(s, s.step_id(), t);
  while (!s.done() && !(s.phase == o.stop_before)) {
    const auto kind = s.phase.kind();
    if (kind == PhaseKind::kLearn) {
      advance_learning(s, s.step_id(), o.learn_ms, AdvanceKind::kManual, t += o.learn_ms);
    } else if (kind == PhaseKind::kLikert) {
      for (const auto& e : deck.entries) submit_likert(s, deck, e.l2_word, o.rating, t);
    } else {
      const auto& e = *deck.find(s.current_items()[s.cursor]);
      submit_response(s, s.step_id(), o.answer(e, kind), o.test_ms, t += o.test_ms);
    }
  }
  return s;
}

}  // namespace mnemo::testing
