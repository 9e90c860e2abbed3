#include "mnemo/study.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace mnemo {
namespace {

constexpr std::string_view kInstructionI =
    "Imagine a visual scene connecting the given keyword with the English meaning, and the sound of the German "
    "word.";
constexpr std::string_view kInstructionII =
    "Imagine a specific scene described in the verbal cue that connects the given keyword with the English "
    "meaning, and the sound of the German word.";
constexpr std::string_view kInstructionIII =
    "Remember the image by following the verbal cue that connects the given keyword with the English meaning, "
    "and the sound of the German word.";

const std::array<Condition, 4> kConditions = {{
    {ConditionId::kAutoI, true, false, false, KeywordSource::kAuto, kInstructionI},
    {ConditionId::kAutoII, true, true, false, KeywordSource::kAuto, kInstructionII},
    {ConditionId::kAutoIII, true, true, true, KeywordSource::kAuto, kInstructionIII},
    {ConditionId::kManualII, true, true, false, KeywordSource::kManual, kInstructionII},
}};

constexpr std::array<PhaseKind, 3> kCycleKinds = {PhaseKind::kLearn, PhaseKind::kRecognize, PhaseKind::kGenerate};

void require_step(const StudySession& session, std::string_view step_id) {
  if (session.done()) throw StudyError(StudyErrorCode::kSessionDone, "session is finished");
  if (step_id != session.step_id()) {
    throw StudyError(StudyErrorCode::kStaleStep,
                     "step '" + std::string(step_id) + "' is not current ('" + session.step_id() + "')");
  }
}

std::int64_t monotonic_now(const StudySession& session, std::int64_t now_ms) {
  return std::max(now_ms, session.step_started_ms);
}

// Moves past the current item; rolls into the next phase at the end.
void advance_cursor(StudySession& session, std::int64_t now_ms) {
  ++session.cursor;
  session.step_started_ms = now_ms;
  if (session.cursor >= session.current_items().size()) {
    session.phase = session.phase.next();
    session.cursor = 0;
  }
}

const std::string& keyword_for(const WordEntry& e, const Condition& c) {
  return c.keyword_source == KeywordSource::kAuto ? e.auto_keyword : e.manual_keyword;
}

const std::string& verbal_for(const WordEntry& e, const Condition& c) {
  return c.keyword_source == KeywordSource::kAuto ? e.auto_verbal_cue : e.manual_verbal_cue;
}

const WordEntry& entry_or_throw(const Deck& deck, const std::string& word) {
  const auto* e = deck.find(word);
  if (!e) throw StudyError(StudyErrorCode::kUnknownWord, "word '" + word + "' not in deck '" + deck.name + "'");
  return *e;
}

}  // namespace

const Condition& condition(ConditionId id) { return kConditions[static_cast<std::size_t>(id)]; }

std::string_view to_string(ConditionId id) {
  switch (id) {
    case ConditionId::kAutoI: return "Auto-I";
    case ConditionId::kAutoII: return "Auto-II";
    case ConditionId::kAutoIII: return "Auto-III";
    case ConditionId::kManualII: return "Manual-II";
  }
  return "?";
}

ConditionId parse_condition(std::string_view text) {
  for (auto id : kAllConditions) {
    if (to_string(id) == text) return id;
  }
  throw ContractError("unknown condition '" + std::string(text) + "'");
}

void TimingPolicy::validate() const {
  if (learn_limit_ms <= 0 || learn_min_advance_ms <= 0 || test_limit_ms <= 0 || grace_ms < 0) {
    throw ContractError("timing values must be positive");
  }
  if (learn_min_advance_ms >= learn_limit_ms) throw ContractError("minimum advance must be below the limit");
  for (auto t : pronounce_offsets_ms) {
    if (t <= 0 || t >= learn_limit_ms) throw ContractError("audio offsets must fall inside the learning limit");
  }
  if (likert_limit_ms && *likert_limit_ms <= 0) throw ContractError("likert limit must be positive");
}

Phase Phase::cycle_phase(int cycle, PhaseKind kind) {
  if (cycle < 1 || cycle > kCycles) throw ContractError("cycle must be 1..3");
  const auto pos = std::find(kCycleKinds.begin(), kCycleKinds.end(), kind);
  if (pos == kCycleKinds.end()) throw ContractError("not a cycle phase kind");
  return {1 + (cycle - 1) * 3 + static_cast<int>(pos - kCycleKinds.begin())};
}

PhaseKind Phase::kind() const {
  if (index <= 0) return PhaseKind::kConsent;
  if (index >= 11) return PhaseKind::kDone;
  if (index == 10) return PhaseKind::kLikert;
  return kCycleKinds[static_cast<std::size_t>((index - 1) % 3)];
}

int Phase::cycle() const { return (index >= 1 && index <= 9) ? (index - 1) / 3 + 1 : 0; }

std::string Phase::id() const {
  switch (kind()) {
    case PhaseKind::kConsent: return "consent";
    case PhaseKind::kLearn: return "learn-" + std::to_string(cycle());
    case PhaseKind::kRecognize: return "recognize-" + std::to_string(cycle());
    case PhaseKind::kGenerate: return "generate-" + std::to_string(cycle());
    case PhaseKind::kLikert: return "likert";
    case PhaseKind::kDone: return "done";
  }
  return "?";
}

Phase Phase::parse(std::string_view id) {
  for (int i = 0; i < kCount; ++i) {
    if (Phase{i}.id() == id) return {i};
  }
  throw ContractError("unknown phase '" + std::string(id) + "'");
}

std::string_view to_string(AdvanceKind k) { return k == AdvanceKind::kManual ? "manual" : "timeout"; }

AdvanceKind parse_advance_kind(std::string_view text) {
  if (text == "manual") return AdvanceKind::kManual;
  if (text == "timeout") return AdvanceKind::kTimeout;
  throw ContractError("advance kind must be 'manual' or 'timeout'");
}

std::string_view to_string(StudyErrorCode code) {
  switch (code) {
    case StudyErrorCode::kInvalidDeck: return "invalid_deck";
    case StudyErrorCode::kStaleStep: return "stale_step";
    case StudyErrorCode::kWrongPhase: return "wrong_phase";
    case StudyErrorCode::kTooEarly: return "too_early";
    case StudyErrorCode::kInvalidRating: return "invalid_rating";
    case StudyErrorCode::kDuplicateRating: return "duplicate_rating";
    case StudyErrorCode::kUnknownWord: return "unknown_word";
    case StudyErrorCode::kSessionDone: return "session_done";
  }
  return "unknown";
}

const std::vector<std::string>& StudySession::current_items() const {
  static const std::vector<std::string> kNone;
  const int c = phase.cycle();
  if (c == 0) return kNone;
  return item_orders[static_cast<std::size_t>(phase.index - 1)];
}

std::size_t StudySession::likert_total() const {
  std::size_t n = 0;
  for (int c = 1; c <= Phase::kCycles; ++c) {
    n += item_orders[static_cast<std::size_t>(Phase::cycle_phase(c, PhaseKind::kLearn).index - 1)].size();
  }
  return n;
}

std::string StudySession::step_id() const { return phase.id() + "/" + std::to_string(cursor); }

void seeded_shuffle(std::vector<std::string>& items, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (std::size_t i = items.size(); i > 1; --i) {
    // Uniform draw in [0, i) by rejection, independent of the standard
    // library's distribution implementation.
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = 0;
    do {
      draw = rng();
    } while (draw >= limit);
    std::swap(items[i - 1], items[draw % bound]);
  }
}

StudySession create_session(const Deck& deck, ConditionId condition, std::string participant_id, std::uint64_t seed,
                            std::string session_id, std::int64_t now_ms, TimingPolicy policy) {
  try {
    validate_deck(deck);
  } catch (const DeckError& e) {
    throw StudyError(StudyErrorCode::kInvalidDeck, e.what());
  }
  policy.validate();

  StudySession s;
  s.session_id = std::move(session_id);
  s.participant_id = std::move(participant_id);
  s.condition = condition;
  s.deck_name = deck.name;
  s.rng_seed = seed;
  s.policy = std::move(policy);
  s.phase = Phase::consent();
  s.created_at_ms = now_ms;
  s.step_started_ms = now_ms;

  // Cycle k draws from set k-1; each of its three phases gets its own order.
  for (int c = 1; c <= Phase::kCycles; ++c) {
    std::vector<std::string> words;
    for (const auto* e : deck.set(c - 1)) words.push_back(e->l2_word);
    for (std::size_t t = 0; t < kCycleKinds.size(); ++t) {
      auto order = words;
      const auto phase = Phase::cycle_phase(c, kCycleKinds[t]);
      seeded_shuffle(order, seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(phase.index)));
      s.item_orders[static_cast<std::size_t>(phase.index - 1)] = std::move(order);
    }
  }
  return s;
}

StepDescriptor current_step(const StudySession& session, const Deck& deck, std::int64_t now_ms) {
  if (session.done()) throw StudyError(StudyErrorCode::kSessionDone, "session is finished");
  const auto& cond = condition(session.condition);
  const auto& policy = session.policy;
  const auto elapsed = std::max<std::int64_t>(0, now_ms - session.step_started_ms);

  StepDescriptor d;
  d.step_id = session.step_id();
  d.phase = session.phase;
  d.cursor = session.cursor;

  switch (session.phase.kind()) {
    case PhaseKind::kConsent:
      d.total = 1;
      break;
    case PhaseKind::kLearn: {
      const auto& e = entry_or_throw(deck, session.current_items()[session.cursor]);
      d.total = session.current_items().size();
      d.word = e.l2_word;
      d.meaning = e.l1_meaning;
      if (cond.show_keyword) d.keyword = keyword_for(e, cond);
      if (cond.show_verbal) d.verbal_cue = verbal_for(e, cond);
      if (cond.show_visual && e.image_ref) d.image_ref = *e.image_ref;
      d.audio_ref = e.audio_ref;
      d.instruction_text = std::string(cond.instruction_text);
      d.limit_ms = policy.learn_limit_ms;
      d.remaining_ms = std::max<std::int64_t>(0, policy.learn_limit_ms - elapsed);
      d.advance_enabled_in_ms = std::max<std::int64_t>(0, policy.learn_min_advance_ms - elapsed);
      d.audio_offsets_ms = policy.pronounce_offsets_ms;
      break;
    }
    case PhaseKind::kRecognize: {
      const auto& e = entry_or_throw(deck, session.current_items()[session.cursor]);
      d.total = session.current_items().size();
      d.word = e.l2_word;
      d.prompt_label = std::string(kRecognizeLabel);
      d.limit_ms = policy.test_limit_ms;
      d.remaining_ms = std::max<std::int64_t>(0, policy.test_limit_ms - elapsed);
      break;
    }
    case PhaseKind::kGenerate: {
      const auto& e = entry_or_throw(deck, session.current_items()[session.cursor]);
      d.total = session.current_items().size();
      d.meaning = e.l1_meaning;
      d.prompt_label = std::string(kGenerateLabel);
      d.note = std::string(kUmlautNote);
      d.limit_ms = policy.test_limit_ms;
      d.remaining_ms = std::max<std::int64_t>(0, policy.test_limit_ms - elapsed);
      break;
    }
    case PhaseKind::kLikert: {
      d.total = session.likert_total();
      d.cursor = session.likert.size();
      if (policy.likert_limit_ms) {
        d.limit_ms = *policy.likert_limit_ms;
        d.remaining_ms = std::max<std::int64_t>(0, *policy.likert_limit_ms - elapsed);
      }
      for (const auto& e : deck.entries) {
        LikertItem item;
        item.word = e.l2_word;
        item.l1_meaning = e.l1_meaning;
        if (cond.show_keyword) item.keyword = keyword_for(e, cond);
        if (cond.show_verbal) item.verbal_cue = verbal_for(e, cond);
        if (cond.show_visual && e.image_ref) item.image_ref = *e.image_ref;
        if (auto it = session.likert.find(e.l2_word); it != session.likert.end()) item.rating = it->second;
        d.likert_items.push_back(std::move(item));
      }
      break;
    }
    case PhaseKind::kDone:
      break;
  }
  return d;
}

bool expire(StudySession& session, std::int64_t now_ms) {
  const auto kind = session.phase.kind();
  if (kind != PhaseKind::kLearn && kind != PhaseKind::kRecognize && kind != PhaseKind::kGenerate) return false;
  const auto& policy = session.policy;
  const auto elapsed = now_ms - session.step_started_ms;

  std::int64_t limit = 0;
  if (kind == PhaseKind::kLearn) {
    if (elapsed < policy.learn_limit_ms) return false;
    limit = policy.learn_limit_ms;
  } else {
    if (elapsed <= policy.test_limit_ms + policy.grace_ms) return false;
    limit = policy.test_limit_ms;
  }

  TrialEvent ev;
  ev.word = session.current_items()[session.cursor];
  ev.phase = session.phase;
  ev.shown_at_ms = session.step_started_ms;
  ev.answered_at_ms = session.step_started_ms + limit;
  ev.advance_kind = AdvanceKind::kTimeout;
  session.events.push_back(std::move(ev));
  advance_cursor(session, now_ms);
  return true;
}

void accept_consent(StudySession& session, std::string_view step_id, std::int64_t now_ms) {
  require_step(session, step_id);
  if (session.phase.kind() != PhaseKind::kConsent) {
    throw StudyError(StudyErrorCode::kWrongPhase, "not in the consent phase");
  }
  session.phase = session.phase.next();
  session.cursor = 0;
  session.step_started_ms = monotonic_now(session, now_ms);
}

AdvanceOutcome advance_learning(StudySession& session, std::string_view step_id,
                                std::optional<std::int64_t> client_elapsed_ms, AdvanceKind kind,
                                std::int64_t now_ms) {
  require_step(session, step_id);
  if (session.phase.kind() != PhaseKind::kLearn) {
    throw StudyError(StudyErrorCode::kWrongPhase, "advance is only valid while learning");
  }
  const auto& policy = session.policy;
  now_ms = monotonic_now(session, now_ms);
  const auto elapsed = now_ms - session.step_started_ms;

  if (elapsed < policy.learn_min_advance_ms) {
    throw StudyError(StudyErrorCode::kTooEarly, "advance allowed after " +
                                                    std::to_string(policy.learn_min_advance_ms) + " ms",
                     policy.learn_min_advance_ms - elapsed);
  }
  if (kind == AdvanceKind::kTimeout && elapsed < policy.learn_limit_ms) {
    throw StudyError(StudyErrorCode::kTooEarly, "learning time has not run out",
                     policy.learn_limit_ms - elapsed);
  }

  TrialEvent ev;
  ev.word = session.current_items()[session.cursor];
  ev.phase = session.phase;
  ev.shown_at_ms = session.step_started_ms;
  ev.client_elapsed_ms = client_elapsed_ms;
  const bool timed_out = elapsed >= policy.learn_limit_ms;
  ev.advance_kind = timed_out ? AdvanceKind::kTimeout : AdvanceKind::kManual;
  ev.answered_at_ms = timed_out ? session.step_started_ms + policy.learn_limit_ms : now_ms;
  session.events.push_back(std::move(ev));
  advance_cursor(session, now_ms);
  return timed_out ? AdvanceOutcome::kTimedOut : AdvanceOutcome::kAdvanced;
}

SubmitOutcome submit_response(StudySession& session, std::string_view step_id, std::string response,
                              std::optional<std::int64_t> client_elapsed_ms, std::int64_t now_ms) {
  require_step(session, step_id);
  if (!session.phase.timed_test()) {
    throw StudyError(StudyErrorCode::kWrongPhase, "responses are only accepted in test phases");
  }
  const auto& policy = session.policy;
  now_ms = monotonic_now(session, now_ms);
  const auto elapsed = now_ms - session.step_started_ms;

  TrialEvent ev;
  ev.word = session.current_items()[session.cursor];
  ev.phase = session.phase;
  ev.shown_at_ms = session.step_started_ms;
  ev.client_elapsed_ms = client_elapsed_ms;

  SubmitOutcome outcome = SubmitOutcome::kRecorded;
  if (elapsed > policy.test_limit_ms + policy.grace_ms) {
    ev.advance_kind = AdvanceKind::kTimeout;
    ev.answered_at_ms = session.step_started_ms + policy.test_limit_ms;
    outcome = SubmitOutcome::kTimedOut;
  } else {
    ev.advance_kind = AdvanceKind::kManual;
    ev.answered_at_ms = now_ms;
    ev.response = std::move(response);
    if (elapsed > policy.test_limit_ms) {
      ev.near_limit = true;
      outcome = SubmitOutcome::kRecordedNearLimit;
    }
  }
  session.events.push_back(std::move(ev));
  advance_cursor(session, now_ms);
  return outcome;
}

void submit_likert(StudySession& session, const Deck& deck, std::string_view word, int rating, std::int64_t now_ms) {
  if (session.done()) throw StudyError(StudyErrorCode::kSessionDone, "session is finished");
  if (session.phase.kind() != PhaseKind::kLikert) {
    throw StudyError(StudyErrorCode::kWrongPhase, "ratings are only accepted in the Likert phase");
  }
  if (rating < 1 || rating > 5) {
    throw StudyError(StudyErrorCode::kInvalidRating, "rating must be 1..5, got " + std::to_string(rating));
  }
  const std::string key(word);
  entry_or_throw(deck, key);
  if (session.likert.contains(key)) {
    throw StudyError(StudyErrorCode::kDuplicateRating, "'" + key + "' already rated");
  }
  session.likert.emplace(key, rating);
  if (session.likert.size() == session.likert_total()) {
    session.phase = Phase::done();
    session.cursor = 0;
    session.step_started_ms = monotonic_now(session, now_ms);
  }
}

}  // namespace mnemo
