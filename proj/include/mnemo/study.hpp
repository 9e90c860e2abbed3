#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/deck.hpp"
#include "mnemo/error.hpp"

namespace mnemo {

enum class ConditionId { kAutoI, kAutoII, kAutoIII, kManualII };
enum class KeywordSource { kAuto, kManual };

inline constexpr std::array<ConditionId, 4> kAllConditions = {ConditionId::kAutoI, ConditionId::kAutoII,
                                                              ConditionId::kAutoIII, ConditionId::kManualII};

/// One experimental arm: which cues are shown, where the keyword comes from,
/// and the instruction shown while learning.
struct Condition {
  ConditionId id;
  bool show_keyword;
  bool show_verbal;
  bool show_visual;
  KeywordSource keyword_source;
  std::string_view instruction_text;
};

const Condition& condition(ConditionId id);
std::string_view to_string(ConditionId id);
// Accepts "Auto-I", "Auto-II", "Auto-III", "Manual-II".
ConditionId parse_condition(std::string_view text);

/// Protocol timing in milliseconds.
struct TimingPolicy {
  std::int64_t learn_limit_ms = 30'000;
  std::int64_t learn_min_advance_ms = 15'000;
  std::vector<std::int64_t> pronounce_offsets_ms = {2'000, 7'000};
  std::int64_t test_limit_ms = 15'000;
  // Late submissions within this window past test_limit_ms still count.
  std::int64_t grace_ms = 2'000;
  std::optional<std::int64_t> likert_limit_ms;

  bool operator==(const TimingPolicy&) const = default;

  // Throws ContractError unless all values are positive, the minimum advance
  // is below the learning limit, and audio offsets fall inside it.
  void validate() const;
};

enum class PhaseKind { kConsent, kLearn, kRecognize, kGenerate, kLikert, kDone };

/// Consent, then (Learn, Recognize, Generate) for cycles 1..3, then Likert
/// and Done. `index` runs 0..11 in that order.
struct Phase {
  int index = 0;

  static constexpr int kCount = 12;
  static constexpr int kCycles = 3;
  static Phase consent() { return {0}; }
  static Phase cycle_phase(int cycle, PhaseKind kind);
  static Phase likert() { return {10}; }
  static Phase done() { return {11}; }

  PhaseKind kind() const;
  int cycle() const;  // 1..3 for cycle phases, 0 otherwise
  bool timed_test() const { return kind() == PhaseKind::kRecognize || kind() == PhaseKind::kGenerate; }
  Phase next() const { return {index + 1}; }
  std::string id() const;  // "consent", "learn-1", ..., "likert", "done"
  static Phase parse(std::string_view id);

  bool operator==(const Phase&) const = default;
};

enum class AdvanceKind { kManual, kTimeout };
std::string_view to_string(AdvanceKind k);
AdvanceKind parse_advance_kind(std::string_view text);

struct TrialEvent {
  std::string word;  // l2 word
  Phase phase;
  std::int64_t shown_at_ms = 0;
  std::int64_t answered_at_ms = 0;
  std::optional<std::string> response;  // test phases only; discarded on timeout
  AdvanceKind advance_kind = AdvanceKind::kManual;
  bool near_limit = false;  // answered inside the grace window
  std::optional<std::int64_t> client_elapsed_ms;

  std::int64_t duration_ms() const { return answered_at_ms - shown_at_ms; }
  bool operator==(const TrialEvent&) const = default;
};

struct StudySession {
  std::string session_id;
  std::string participant_id;
  ConditionId condition = ConditionId::kAutoI;
  std::string deck_name;
  std::uint64_t rng_seed = 0;
  TimingPolicy policy;
  Phase phase;
  // Per cycle phase (index - 1): the l2 words in presentation order.
  std::array<std::vector<std::string>, 9> item_orders;
  std::size_t cursor = 0;
  std::int64_t created_at_ms = 0;
  std::int64_t step_started_ms = 0;
  std::vector<TrialEvent> events;
  std::map<std::string, int> likert;

  bool operator==(const StudySession&) const = default;

  const std::vector<std::string>& current_items() const;
  std::size_t likert_total() const;
  bool done() const { return phase == Phase::done(); }
  // "<phase>/<cursor>", e.g. "learn-2/5".
  std::string step_id() const;
};

enum class StudyErrorCode {
  kInvalidDeck,
  kStaleStep,
  kWrongPhase,
  kTooEarly,
  kInvalidRating,
  kDuplicateRating,
  kUnknownWord,
  kSessionDone,
};

std::string_view to_string(StudyErrorCode code);

// A rejected protocol action. The session is left unchanged.
class StudyError : public Error {
 public:
  StudyError(StudyErrorCode code, const std::string& what, std::optional<std::int64_t> remaining_ms = {})
      : Error(what), code_(code), remaining_ms_(remaining_ms) {}
  StudyErrorCode code() const noexcept { return code_; }
  std::optional<std::int64_t> remaining_ms() const noexcept { return remaining_ms_; }

 private:
  StudyErrorCode code_;
  std::optional<std::int64_t> remaining_ms_;
};

struct LikertItem {
  std::string word;
  std::string l1_meaning;
  std::optional<std::string> keyword;
  std::optional<std::string> verbal_cue;
  std::optional<std::string> image_ref;
  std::optional<int> rating;
};

/// What the participant sees for the current step. Cue fields the condition
/// hides are absent, and test steps carry neither the answer nor any cue.
struct StepDescriptor {
  std::string step_id;
  Phase phase;
  std::optional<std::string> word;      // l2 word (learn, recognize)
  std::optional<std::string> meaning;   // l1 meaning (learn, generate)
  std::optional<std::string> keyword;
  std::optional<std::string> verbal_cue;
  std::optional<std::string> image_ref;
  std::optional<std::string> audio_ref;
  std::optional<std::string> instruction_text;
  std::optional<std::string> prompt_label;
  std::optional<std::string> note;
  std::optional<std::int64_t> limit_ms;
  std::optional<std::int64_t> remaining_ms;
  std::optional<std::int64_t> advance_enabled_in_ms;
  std::vector<std::int64_t> audio_offsets_ms;
  std::vector<LikertItem> likert_items;
  std::size_t cursor = 0;
  std::size_t total = 0;
};

inline constexpr std::string_view kRecognizeLabel = "What is this in English?";
inline constexpr std::string_view kGenerateLabel = "What is this in German?";
inline constexpr std::string_view kUmlautNote = "Please use a, o, u, s instead of ä, ö, ü, ß.";

// Seeded Fisher-Yates over a 64-bit Mersenne Twister; identical on every
// platform.
void seeded_shuffle(std::vector<std::string>& items, std::uint64_t seed);

// Throws StudyError(kInvalidDeck) if the deck breaks its invariants.
StudySession create_session(const Deck& deck, ConditionId condition, std::string participant_id, std::uint64_t seed,
                            std::string session_id, std::int64_t now_ms, TimingPolicy policy = {});

// Throws StudyError(kSessionDone) once the session is finished.
StepDescriptor current_step(const StudySession& session, const Deck& deck, std::int64_t now_ms);

// Applies the timeout of the current timed step if its deadline has passed.
// Returns true when the session changed.
bool expire(StudySession& session, std::int64_t now_ms);

void accept_consent(StudySession& session, std::string_view step_id, std::int64_t now_ms);

enum class AdvanceOutcome { kAdvanced, kTimedOut };

// Learn phase only. Manual advance before the minimum is rejected with the
// remaining wait; at or past the limit the step is recorded as a timeout.
AdvanceOutcome advance_learning(StudySession& session, std::string_view step_id,
                                std::optional<std::int64_t> client_elapsed_ms, AdvanceKind kind,
                                std::int64_t now_ms);

enum class SubmitOutcome { kRecorded, kRecordedNearLimit, kTimedOut };

// Recognize/Generate only. Past limit + grace the response is discarded and
// a timeout is recorded.
SubmitOutcome submit_response(StudySession& session, std::string_view step_id, std::string response,
                              std::optional<std::int64_t> client_elapsed_ms, std::int64_t now_ms);

// Likert phase only; one rating in 1..5 per deck word. The last rating ends
// the session.
void submit_likert(StudySession& session, const Deck& deck, std::string_view word, int rating, std::int64_t now_ms);

}  // namespace mnemo
