#include "mnemo/simulate.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <random>

#include "mnemo/service.hpp"
#include "mnemo/text.hpp"

namespace mnemo {
namespace {

using nlohmann::json;

constexpr std::int64_t kEpochMs = 1'700'000'000'000;
constexpr std::size_t kMaxMessages = 20;

// Portable draws: std distributions differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [lo, hi].
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % span);
  }
  bool chance(double p) { return static_cast<double>(engine_() >> 11) * 0x1.0p-53 < p; }

 private:
  std::mt19937_64 engine_;
};

double knowledge(ConditionId c) {
  switch (c) {
    case ConditionId::kAutoI: return 0.45;
    case ConditionId::kAutoII: return 0.55;
    case ConditionId::kAutoIII: return 0.6;
    case ConditionId::kManualII: return 0.6;
  }
  return 0.5;
}

std::string typo(const std::string& word, Rng& rng) {
  auto cps = utf8_decode(word);
  if (cps.empty()) return word;
  const auto pos = static_cast<std::size_t>(rng.uniform(0, static_cast<std::int64_t>(cps.size()) - 1));
  const auto letter = static_cast<char32_t>('a' + rng.uniform(0, 25));
  switch (rng.uniform(0, 2)) {
    case 0: cps[pos] = letter; break;
    case 1: cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(pos), letter); break;
    default:
      if (cps.size() > 1) cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return utf8_encode(cps);
}

class Participant {
 public:
  Participant(StudyService& service, const Deck& deck, const SimulationOptions& options, std::int64_t& now,
              SimulationReport& report, std::size_t index)
      : service_(service),
        deck_(deck),
        options_(options),
        now_(now),
        report_(report),
        rng_(options.seed * 0x9E3779B97F4A7C15ULL + index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "p%04zu", index + 1);
    participant_id_ = buf;
  }

  void run() {
    const auto created = service_.create_session({{"participant_id", participant_id_}});
    id_ = created.at("session_id").get<std::string>();
    condition_ = parse_condition(created.at("condition").get<std::string>());
    policy_ = service_.snapshot(id_).policy;
    for (int guard = 0; guard < 100'000; ++guard) {
      const auto step = service_.step(id_);
      if (step.at("done").get<bool>()) return;
      check_step(step);
      const auto kind = step.at("kind").get<std::string>();
      if (kind == "consent") {
        now_ += rng_.uniform(1'000, 5'000);
        service_.advance(id_, {{"step_id", step.at("step_id")}});
      } else if (kind == "learn") {
        learn(step);
      } else if (kind == "recognize" || kind == "generate") {
        test(step, kind == "recognize");
      } else if (kind == "likert") {
        likert(step);
      }
    }
    violation("session " + id_ + " did not finish");
  }

  const std::string& session_id() const { return id_; }

 private:
  void violation(const std::string& msg) {
    if (report_.messages.size() < kMaxMessages) report_.messages.push_back(msg);
  }

  void leak(const std::string& what, const json& step) {
    ++report_.hidden_cue_leaks;
    violation(id_ + " " + step.value("step_id", "?") + ": " + what);
  }

  void check_cues(const json& j, const WordEntry& e, const json& step) {
    const auto& c = condition(condition_);
    const bool manual = c.keyword_source == KeywordSource::kManual;
    if (j.contains("keyword") != c.show_keyword) leak("keyword visibility", step);
    if (j.contains("verbal_cue") != c.show_verbal) leak("verbal cue visibility", step);
    if (!c.show_visual && j.contains("image_ref")) leak("image shown", step);
    if (j.contains("keyword") && j["keyword"] != (manual ? e.manual_keyword : e.auto_keyword)) leak("wrong keyword", step);
    if (j.contains("verbal_cue") && j["verbal_cue"] != (manual ? e.manual_verbal_cue : e.auto_verbal_cue)) {
      leak("wrong verbal cue", step);
    }
  }

  void check_step(const json& step) {
    const auto kind = step.at("kind").get<std::string>();
    if (kind == "learn") {
      const auto* e = deck_.find(step.at("word").get<std::string>());
      if (!e) return leak("unknown word", step);
      check_cues(step, *e, step);
    } else if (kind == "recognize" || kind == "generate") {
      for (const char* key : {"keyword", "verbal_cue", "image_ref", "instruction", "audio_ref"}) {
        if (step.contains(key)) leak(std::string(key) + " on a test step", step);
      }
      if (step.contains(kind == "recognize" ? "meaning" : "word")) leak("answer on a test step", step);
    } else if (kind == "likert") {
      for (const auto& item : step.at("likert_items")) {
        const auto* e = deck_.find(item.at("word").get<std::string>());
        if (!e) return leak("unknown word", step);
        check_cues(item, *e, step);
      }
    }
  }

  // The virtual clock never runs backwards.
  void at(std::int64_t t) { now_ = std::max(now_, t); }

  std::int64_t elapsed(const json& step) const {
    return step.at("limit_ms").get<std::int64_t>() - step.at("remaining_ms").get<std::int64_t>();
  }

  void learn(const json& step) {
    const auto shown = now_ - elapsed(step);
    const auto min_ms = policy_.learn_min_advance_ms;
    const auto limit = policy_.learn_limit_ms;
    if (rng_.chance(options_.early_advance_rate)) {
      at(shown + rng_.uniform(0, min_ms - 1));
      ++report_.early_attempts;
      try {
        service_.advance(id_, {{"step_id", step.at("step_id")}, {"client_elapsed_ms", now_ - shown}});
        violation(id_ + " early advance accepted at " + std::to_string(now_ - shown) + " ms");
      } catch (const ApiError& e) {
        if (e.status() == 425 && e.remaining_ms() && *e.remaining_ms() == min_ms - (now_ - shown)) {
          ++report_.early_rejected;
        } else {
          violation(id_ + " early advance rejected with " + e.reason());
        }
      }
    }
    if (rng_.chance(options_.timeout_rate)) {
      at(shown + limit + rng_.uniform(0, 5'000));
      // Either let the next poll expire the step or report the timeout.
      if (rng_.chance(0.5)) return;
      service_.advance(id_, {{"step_id", step.at("step_id")}, {"kind", "timeout"}});
      return;
    }
    at(shown + rng_.uniform(min_ms, limit - 1));
    service_.advance(id_, {{"step_id", step.at("step_id")}, {"client_elapsed_ms", now_ - shown}});
  }

  std::string answer(const WordEntry& e, bool recognize) {
    if (!rng_.chance(knowledge(condition_))) {
      if (rng_.chance(0.5)) return "";
      const auto& other = deck_.entries[static_cast<std::size_t>(
          rng_.uniform(0, static_cast<std::int64_t>(deck_.entries.size()) - 1))];
      return recognize ? other.l1_meaning : transliterate_umlauts(other.l2_word);
    }
    if (recognize) {
      std::string m = e.l1_meaning;
      if (m.rfind("to ", 0) == 0 && rng_.chance(0.5)) m = m.substr(3);
      if (rng_.chance(0.2) && !m.empty()) m[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(m[0])));
      return m;
    }
    std::string w = rng_.chance(0.9) ? transliterate_umlauts(e.l2_word) : e.l2_word;
    if (rng_.chance(0.3)) w = typo(w, rng_);
    return w;
  }

  void test(const json& step, bool recognize) {
    const auto shown = now_ - elapsed(step);
    const auto limit = step.at("limit_ms").get<std::int64_t>();
    const auto word = recognize ? step.at("word").get<std::string>() : current_word();
    const auto* e = deck_.find(word);
    const double r = static_cast<double>(rng_.uniform(0, 999'999)) / 1e6;
    const auto grace = policy_.grace_ms;
    if (r < options_.timeout_rate) {
      at(shown + limit + grace + 1 + rng_.uniform(0, 10'000));
      if (rng_.chance(0.5)) return;  // next poll expires it
    } else if (r < options_.timeout_rate + options_.near_limit_rate) {
      at(shown + limit + rng_.uniform(1, grace));
    } else {
      at(shown + rng_.uniform(800, limit));
    }
    const auto out = service_.submit(
        id_, {{"step_id", step.at("step_id")}, {"response", e ? answer(*e, recognize) : ""}, {"client_elapsed_ms", now_ - shown}});
    if (out.at("outcome") == "recorded_near_limit") ++report_.near_limit;
  }

  // The participant's "memory" of the answer: the word actually on screen.
  std::string current_word() {
    const auto snapshot = service_.snapshot(id_);
    return snapshot.current_items()[snapshot.cursor];
  }

  void likert(const json& step) {
    for (const auto& item : step.at("likert_items")) {
      if (!item.at("rating").is_null()) continue;
      now_ += rng_.uniform(500, 3'000);
      service_.likert(id_, {{"word", item.at("word")}, {"rating", rng_.uniform(1, 5)}});
    }
  }

  StudyService& service_;
  const Deck& deck_;
  const SimulationOptions& options_;
  std::int64_t& now_;
  SimulationReport& report_;
  Rng rng_;
  std::string participant_id_;
  std::string id_;
  ConditionId condition_ = ConditionId::kAutoI;
  TimingPolicy policy_;
};

void check_coverage(const StudySession& s, const Deck& deck, SimulationReport& report) {
  for (auto kind : {PhaseKind::kLearn, PhaseKind::kRecognize, PhaseKind::kGenerate}) {
    std::map<std::string, int> seen;
    for (const auto& e : s.events) {
      if (e.phase.kind() == kind) ++seen[e.word];
    }
    bool ok = seen.size() == deck.entries.size();
    for (const auto& entry : deck.entries) ok = ok && seen[entry.l2_word] == 1;
    if (!ok) {
      ++report.coverage_errors;
      if (report.messages.size() < kMaxMessages) report.messages.push_back(s.session_id + ": coverage");
    }
  }
  if (s.likert.size() != deck.entries.size()) ++report.coverage_errors;
}

}  // namespace

SimulationReport simulate_participants(const Deck& deck, const SimulationOptions& options) {
  SimulationReport report;
  std::int64_t now = kEpochMs;
  ServiceOptions service_options;
  service_options.sessions_dir = options.sessions_dir;
  service_options.seed = options.seed;
  service_options.durable = options.durable_logs;
  StudyService service(deck, service_options, [&now] { return now; });

  for (std::size_t i = 0; i < options.participants; ++i) {
    Participant p(service, deck, options, now, report, i);
    p.run();
    ++report.sessions;
    auto session = service.snapshot(p.session_id());
    if (session.done()) ++report.completed;
    check_coverage(session, deck, report);
    for (const auto& e : session.events) report.timeouts += e.advance_kind == AdvanceKind::kTimeout;
    if (options.verify_replay && replay_file(service.log_path(p.session_id()), deck) != session) {
      ++report.replay_mismatches;
      if (report.messages.size() < kMaxMessages) report.messages.push_back(session.session_id + ": replay mismatch");
    }
    report.final_sessions.push_back(std::move(session));
    now += 60'000;
  }
  return report;
}

}  // namespace mnemo
