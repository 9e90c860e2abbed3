#include "mnemo/service.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

namespace mnemo {
namespace {

using nlohmann::json;

std::string_view kind_name(PhaseKind k) {
  switch (k) {
    case PhaseKind::kConsent: return "consent";
    case PhaseKind::kLearn: return "learn";
    case PhaseKind::kRecognize: return "recognize";
    case PhaseKind::kGenerate: return "generate";
    case PhaseKind::kLikert: return "likert";
    case PhaseKind::kDone: return "done";
  }
  return "?";
}

int status_for(StudyErrorCode code) {
  switch (code) {
    case StudyErrorCode::kInvalidDeck: return 500;
    case StudyErrorCode::kTooEarly: return 425;
    case StudyErrorCode::kInvalidRating:
    case StudyErrorCode::kUnknownWord: return 400;
    case StudyErrorCode::kStaleStep:
    case StudyErrorCode::kWrongPhase:
    case StudyErrorCode::kDuplicateRating:
    case StudyErrorCode::kSessionDone: return 409;
  }
  return 500;
}

ApiError to_api_error(const StudyError& e) {
  return ApiError(status_for(e.code()), std::string(to_string(e.code())), e.what(), e.remaining_ms());
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::optional<std::int64_t> opt_int(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::int64_t>();
}

template <typename T>
T required(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) throw ApiError(400, "bad_request", std::string("missing field '") + key + "'");
  try {
    return body[key].get<T>();
  } catch (const json::exception&) {
    throw ApiError(400, "bad_request", std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
std::optional<T> optional_field(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key) || body[key].is_null()) return std::nullopt;
  try {
    return body[key].get<T>();
  } catch (const json::exception&) {
    throw ApiError(400, "bad_request", std::string("field '") + key + "' has the wrong type");
  }
}

// Applies one logged command to `s`; shared by live commands and replay so
// both follow exactly the same path. Returns the outcome name.
std::string apply_record(StudySession& s, const LogRecord& r, const Deck& deck) {
  const auto& p = r.payload;
  if (r.kind == "consent") {
    accept_consent(s, p.at("step_id").get<std::string>(), r.ts_ms);
    return "consented";
  }
  if (r.kind == "advance") {
    const auto out = advance_learning(s, p.at("step_id").get<std::string>(), opt_int(p, "client_elapsed_ms"),
                                      parse_advance_kind(p.at("kind").get<std::string>()), r.ts_ms);
    return out == AdvanceOutcome::kAdvanced ? "advanced" : "timed_out";
  }
  if (r.kind == "response") {
    const auto out = submit_response(s, p.at("step_id").get<std::string>(), p.at("response").get<std::string>(),
                                     opt_int(p, "client_elapsed_ms"), r.ts_ms);
    switch (out) {
      case SubmitOutcome::kRecorded: return "recorded";
      case SubmitOutcome::kRecordedNearLimit: return "recorded_near_limit";
      case SubmitOutcome::kTimedOut: return "timed_out";
    }
  }
  if (r.kind == "likert") {
    submit_likert(s, deck, p.at("word").get<std::string>(), p.at("rating").get<int>(), r.ts_ms);
    return "rated";
  }
  if (r.kind == "expire") {
    if (!expire(s, r.ts_ms)) throw Error("expire record has no effect at ts " + std::to_string(r.ts_ms));
    return "expired";
  }
  throw Error("unknown record kind '" + r.kind + "'");
}

StudySession session_from_create(const LogRecord& r, const Deck& deck) {
  if (r.kind != "create") throw Error("first record must be 'create'");
  const auto& p = r.payload;
  const auto deck_name = p.at("deck_name").get<std::string>();
  if (deck_name != deck.name) throw Error("session was created for deck '" + deck_name + "'");
  return create_session(deck, parse_condition(p.at("condition").get<std::string>()),
                        p.at("participant_id").get<std::string>(), p.at("seed").get<std::uint64_t>(), r.session_id,
                        r.ts_ms, policy_from_json(p.at("policy")));
}

}  // namespace

std::int64_t system_clock_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

json ApiError::body() const {
  json j{{"error", reason_}, {"message", what()}};
  if (remaining_ms_) j["remaining_ms"] = *remaining_ms_;
  return j;
}

json to_json(const TimingPolicy& p) {
  json j{{"learn_limit_ms", p.learn_limit_ms},
         {"learn_min_advance_ms", p.learn_min_advance_ms},
         {"pronounce_offsets_ms", p.pronounce_offsets_ms},
         {"test_limit_ms", p.test_limit_ms},
         {"grace_ms", p.grace_ms},
         {"likert_limit_ms", nullptr}};
  if (p.likert_limit_ms) j["likert_limit_ms"] = *p.likert_limit_ms;
  return j;
}

TimingPolicy policy_from_json(const json& j) {
  TimingPolicy p;
  p.learn_limit_ms = j.at("learn_limit_ms").get<std::int64_t>();
  p.learn_min_advance_ms = j.at("learn_min_advance_ms").get<std::int64_t>();
  p.pronounce_offsets_ms = j.at("pronounce_offsets_ms").get<std::vector<std::int64_t>>();
  p.test_limit_ms = j.at("test_limit_ms").get<std::int64_t>();
  p.grace_ms = j.at("grace_ms").get<std::int64_t>();
  p.likert_limit_ms = opt_int(j, "likert_limit_ms");
  return p;
}

json to_json(const StepDescriptor& d) {
  json j{{"step_id", d.step_id},
         {"phase", d.phase.id()},
         {"kind", kind_name(d.phase.kind())},
         {"cycle", d.phase.cycle()},
         {"cursor", d.cursor},
         {"total", d.total}};
  auto put = [&j](const char* key, const auto& v) {
    if (v) j[key] = *v;
  };
  put("word", d.word);
  put("meaning", d.meaning);
  put("keyword", d.keyword);
  put("verbal_cue", d.verbal_cue);
  put("image_ref", d.image_ref);
  put("audio_ref", d.audio_ref);
  put("instruction", d.instruction_text);
  put("prompt_label", d.prompt_label);
  put("note", d.note);
  put("limit_ms", d.limit_ms);
  put("remaining_ms", d.remaining_ms);
  put("advance_enabled_in_ms", d.advance_enabled_in_ms);
  if (!d.audio_offsets_ms.empty()) j["audio_offsets_ms"] = d.audio_offsets_ms;
  if (d.phase.kind() == PhaseKind::kLikert) {
    json items = json::array();
    for (const auto& it : d.likert_items) {
      json item{{"word", it.word}, {"meaning", it.l1_meaning}};
      if (it.keyword) item["keyword"] = *it.keyword;
      if (it.verbal_cue) item["verbal_cue"] = *it.verbal_cue;
      if (it.image_ref) item["image_ref"] = *it.image_ref;
      item["rating"] = it.rating ? json(*it.rating) : json(nullptr);
      items.push_back(std::move(item));
    }
    j["likert_items"] = std::move(items);
  }
  return j;
}

json to_json(const TrialEvent& e) {
  json j{{"word", e.word},
         {"phase", e.phase.id()},
         {"shown_at_ms", e.shown_at_ms},
         {"answered_at_ms", e.answered_at_ms},
         {"duration_ms", e.duration_ms()},
         {"advance_kind", to_string(e.advance_kind)},
         {"near_limit", e.near_limit},
         {"response", e.response ? json(*e.response) : json(nullptr)}};
  if (e.client_elapsed_ms) j["client_elapsed_ms"] = *e.client_elapsed_ms;
  return j;
}

StudySession replay_log(const std::vector<LogRecord>& records, const Deck& deck) {
  if (records.empty()) throw Error("empty session log");
  StudySession s = session_from_create(records.front(), deck);
  for (std::size_t i = 1; i < records.size(); ++i) {
    try {
      apply_record(s, records[i], deck);
    } catch (const StudyError& e) {
      throw Error("record " + std::to_string(i) + " (" + records[i].kind + ") rejected on replay: " + e.what());
    } catch (const nlohmann::json::exception& e) {
      throw Error("record " + std::to_string(i) + " has a malformed payload: " + e.what());
    }
  }
  return s;
}

StudySession replay_file(const std::filesystem::path& path, const Deck& deck) {
  const auto contents = read_log(path);
  try {
    return replay_log(contents.records, deck);
  } catch (const ReplayError&) {
    throw;
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::vector<StudySession> load_sessions(const std::filesystem::path& dir, const Deck& deck) {
  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(dir)) {
    if (f.is_regular_file() && f.path().extension() == ".log") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<StudySession> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(replay_file(f, deck));
  return out;
}

struct StudyService::Entry {
  std::mutex mutex;
  StudySession session;
  std::unique_ptr<EventLog> log;
  std::uint64_t next_seq = 0;
};

StudyService::StudyService(Deck deck, ServiceOptions options, Clock clock)
    : deck_(std::move(deck)), options_(std::move(options)), clock_(std::move(clock)) {
  validate_deck(deck_);
  options_.policy.validate();
  std::filesystem::create_directories(options_.sessions_dir);
  std::vector<std::filesystem::path> files;
  for (const auto& f : std::filesystem::directory_iterator(options_.sessions_dir)) {
    if (f.is_regular_file() && f.path().extension() == ".log") files.push_back(f.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto contents = read_log(f);
    if (contents.records.empty()) continue;
    auto entry = std::make_shared<Entry>();
    try {
      entry->session = replay_log(contents.records, deck_);
    } catch (const Error& e) {
      throw Error(f.string() + ": " + e.what());
    }
    entry->next_seq = contents.records.size();
    entry->log = std::make_unique<EventLog>(f, contents.valid_bytes, options_.durable);
    sessions_.emplace(entry->session.session_id, std::move(entry));
  }
  counter_ = sessions_.size();
}

StudyService::~StudyService() = default;

std::shared_ptr<StudyService::Entry> StudyService::find(const std::string& session_id) {
  std::lock_guard lock(mutex_);
  const auto it = sessions_.find(session_id);
  if (it == sessions_.end()) throw ApiError(404, "unknown_session", "no session '" + session_id + "'");
  return it->second;
}

json StudyService::create_session(const json& body) {
  if (!body.is_object()) throw ApiError(400, "bad_request", "body must be a JSON object");
  const auto now = clock_();
  auto entry = std::make_shared<Entry>();
  LogRecord rec;
  {
    std::lock_guard lock(mutex_);
    std::string id;
    std::uint64_t n = counter_;
    do {
      char buf[32];
      std::snprintf(buf, sizeof buf, "s%06llu", static_cast<unsigned long long>(n + 1));
      id = buf;
      ++n;
    } while (sessions_.contains(id) || std::filesystem::exists(options_.sessions_dir / (id + ".log")));

    ConditionId cond = kAllConditions[counter_ % kAllConditions.size()];
    if (auto c = optional_field<std::string>(body, "condition")) {
      try {
        cond = parse_condition(*c);
      } catch (const Error& e) {
        throw ApiError(400, "bad_request", e.what());
      }
    }
    const auto seed = optional_field<std::uint64_t>(body, "seed").value_or(splitmix64(options_.seed ^ n));
    const auto participant = optional_field<std::string>(body, "participant_id").value_or(id);

    rec.session_id = id;
    rec.seq = 0;
    rec.kind = "create";
    rec.ts_ms = now;
    rec.payload = {{"participant_id", participant},
                   {"condition", to_string(cond)},
                   {"seed", seed},
                   {"deck_name", deck_.name},
                   {"policy", to_json(options_.policy)}};
    try {
      entry->session = session_from_create(rec, deck_);
    } catch (const StudyError& e) {
      throw to_api_error(e);
    }
    entry->log = std::make_unique<EventLog>(options_.sessions_dir / (id + ".log"), 0, options_.durable);
    entry->log->append(rec);
    entry->next_seq = 1;
    sessions_.emplace(id, entry);
    ++counter_;
  }
  std::lock_guard lock(entry->mutex);
  return {{"session_id", rec.session_id},
          {"participant_id", entry->session.participant_id},
          {"condition", to_string(entry->session.condition)},
          {"step", step_locked(*entry, now)}};
}

void StudyService::expire_locked(Entry& entry, std::int64_t now) {
  auto copy = entry.session;
  if (!expire(copy, now)) return;
  LogRecord rec{copy.session_id, entry.next_seq, "expire", json::object(), now};
  entry.log->append(rec);
  ++entry.next_seq;
  entry.session = std::move(copy);
}

json StudyService::step_locked(const Entry& entry, std::int64_t now) const {
  if (entry.session.done()) return {{"step_id", entry.session.step_id()}, {"phase", "done"}, {"kind", "done"}, {"done", true}};
  auto j = to_json(current_step(entry.session, deck_, now));
  j["done"] = false;
  return j;
}

json StudyService::step(const std::string& session_id) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const auto now = clock_();
  expire_locked(*entry, now);
  return step_locked(*entry, now);
}

template <typename Op>
json StudyService::command(const std::string& session_id, Op build) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const auto now = clock_();
  auto [kind, payload] = build(entry->session);
  LogRecord rec{session_id, entry->next_seq, std::move(kind), std::move(payload), now};
  auto copy = entry->session;
  std::string outcome;
  try {
    outcome = apply_record(copy, rec, deck_);
  } catch (const StudyError& e) {
    throw to_api_error(e);
  }
  entry->log->append(rec);
  ++entry->next_seq;
  entry->session = std::move(copy);
  return {{"outcome", outcome}, {"step", step_locked(*entry, now)}};
}

json StudyService::advance(const std::string& session_id, const json& body) {
  const auto step_id = required<std::string>(body, "step_id");
  const auto kind = optional_field<std::string>(body, "kind").value_or("manual");
  if (kind != "manual" && kind != "timeout") throw ApiError(400, "bad_request", "kind must be 'manual' or 'timeout'");
  const auto elapsed = optional_field<std::int64_t>(body, "client_elapsed_ms");
  return command(session_id, [&](const StudySession& s) {
    json payload{{"step_id", step_id}};
    // On the consent step, advancing means accepting.
    if (s.phase.kind() == PhaseKind::kConsent) return std::pair{std::string("consent"), payload};
    payload["kind"] = kind;
    if (elapsed) payload["client_elapsed_ms"] = *elapsed;
    return std::pair{std::string("advance"), payload};
  });
}

json StudyService::submit(const std::string& session_id, const json& body) {
  json payload{{"step_id", required<std::string>(body, "step_id")}, {"response", required<std::string>(body, "response")}};
  if (auto c = optional_field<std::int64_t>(body, "client_elapsed_ms")) payload["client_elapsed_ms"] = *c;
  return command(session_id, [&](const StudySession&) { return std::pair{std::string("response"), payload}; });
}

json StudyService::likert(const std::string& session_id, const json& body) {
  json payload{{"word", required<std::string>(body, "word")}, {"rating", required<int>(body, "rating")}};
  return command(session_id, [&](const StudySession&) { return std::pair{std::string("likert"), payload}; });
}

json StudyService::summary(const std::string& session_id) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  const auto& s = entry->session;
  json events = json::array();
  for (const auto& e : s.events) events.push_back(to_json(e));
  json likert = json::object();
  for (const auto& [w, r] : s.likert) likert[w] = r;
  return {{"session_id", s.session_id},
          {"participant_id", s.participant_id},
          {"condition", to_string(s.condition)},
          {"deck_name", s.deck_name},
          {"seed", s.rng_seed},
          {"phase", s.phase.id()},
          {"step_id", s.step_id()},
          {"done", s.done()},
          {"created_at_ms", s.created_at_ms},
          {"events", std::move(events)},
          {"likert", std::move(likert)}};
}

json StudyService::deck_meta() const {
  json sets = json::array();
  for (std::size_t i = 0; i < kSetCount; ++i) sets.push_back(deck_.set(i).size());
  json conds = json::array();
  for (auto c : kAllConditions) {
    const auto& cond = condition(c);
    conds.push_back({{"id", to_string(c)},
                     {"show_keyword", cond.show_keyword},
                     {"show_verbal", cond.show_verbal},
                     {"show_visual", cond.show_visual},
                     {"instruction", cond.instruction_text}});
  }
  return {{"name", deck_.name},
          {"size", deck_.entries.size()},
          {"set_sizes", std::move(sets)},
          {"conditions", std::move(conds)},
          {"policy", to_json(options_.policy)}};
}

StudySession StudyService::snapshot(const std::string& session_id) {
  auto entry = find(session_id);
  std::lock_guard lock(entry->mutex);
  return entry->session;
}

std::vector<std::string> StudyService::session_ids() {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, e] : sessions_) ids.push_back(id);
  return ids;
}

const std::filesystem::path& StudyService::log_path(const std::string& session_id) {
  return find(session_id)->log->path();
}

}  // namespace mnemo
