#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnemo/deck.hpp"
#include "mnemo/event_log.hpp"
#include "mnemo/study.hpp"

namespace mnemo {

using Clock = std::function<std::int64_t()>;  // milliseconds

// Wall clock in milliseconds since the epoch.
std::int64_t system_clock_ms();

/// A request the API rejects. `reason` is a stable machine-readable code.
class ApiError : public Error {
 public:
  ApiError(int status, std::string reason, const std::string& what, std::optional<std::int64_t> remaining_ms = {})
      : Error(what), status_(status), reason_(std::move(reason)), remaining_ms_(remaining_ms) {}
  int status() const noexcept { return status_; }
  const std::string& reason() const noexcept { return reason_; }
  std::optional<std::int64_t> remaining_ms() const noexcept { return remaining_ms_; }
  nlohmann::json body() const;

 private:
  int status_;
  std::string reason_;
  std::optional<std::int64_t> remaining_ms_;
};

nlohmann::json to_json(const TimingPolicy& policy);
TimingPolicy policy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const StepDescriptor& step);
nlohmann::json to_json(const TrialEvent& event);

// Folds a session log back into the session it records. Records are
// re-applied through the same study operations at their logged timestamps.
StudySession replay_log(const std::vector<LogRecord>& records, const Deck& deck);
StudySession replay_file(const std::filesystem::path& path, const Deck& deck);

// Replays every *.log under `dir`, sorted by file name.
std::vector<StudySession> load_sessions(const std::filesystem::path& dir, const Deck& deck);

struct ServiceOptions {
  std::filesystem::path sessions_dir = "sessions";
  TimingPolicy policy;
  std::uint64_t seed = 0;  // mixed into per-session seeds
  bool durable = true;     // fsync each log append
};

/// The study backend behind the HTTP API. Every accepted command is written
/// to the session's log before it is applied and acknowledged; a restart
/// rebuilds all sessions from their logs.
class StudyService {
 public:
  StudyService(Deck deck, ServiceOptions options, Clock clock = system_clock_ms);
  ~StudyService();

  // body: {participant_id?, condition?, seed?}
  nlohmann::json create_session(const nlohmann::json& body);
  nlohmann::json step(const std::string& session_id);
  // body: {step_id, kind?: "manual"|"timeout", client_elapsed_ms?}
  nlohmann::json advance(const std::string& session_id, const nlohmann::json& body);
  // body: {step_id, response, client_elapsed_ms?}
  nlohmann::json submit(const std::string& session_id, const nlohmann::json& body);
  // body: {word, rating}
  nlohmann::json likert(const std::string& session_id, const nlohmann::json& body);
  nlohmann::json summary(const std::string& session_id);
  nlohmann::json deck_meta() const;

  StudySession snapshot(const std::string& session_id);
  std::vector<std::string> session_ids();
  const Deck& deck() const { return deck_; }
  const std::filesystem::path& log_path(const std::string& session_id);

 private:
  struct Entry;

  std::shared_ptr<Entry> find(const std::string& session_id);
  // `build` maps the current session to a (kind, payload) record, which is
  // applied to a copy, logged, and only then committed.
  template <typename Op>
  nlohmann::json command(const std::string& session_id, Op build);
  void expire_locked(Entry& entry, std::int64_t now);
  nlohmann::json step_locked(const Entry& entry, std::int64_t now) const;

  Deck deck_;
  ServiceOptions options_;
  Clock clock_;
  std::mutex mutex_;  // guards sessions_ and counter_
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t counter_ = 0;
};

}  // namespace mnemo
