#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mnemo/error.hpp"

namespace mnemo {

/// One line of a session log. `seq` starts at 0 and has no gaps.
struct LogRecord {
  std::string session_id;
  std::uint64_t seq = 0;
  std::string kind;  // create | consent | advance | response | likert | expire
  nlohmann::json payload = nlohmann::json::object();
  std::int64_t ts_ms = 0;

  bool operator==(const LogRecord&) const = default;
};

nlohmann::json to_json(const LogRecord& record);
LogRecord record_from_json(const nlohmann::json& j);

// A log that cannot be folded back into a session. `offset` is the byte
// offset of the offending line.
class ReplayError : public Error {
 public:
  ReplayError(const std::string& path, std::uint64_t offset, const std::string& what)
      : Error(path + " @" + std::to_string(offset) + ": " + what), offset_(offset) {}
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  std::uint64_t offset_;
};

struct LogContents {
  std::vector<LogRecord> records;
  std::uint64_t valid_bytes = 0;  // prefix ending at the last complete line
  bool torn_tail = false;          // trailing partial line was ignored
};

// Reads a JSON-lines log. A final line without a newline is a torn write and
// is dropped; anything else malformed, or a sequence gap, is a ReplayError.
LogContents read_log(const std::filesystem::path& path);

/// Append-only writer; every append is flushed (and, when durable, synced)
/// before returning.
class EventLog {
 public:
  // Truncates the file to `valid_bytes` first, discarding a torn tail.
  explicit EventLog(std::filesystem::path path, std::uint64_t valid_bytes = 0, bool durable = true);
  ~EventLog();
  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  void append(const LogRecord& record);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  bool durable_ = true;
};

}  // namespace mnemo
