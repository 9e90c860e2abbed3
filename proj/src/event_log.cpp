#include "mnemo/event_log.hpp"

#include <unistd.h>

#include <fstream>
#include <sstream>

namespace mnemo {

nlohmann::json to_json(const LogRecord& r) {
  nlohmann::json j;
  j["session_id"] = r.session_id;
  j["seq"] = r.seq;
  j["kind"] = r.kind;
  j["payload"] = r.payload;
  j["ts_ms"] = r.ts_ms;
  return j;
}

LogRecord record_from_json(const nlohmann::json& j) {
  LogRecord r;
  r.session_id = j.at("session_id").get<std::string>();
  r.seq = j.at("seq").get<std::uint64_t>();
  r.kind = j.at("kind").get<std::string>();
  r.payload = j.at("payload");
  r.ts_ms = j.at("ts_ms").get<std::int64_t>();
  return r;
}

LogContents read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), 0, "cannot open log");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  LogContents out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) {
      out.torn_tail = true;
      break;
    }
    const std::string_view line(text.data() + pos, nl - pos);
    LogRecord rec;
    try {
      rec = record_from_json(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw ReplayError(path.string(), pos, std::string("corrupt record: ") + e.what());
    }
    if (rec.seq != out.records.size()) {
      throw ReplayError(path.string(), pos,
                        "sequence gap: expected " + std::to_string(out.records.size()) + ", got " +
                            std::to_string(rec.seq));
    }
    if (!out.records.empty() && rec.session_id != out.records.front().session_id) {
      throw ReplayError(path.string(), pos, "record belongs to session " + rec.session_id);
    }
    out.records.push_back(std::move(rec));
    pos = nl + 1;
    out.valid_bytes = pos;
  }
  return out;
}

EventLog::EventLog(std::filesystem::path path, std::uint64_t valid_bytes, bool durable)
    : path_(std::move(path)), durable_(durable) {
  if (std::filesystem::exists(path_) && std::filesystem::file_size(path_) != valid_bytes) {
    std::filesystem::resize_file(path_, valid_bytes);
  }
  file_ = std::fopen(path_.c_str(), "ab");
  if (!file_) throw Error("cannot open log for append: " + path_.string());
}

EventLog::~EventLog() {
  if (file_) std::fclose(file_);
}

void EventLog::append(const LogRecord& record) {
  const std::string line = to_json(record).dump() + "\n";
  if (std::fwrite(line.data(), 1, line.size(), file_) != line.size() || std::fflush(file_) != 0) {
    throw Error("log write failed: " + path_.string());
  }
  if (durable_) ::fsync(::fileno(file_));
}

}  // namespace mnemo
