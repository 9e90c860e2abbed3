#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mnemo/deck.hpp"
#include "mnemo/lexicon.hpp"
#include "mnemo/scoring.hpp"

namespace mnemo {

enum class Task { kRecognition, kGeneration };

std::string_view to_string(Task task);  // "recog" | "gen"
Task parse_task(std::string_view text);

/// One row of the response CSV:
/// participant_id,word,task,response,latency_ms
struct ResponseRow {
  std::string participant_id;
  std::string word;  // l2 word identifying the deck entry
  Task task = Task::kRecognition;
  std::string response;
  std::int64_t latency_ms = 0;

  bool operator==(const ResponseRow&) const = default;
};

inline constexpr std::string_view kResponseHeader = "participant_id,word,task,response,latency_ms";

std::vector<ResponseRow> read_responses(const std::filesystem::path& path);
void write_responses(std::ostream& out, const std::vector<ResponseRow>& rows);

struct ScoredRow {
  ResponseRow row;
  ScoredResponse scored;
};

// Scores each row against its deck entry. Throws DeckError for a word that
// is not in the deck.
std::vector<ScoredRow> score_responses(const Deck& deck, const EmbeddingStore& store,
                                       const std::vector<ResponseRow>& rows);

// Response columns plus normalized_response,score,flag (ok|missing|oov).
void write_scored(std::ostream& out, const std::vector<ScoredRow>& rows);

}  // namespace mnemo
