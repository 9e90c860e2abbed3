#include "mnemo/responses.hpp"

#include <charconv>
#include <ostream>

#include "mnemo/csv.hpp"
#include "mnemo/error.hpp"

namespace mnemo {

std::string_view to_string(Task task) { return task == Task::kRecognition ? "recog" : "gen"; }

Task parse_task(std::string_view text) {
  if (text == "recog") return Task::kRecognition;
  if (text == "gen") return Task::kGeneration;
  throw ContractError("task must be 'recog' or 'gen', got '" + std::string(text) + "'");
}

std::vector<ResponseRow> read_responses(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) throw LoadError(path.string(), 0, "empty response file");
  std::vector<ResponseRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 5) throw LoadError(path.string(), i + 1, "expected 5 columns");
    ResponseRow row;
    row.participant_id = r[0];
    row.word = r[1];
    try {
      row.task = parse_task(r[2]);
    } catch (const ContractError& e) {
      throw LoadError(path.string(), i + 1, e.what());
    }
    row.response = r[3];
    auto [ptr, ec] = std::from_chars(r[4].data(), r[4].data() + r[4].size(), row.latency_ms);
    if (ec != std::errc() || ptr != r[4].data() + r[4].size()) {
      throw LoadError(path.string(), i + 1, "malformed latency_ms '" + r[4] + "'");
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_responses(std::ostream& out, const std::vector<ResponseRow>& rows) {
  out << kResponseHeader << '\n';
  for (const auto& r : rows) {
    write_csv_row(out, {r.participant_id, r.word, std::string(to_string(r.task)), r.response,
                        std::to_string(r.latency_ms)});
  }
}

std::vector<ScoredRow> score_responses(const Deck& deck, const EmbeddingStore& store,
                                       const std::vector<ResponseRow>& rows) {
  std::vector<ScoredRow> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    const auto* entry = deck.find(r.word);
    if (!entry) throw DeckError("response for unknown word '" + r.word + "'");
    ScoredRow s{r, r.task == Task::kRecognition ? recognition_score(store, entry->l1_meaning, r.response)
                                                : generation_score(entry->l2_word, r.response)};
    out.push_back(std::move(s));
  }
  return out;
}

void write_scored(std::ostream& out, const std::vector<ScoredRow>& rows) {
  out << kResponseHeader << ",normalized_response,score,flag\n";
  for (const auto& s : rows) {
    const auto flag = s.scored.missing ? "missing" : s.scored.out_of_vocabulary ? "oov" : "ok";
    write_csv_row(out, {s.row.participant_id, s.row.word, std::string(to_string(s.row.task)), s.row.response,
                        std::to_string(s.row.latency_ms), s.scored.normalized_response,
                        format_double(s.scored.score), flag});
  }
}

}  // namespace mnemo
