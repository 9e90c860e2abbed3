#include "mnemo/deck.hpp"

#include <array>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string required_string(const nlohmann::json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw DeckError("entry " + std::to_string(index) + ": missing required field '" + key + "'");
  }
  return it->get<std::string>();
}

std::optional<std::string> optional_string(const nlohmann::json& obj, const char* key, std::size_t index) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw DeckError("entry " + std::to_string(index) + ": '" + key + "' must be a string");
  return it->get<std::string>();
}

}  // namespace

const WordEntry* Deck::find(std::string_view l2_word) const {
  for (const auto& e : entries) {
    if (e.l2_word == l2_word) return &e;
  }
  return nullptr;
}

std::vector<const WordEntry*> Deck::set(int set_index) const {
  std::vector<const WordEntry*> out;
  for (const auto& e : entries) {
    if (e.set_index == set_index) out.push_back(&e);
  }
  return out;
}

void validate_deck(const Deck& deck) {
  if (deck.entries.empty()) throw DeckError("deck '" + deck.name + "' has no entries");
  std::set<std::string> seen;
  std::array<std::size_t, kSetCount> sizes{};
  for (std::size_t i = 0; i < deck.entries.size(); ++i) {
    const auto& e = deck.entries[i];
    const auto where = "entry " + std::to_string(i) + " (" + e.l2_word + ")";
    if (trim(e.l2_word).empty()) throw DeckError("entry " + std::to_string(i) + ": empty l2_word");
    if (trim(e.l1_meaning).empty()) throw DeckError(where + ": empty l1_meaning");
    if (!e.auto_verbal_cue.empty() && !starts_with_token(e.auto_verbal_cue, "Imagine")) {
      throw DeckError(where + ": auto_verbal_cue must start with \"Imagine\"");
    }
    if (e.set_index < 0 || e.set_index >= kSetCount) {
      throw DeckError(where + ": set_index must be 0, 1 or 2");
    }
    if (!seen.insert(e.l2_word).second) throw DeckError(where + ": duplicate l2_word");
    ++sizes[static_cast<std::size_t>(e.set_index)];
  }
  if (sizes[0] != sizes[1] || sizes[1] != sizes[2]) {
    throw DeckError("set sizes unequal: " + std::to_string(sizes[0]) + ", " + std::to_string(sizes[1]) +
                    ", " + std::to_string(sizes[2]));
  }
}

Deck deck_from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DeckError(std::string("deck is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DeckError("deck must be a JSON object");
  Deck deck;
  if (!doc.contains("name") || !doc["name"].is_string()) throw DeckError("missing required field 'name'");
  deck.name = doc["name"].get<std::string>();
  if (!doc.contains("entries") || !doc["entries"].is_array()) {
    throw DeckError("missing required field 'entries'");
  }
  std::size_t index = 0;
  for (const auto& item : doc["entries"]) {
    if (!item.is_object()) throw DeckError("entry " + std::to_string(index) + " is not an object");
    WordEntry e;
    e.l2_word = required_string(item, "l2_word", index);
    e.l1_meaning = required_string(item, "l1_meaning", index);
    e.auto_keyword = required_string(item, "auto_keyword", index);
    e.manual_keyword = required_string(item, "manual_keyword", index);
    e.auto_verbal_cue = required_string(item, "auto_verbal_cue", index);
    e.manual_verbal_cue = required_string(item, "manual_verbal_cue", index);
    e.image_ref = optional_string(item, "image_ref", index);
    e.audio_ref = optional_string(item, "audio_ref", index);
    auto set_it = item.find("set_index");
    if (set_it == item.end() || !set_it->is_number_integer()) {
      throw DeckError("entry " + std::to_string(index) + ": missing required field 'set_index'");
    }
    e.set_index = set_it->get<int>();
    deck.entries.push_back(std::move(e));
    ++index;
  }
  validate_deck(deck);
  return deck;
}

std::string deck_to_json(const Deck& deck) {
  ordered_json doc;
  doc["name"] = deck.name;
  doc["entries"] = ordered_json::array();
  for (const auto& e : deck.entries) {
    ordered_json item;
    item["l2_word"] = e.l2_word;
    item["l1_meaning"] = e.l1_meaning;
    item["auto_keyword"] = e.auto_keyword;
    item["manual_keyword"] = e.manual_keyword;
    item["auto_verbal_cue"] = e.auto_verbal_cue;
    item["manual_verbal_cue"] = e.manual_verbal_cue;
    item["image_ref"] = e.image_ref ? ordered_json(*e.image_ref) : ordered_json(nullptr);
    item["audio_ref"] = e.audio_ref ? ordered_json(*e.audio_ref) : ordered_json(nullptr);
    item["set_index"] = e.set_index;
    doc["entries"].push_back(std::move(item));
  }
  return doc.dump(2) + "\n";
}

Deck load_deck(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path.string(), 0, "cannot open deck");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return deck_from_json(buf.str());
  } catch (const DeckError& e) {
    throw DeckError(path.string() + ": " + e.what());
  }
}

void save_deck(const Deck& deck, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write deck to " + path.string());
  out << deck_to_json(deck);
  if (!out) throw Error("failed writing deck to " + path.string());
}

}  // namespace mnemo
