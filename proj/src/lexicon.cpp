#include "mnemo/lexicon.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mnemo/error.hpp"
#include "mnemo/text.hpp"

namespace mnemo {
namespace {

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path.string(), 0, "cannot open file");
  return in;
}

bool parse_double(std::string_view text, double& out) {
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> parts;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) parts.push_back(line.substr(i, j - i));
    i = j;
  }
  return parts;
}

bool skip_line(std::string_view line) {
  const auto t = trim(line);
  return t.empty() || t.front() == '#';
}

// "key<TAB>value" with both halves trimmed.
bool split_tab(std::string_view line, std::string& key, std::string& value) {
  const auto tab = line.find('\t');
  if (tab == std::string_view::npos) return false;
  key = trim(line.substr(0, tab));
  value = trim(line.substr(tab + 1));
  return !key.empty() && !value.empty();
}

}  // namespace

EmbeddingStore::EmbeddingStore(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw ContractError("embedding dimension must be positive");
}

void EmbeddingStore::insert(std::string_view token, std::vector<double> vector) {
  if (vector.size() != dimension_) {
    throw ContractError("vector for '" + std::string(token) + "' has " +
                        std::to_string(vector.size()) + " components, expected " +
                        std::to_string(dimension_));
  }
  for (double v : vector) {
    if (!std::isfinite(v)) throw ContractError("non-finite component for '" + std::string(token) + "'");
  }
  vectors_[to_lower(token)] = std::move(vector);
}

const std::vector<double>* EmbeddingStore::find(std::string_view token) const {
  auto it = vectors_.find(to_lower(token));
  return it == vectors_.end() ? nullptr : &it->second;
}

EmbeddingStore load_word_vectors(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  const auto name = path.string();
  std::string line;
  if (!std::getline(in, line)) throw LoadError(name, 1, "empty file");

  const auto header = split_ws(line);
  double count_d = 0;
  double dim_d = 0;
  if (header.size() != 2 || !parse_double(header[0], count_d) || !parse_double(header[1], dim_d) ||
      count_d < 0 || dim_d < 1 || count_d != std::floor(count_d) || dim_d != std::floor(dim_d)) {
    throw LoadError(name, 1, "header must be 'count dimension'");
  }
  const auto count = static_cast<std::size_t>(count_d);
  const auto dim = static_cast<std::size_t>(dim_d);

  EmbeddingStore store(dim);
  std::size_t line_no = 1;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto parts = split_ws(line);
    if (parts.empty()) continue;
    if (parts.size() != dim + 1) {
      throw LoadError(name, line_no,
                      "expected token and " + std::to_string(dim) + " values, got " +
                          std::to_string(parts.size() - 1));
    }
    std::vector<double> vec(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      if (!parse_double(parts[k + 1], vec[k])) {
        throw LoadError(name, line_no, "malformed value '" + std::string(parts[k + 1]) + "'");
      }
    }
    store.insert(parts[0], std::move(vec));
    ++rows;
  }
  if (rows != count) {
    throw LoadError(name, line_no,
                    "header declares " + std::to_string(count) + " rows, found " + std::to_string(rows));
  }
  return store;
}

std::vector<double> embed_phrase(const EmbeddingStore& store, std::string_view phrase) {
  const auto tokens = tokenize(phrase);
  if (tokens.empty()) throw ContractError("cannot embed an empty phrase");
  std::vector<double> sum(store.dimension(), 0.0);
  std::size_t known = 0;
  for (const auto& tok : tokens) {
    if (const auto* vec = store.find(tok)) {
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += (*vec)[k];
      ++known;
    }
  }
  if (known == 0) throw OutOfVocabularyError(tokens);
  if (known > 1) {
    for (auto& v : sum) v /= static_cast<double>(known);
  }
  return sum;
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ContractError("cosine: dimension mismatch");
  double dot = 0;
  double na = 0;
  double nb = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0 || nb == 0) return 0.0;
  // sqrt(x * x) == x exactly, so identical vectors give exactly 1.
  const double c = dot / std::sqrt(na * nb);
  return std::clamp(c, -1.0, 1.0);
}

void FeatureTable::insert(std::string symbol, std::vector<int> features) {
  if (features.empty()) throw ContractError("empty feature vector for '" + symbol + "'");
  if (width_ == 0) width_ = features.size();
  if (features.size() != width_) {
    throw ContractError("feature vector for '" + symbol + "' has width " +
                        std::to_string(features.size()) + ", expected " + std::to_string(width_));
  }
  features_[std::move(symbol)] = std::move(features);
}

const std::vector<int>* FeatureTable::find(std::string_view symbol) const {
  auto it = features_.find(symbol);
  return it == features_.end() ? nullptr : &it->second;
}

FeatureTable load_feature_table(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  FeatureTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::string symbol;
    std::string values;
    if (!split_tab(line, symbol, values)) throw LoadError(path.string(), line_no, "expected symbol<TAB>features");
    std::vector<int> features;
    std::stringstream ss(values);
    std::string field;
    while (std::getline(ss, field, ',')) {
      const auto f = trim(field);
      int v = 0;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw LoadError(path.string(), line_no, "malformed feature '" + f + "'");
      }
      features.push_back(v);
    }
    try {
      table.insert(symbol, std::move(features));
    } catch (const ContractError& e) {
      throw LoadError(path.string(), line_no, e.what());
    }
  }
  if (table.size() == 0) throw LoadError(path.string(), 0, "empty feature table");
  return table;
}

PhonemeSequence parse_phonemes(std::string_view text) {
  PhonemeSequence seq;
  for (auto part : split_ws(text)) seq.symbols.emplace_back(part);
  if (seq.symbols.empty()) throw ContractError("empty phoneme sequence");
  return seq;
}

void PronunciationDict::insert(std::string_view word, PhonemeSequence phonemes, const FeatureTable& table) {
  if (phonemes.symbols.empty()) throw ContractError("empty pronunciation for '" + std::string(word) + "'");
  for (const auto& s : phonemes.symbols) {
    if (!table.find(s)) throw ContractError("unknown phoneme '" + s + "' in '" + std::string(word) + "'");
  }
  entries_[to_lower(word)] = std::move(phonemes);
}

const PhonemeSequence* PronunciationDict::find(std::string_view word) const {
  auto it = entries_.find(to_lower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

PronunciationDict load_pronunciations(const std::filesystem::path& path, const FeatureTable& table) {
  auto in = open_or_throw(path);
  PronunciationDict dict;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::string word;
    std::string phones;
    if (!split_tab(line, word, phones)) throw LoadError(path.string(), line_no, "expected word<TAB>phonemes");
    try {
      dict.insert(word, parse_phonemes(phones), table);
    } catch (const ContractError& e) {
      throw LoadError(path.string(), line_no, e.what());
    }
  }
  return dict;
}

ImageabilityTable::ImageabilityTable(double default_rating) : default_rating_(default_rating) {
  if (!(default_rating >= 0.0 && default_rating <= 1.0)) {
    throw ContractError("default imageability must lie in [0,1]");
  }
}

void ImageabilityTable::insert(std::string_view word, double rating) {
  if (!(rating >= 0.0 && rating <= 1.0)) {
    throw ContractError("imageability for '" + std::string(word) + "' outside [0,1]");
  }
  ratings_[to_lower(word)] = rating;
}

double ImageabilityTable::rating(std::string_view word) const {
  auto it = ratings_.find(to_lower(word));
  return it == ratings_.end() ? default_rating_ : it->second;
}

bool ImageabilityTable::contains(std::string_view word) const {
  return ratings_.find(to_lower(word)) != ratings_.end();
}

ImageabilityTable load_imageability(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  ImageabilityTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    std::string word;
    std::string value;
    double rating = 0;
    if (!split_tab(line, word, value) || !parse_double(value, rating)) {
      throw LoadError(path.string(), line_no, "expected word<TAB>rating");
    }
    try {
      table.insert(word, rating);
    } catch (const ContractError& e) {
      throw LoadError(path.string(), line_no, e.what());
    }
  }
  return table;
}

}  // namespace mnemo
