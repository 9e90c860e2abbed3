#pragma once

// Reference implementations written directly from the definitions, kept
// deliberately separate from the library code they check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mnemo/lexicon.hpp"

namespace mnemo::oracle {

// Levenshtein by the textbook recurrence, memoized on suffix positions.
inline std::size_t recursive_levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  std::function<std::size_t(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> std::size_t {
    if (i == a.size()) return b.size() - j;
    if (j == b.size()) return a.size() - i;
    auto& m = memo[i][j];
    if (m >= 0) return static_cast<std::size_t>(m);
    std::size_t best = std::min(d(i + 1, j) + 1, d(i, j + 1) + 1);
    best = std::min(best, d(i + 1, j + 1) + (a[i] == b[j] ? 0 : 1));
    m = static_cast<long>(best);
    return best;
  };
  return d(0, 0);
}

inline double normalized(std::size_t distance, std::size_t la, std::size_t lb) {
  const auto n = std::max(la, lb);
  return n == 0 ? 1.0 : 1.0 - static_cast<double>(distance) / static_cast<double>(n);
}

// Lowercase ASCII only; enough for the toy lexicons used with it.
inline std::u32string ascii_lower(const std::string& s) {
  std::u32string out;
  for (unsigned char c : s) out.push_back(static_cast<char32_t>(c >= 'A' && c <= 'Z' ? c + 32 : c));
  return out;
}

inline double substitution_cost(const std::vector<int>& x, const std::vector<int>& y) {
  int differ = 0;
  for (std::size_t k = 0; k < x.size(); ++k) differ += x[k] != y[k];
  return static_cast<double>(differ) / static_cast<double>(x.size());
}

// Phoneme edit distance by the same recurrence over feature rows.
inline double recursive_phoneme_distance(const std::vector<std::string>& a, const std::vector<std::string>& b,
                                         const FeatureTable& table) {
  std::map<std::pair<std::size_t, std::size_t>, double> memo;
  std::function<double(std::size_t, std::size_t)> d = [&](std::size_t i, std::size_t j) -> double {
    if (i == a.size()) return static_cast<double>(b.size() - j);
    if (j == b.size()) return static_cast<double>(a.size() - i);
    if (auto it = memo.find({i, j}); it != memo.end()) return it->second;
    const double sub = substitution_cost(*table.find(a[i]), *table.find(b[j]));
    const double best = std::min({d(i + 1, j) + 1.0, d(i, j + 1) + 1.0, d(i + 1, j + 1) + sub});
    memo[{i, j}] = best;
    return best;
  };
  return d(0, 0);
}

inline double dot_cosine(const std::vector<double>& x, const std::vector<double>& y) {
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    dot += x[k] * y[k];
    nx += x[k] * x[k];
    ny += y[k] * y[k];
  }
  if (nx == 0 || ny == 0) return 0;
  return dot / std::sqrt(nx * ny);
}

// Welch statistic from the textbook formulas.
struct Welch {
  double t;
  double df;
};

inline Welch welch(const std::vector<double>& a, const std::vector<double>& b) {
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto var = [&](const std::vector<double>& v) {
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
  };
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double va = var(a) / na;
  const double vb = var(b) / nb;
  return {(mean(a) - mean(b)) / std::sqrt(va + vb), (va + vb) * (va + vb) / (va * va / (na - 1) + vb * vb / (nb - 1))};
}

/// Toy keyword lexicon entry for the exhaustive ranking oracle.
struct ToyWord {
  std::string word;
  std::vector<std::string> phonemes;
  std::vector<double> vector;
  double imageability;
};

struct OracleScore {
  std::string keyword;
  double total;
};

// Scores every candidate from the definitions and orders them by total
// (descending), ties by keyword, with a plain selection sort.
inline std::vector<OracleScore> exhaustive_rank(const ToyWord& target_spelling_and_sound,
                                                const std::vector<double>& meaning_vector,
                                                const std::vector<ToyWord>& candidates, const double w[4],
                                                const FeatureTable& table, std::size_t k) {
  const double wsum = w[0] + w[1] + w[2] + w[3];
  const double wn[4] = {w[0] / wsum, w[1] / wsum, w[2] / wsum, w[3] / wsum};
  std::vector<OracleScore> all;
  for (const auto& c : candidates) {
    const auto& tp = target_spelling_and_sound.phonemes;
    const double phon = 1.0 - recursive_phoneme_distance(tp, c.phonemes, table) /
                                  static_cast<double>(std::max(tp.size(), c.phonemes.size()));
    const auto ta = ascii_lower(target_spelling_and_sound.word);
    const auto ca = ascii_lower(c.word);
    const double orth = normalized(recursive_levenshtein(ta, ca), ta.size(), ca.size());
    const double sem = (dot_cosine(c.vector, meaning_vector) + 1.0) / 2.0;
    const double total = wn[0] * phon + wn[1] * orth + wn[2] * c.imageability + wn[3] * sem;
    all.push_back({c.word, total});
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      const bool better = all[j].total > all[best].total ||
                          (all[j].total == all[best].total && all[j].keyword < all[best].keyword);
      if (better) best = j;
    }
    std::swap(all[i], all[best]);
  }
  all.resize(std::min(k, all.size()));
  return all;
}

}  // namespace mnemo::oracle
