#include "mnemo/text.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace mnemo {
namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_space(char32_t c) {
  return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
         c == 0x00A0;
}

bool is_ascii_punct(char32_t c) {
  return c < 0x80 && std::ispunct(static_cast<unsigned char>(c));
}

char32_t lower_cp(char32_t c) {
  if (c >= U'A' && c <= U'Z') return c + (U'a' - U'A');
  switch (c) {
    case 0x00C4: return 0x00E4;  // Ä
    case 0x00D6: return 0x00F6;  // Ö
    case 0x00DC: return 0x00FC;  // Ü
    case 0x1E9E: return 0x00DF;  // ẞ
    default: return c;
  }
}

}  // namespace

std::u32string utf8_decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    if (i + len > text.size()) {
      out.push_back(kReplacement);
      break;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cont = static_cast<unsigned char>(text[i + k]);
      if ((cont & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3F);
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string utf8_encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : text) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

std::string to_lower(std::string_view text) {
  auto cps = utf8_decode(text);
  std::transform(cps.begin(), cps.end(), cps.begin(), lower_cp);
  return utf8_encode(cps);
}

std::string transliterate_umlauts(std::string_view text) {
  std::u32string out;
  for (char32_t cp : utf8_decode(text)) {
    switch (cp) {
      case 0x00E4: case 0x00C4: out.push_back(U'a'); break;
      case 0x00F6: case 0x00D6: out.push_back(U'o'); break;
      case 0x00FC: case 0x00DC: out.push_back(U'u'); break;
      case 0x00DF: case 0x1E9E: out.push_back(U's'); break;
      default: out.push_back(cp);
    }
  }
  return utf8_encode(out);
}

std::string trim(std::string_view text) {
  auto cps = utf8_decode(text);
  auto first = std::find_if_not(cps.begin(), cps.end(), is_space);
  auto last = std::find_if_not(cps.rbegin(), cps.rend(), is_space).base();
  if (first >= last) return {};
  return utf8_encode(std::u32string_view(&*first, static_cast<std::size_t>(last - first)));
}

std::string strip_punctuation(std::string_view token) {
  std::size_t first = 0;
  std::size_t last = token.size();
  while (first < last && is_ascii_punct(static_cast<unsigned char>(token[first]))) ++first;
  while (last > first && is_ascii_punct(static_cast<unsigned char>(token[last - 1]))) --last;
  return std::string(token.substr(first, last - first));
}

std::vector<std::string> tokenize(std::string_view phrase) {
  std::vector<std::string> tokens;
  const auto cps = utf8_decode(phrase);
  std::u32string current;
  auto flush = [&] {
    if (current.empty()) return;
    auto tok = strip_punctuation(to_lower(utf8_encode(current)));
    if (!tok.empty()) tokens.push_back(std::move(tok));
    current.clear();
  };
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      flush();
    } else {
      current.push_back(cp);
    }
  }
  flush();
  return tokens;
}

bool starts_with_token(std::string_view text, std::string_view token) {
  if (text.size() < token.size() || text.substr(0, token.size()) != token) return false;
  if (text.size() == token.size()) return true;
  const auto next = static_cast<unsigned char>(text[token.size()]);
  return !std::isalnum(next) && next < 0x80;
}

bool contains_ci(std::string_view haystack, std::string_view needle) {
  return to_lower(haystack).find(to_lower(needle)) != std::string::npos;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

double normalized_levenshtein(std::string_view a, std::string_view b) {
  const auto ua = utf8_decode(a);
  const auto ub = utf8_decode(b);
  const std::size_t longest = std::max(ua.size(), ub.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ua, ub)) / static_cast<double>(longest);
}

}  // namespace mnemo
