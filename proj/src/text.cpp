#include "ckg/text.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace ckg {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_punct_char(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

bool is_punctuation(std::string_view token) {
  return !token.empty() && std::all_of(token.begin(), token.end(), is_punct_char);
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::vector<std::size_t> chunk_starts;  // token indices that begin a chunk
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = pos;
    while (end < text.size() && !is_space(text[end])) ++end;

    std::size_t lo = pos;
    std::size_t hi = end;
    chunk_starts.push_back(tokens.size());
    while (lo < hi && is_punct_char(text[lo])) {
      tokens.push_back({std::string(1, text[lo]), lo, lo + 1});
      ++lo;
    }
    std::size_t trail = hi;
    while (trail > lo && is_punct_char(text[trail - 1])) --trail;
    if (lo < trail) tokens.push_back({std::string(text.substr(lo, trail - lo)), lo, trail});
    for (std::size_t i = trail; i < hi; ++i) tokens.push_back({std::string(1, text[i]), i, i + 1});
    pos = end;
  }

  // Mark notes: `(` at the start of a chunk that is preceded by whitespace.
  std::size_t chunk = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    while (chunk < chunk_starts.size() && chunk_starts[chunk] < i) ++chunk;
    const bool chunk_start = chunk < chunk_starts.size() && chunk_starts[chunk] == i;
    if (!chunk_start || tokens[i].surface != "(" || tokens[i].begin == 0) continue;
    std::size_t close = i + 1;
    while (close < tokens.size() && tokens[close].surface != ")") ++close;
    if (close >= tokens.size()) continue;
    for (std::size_t j = i; j <= close; ++j) tokens[j].in_note = true;
    i = close;
  }
  return tokens;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string singularize(std::string_view word) {
  static const std::unordered_map<std::string_view, std::string_view> kIrregular = {
      {"people", "people"}, {"mice", "mouse"},     {"children", "child"}, {"men", "man"},
      {"women", "woman"},   {"feet", "foot"},      {"teeth", "tooth"},    {"geese", "goose"},
      {"news", "news"},     {"series", "series"},  {"species", "species"}, {"physics", "physics"},
      {"data", "data"},     {"analyses", "analysis"}};
  if (auto it = kIrregular.find(word); it != kIrregular.end()) return std::string(it->second);

  if (word.size() > 4 && ends_with(word, "ies")) {
    return std::string(word.substr(0, word.size() - 3)) + "y";
  }
  if (word.size() > 3 && ends_with(word, "es")) {
    std::string_view stem = word.substr(0, word.size() - 2);
    if (ends_with(stem, "s") || ends_with(stem, "x") || ends_with(stem, "z") ||
        ends_with(stem, "ch") || ends_with(stem, "sh")) {
      return std::string(stem);
    }
  }
  if (word.size() > 2 && ends_with(word, "s") && !ends_with(word, "ss") && !ends_with(word, "us") &&
      !ends_with(word, "is")) {
    return std::string(word.substr(0, word.size() - 1));
  }
  return std::string(word);
}

std::string strip_notes(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ' && i + 1 < text.size() && text[i + 1] == '(') {
      std::size_t depth = 0;
      std::size_t j = i + 1;
      for (; j < text.size(); ++j) {
        if (text[j] == '(') ++depth;
        else if (text[j] == ')' && --depth == 0) break;
        else if (is_space(text[j])) break;
      }
      if (j < text.size() && text[j] == ')' && depth == 0) {
        i = j + 1;
        continue;
      }
    }
    out.push_back(text[i]);
    ++i;
  }
  return out;
}

}  // namespace ckg
