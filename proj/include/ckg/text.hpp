#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ckg {

// A token with its byte span in the source text.
struct Token {
  std::string surface;
  std::size_t begin = 0;
  std::size_t end = 0;
  // Inside a ` (...)` note, parentheses included.
  bool in_note = false;
};

// Whitespace split, then leading and trailing ASCII punctuation detached one
// character per token. A `(` that starts a whitespace-delimited chunk opens a
// note which runs to the next `)` token.
std::vector<Token> tokenize(std::string_view text);

bool is_punctuation(std::string_view token);

std::string to_lower(std::string_view s);

// Crude plural stripping: irregular table, then -ies -> y, sibilant + es,
// then a bare -s (not -ss).
std::string singularize(std::string_view word);

// Removes every ` (...)` note. Inverse of note insertion for text that does
// not itself contain a space followed by a parenthesized group.
std::string strip_notes(std::string_view text);

}  // namespace ckg
