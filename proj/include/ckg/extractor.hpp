#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ckg/embedding.hpp"
#include "ckg/kgstore.hpp"
#include "ckg/text.hpp"

namespace ckg {

inline constexpr std::string_view kUnknownTag = "UNK";

// Penn Treebank tags, punctuation tags, and UNK.
bool is_known_tag(std::string_view tag);

// Lowercased word -> POS tag.
class Lexicon {
 public:
  Lexicon() = default;

  // Throws std::invalid_argument on a tag outside the declared set.
  void add(std::string_view word, std::string_view tag);

  // Tag for the lowercased form, or UNK.
  std::string_view tag_of(std::string_view word) const;

  std::size_t size() const { return tags_.size(); }

 private:
  std::unordered_map<std::string, std::string> tags_;
};

// `word TAB tag` per line; blank and `#` lines skipped.
Lexicon load_lexicon(const std::filesystem::path& path);
Lexicon read_lexicon(std::istream& in, const std::string& source = "<stream>");

struct TaggedToken {
  std::string surface;
  std::string tag;
  // Lowercased; plural nouns (NNS, NNPS) are also singularized.
  std::string normalized;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool in_note = false;
};

struct CentralEntity {
  std::size_t position;
  std::string normalized;
  std::vector<Candidate> candidates;
};

// A sentence after the extraction stage. `text` is the surface string that
// token spans index into.
struct Extraction {
  std::string text;
  std::vector<TaggedToken> tokens;
  std::vector<CentralEntity> entities;
};

std::string normalize_token(std::string_view surface, std::string_view tag);

std::vector<TaggedToken> tag_tokens(const std::vector<Token>& tokens, const Lexicon& lexicon);
std::vector<TaggedToken> tag_tokens(const std::vector<std::string>& tokens, const Lexicon& lexicon);

// Positions tagged NN* in order, one per occurrence. Tokens inside notes,
// punctuation, and tokens already followed by a note are never entities.
std::vector<std::size_t> detect_entities(const std::vector<TaggedToken>& tagged);

Extraction extract(std::string_view sentence, const Lexicon& lexicon, const KnowledgeGraph& graph,
                   const EmbeddingStore& store, std::size_t top_k = 3);

// Pre-tagged variant: surfaces are joined by single spaces to form `text`.
Extraction extract_tagged(const std::vector<std::pair<std::string, std::string>>& tagged,
                          const KnowledgeGraph& graph, const EmbeddingStore& store,
                          std::size_t top_k = 3);

using PretaggedSentence = std::vector<std::pair<std::string, std::string>>;

// One `surface TAB tag` per line, blank line between sentences.
std::vector<PretaggedSentence> read_pretagged(std::istream& in,
                                              const std::string& source = "<stream>");

}  // namespace ckg
