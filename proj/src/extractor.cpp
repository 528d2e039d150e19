#include "ckg/extractor.hpp"

#include <array>
#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "ckg/error.hpp"
#include "ckg/text.hpp"

namespace ckg {

namespace {

constexpr std::array<std::string_view, 46> kTagSet = {
    "CC",  "CD",   "DT",  "EX",  "FW",  "IN",  "JJ",  "JJR", "JJS", "LS",  "MD",   "NN",
    "NNS", "NNP",  "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP",  "SYM",
    "TO",  "UH",   "VB",  "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP",  "WP$", "WRB",
    ".",   ",",    ":",   "``",  "''",  "-LRB-", "-RRB-", "#", "$", "UNK"};

void trim_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

bool split_tab_pair(const std::string& line, std::string& left, std::string& right) {
  auto tab = line.find('\t');
  if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) return false;
  left = line.substr(0, tab);
  right = line.substr(tab + 1);
  return !left.empty() && !right.empty();
}

}  // namespace

bool is_known_tag(std::string_view tag) {
  return std::find(kTagSet.begin(), kTagSet.end(), tag) != kTagSet.end();
}

void Lexicon::add(std::string_view word, std::string_view tag) {
  if (!is_known_tag(tag)) throw std::invalid_argument("unknown POS tag '" + std::string(tag) + "'");
  tags_.insert_or_assign(to_lower(word), std::string(tag));
}

std::string_view Lexicon::tag_of(std::string_view word) const {
  auto it = tags_.find(to_lower(word));
  return it == tags_.end() ? kUnknownTag : std::string_view(it->second);
}

Lexicon read_lexicon(std::istream& in, const std::string& source) {
  Lexicon lexicon;
  std::string line, word, tag;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    trim_cr(line);
    if (line.empty() || line.front() == '#') continue;
    if (!split_tab_pair(line, word, tag)) throw ParseError(source, line_no, "expected 'word TAB tag'");
    if (!is_known_tag(tag)) throw ParseError(source, line_no, "unknown POS tag '" + tag + "'");
    lexicon.add(word, tag);
  }
  if (in.bad()) throw ParseError(source, 0, "read failure");
  return lexicon;
}

Lexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_lexicon(in, path.string());
}

std::string normalize_token(std::string_view surface, std::string_view tag) {
  std::string lower = to_lower(surface);
  if (tag == "NNS" || tag == "NNPS") return singularize(lower);
  return lower;
}

std::vector<TaggedToken> tag_tokens(const std::vector<Token>& tokens, const Lexicon& lexicon) {
  std::vector<TaggedToken> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    std::string tag(lexicon.tag_of(tok.surface));
    std::string normalized = normalize_token(tok.surface, tag);
    out.push_back({tok.surface, std::move(tag), std::move(normalized), tok.begin, tok.end, tok.in_note});
  }
  return out;
}

std::vector<TaggedToken> tag_tokens(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  std::vector<Token> spans;
  spans.reserve(tokens.size());
  std::size_t offset = 0;
  for (const auto& t : tokens) {
    spans.push_back({t, offset, offset + t.size()});
    offset += t.size() + 1;
  }
  return tag_tokens(spans, lexicon);
}

std::vector<std::size_t> detect_entities(const std::vector<TaggedToken>& tagged) {
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    const auto& tok = tagged[i];
    if (tok.in_note || is_punctuation(tok.surface)) continue;
    if (!tok.tag.starts_with("NN")) continue;
    if (i + 1 < tagged.size() && tagged[i + 1].in_note) continue;  // already annotated
    positions.push_back(i);
  }
  return positions;
}

namespace {

std::vector<CentralEntity> gather_entities(const std::vector<TaggedToken>& tagged,
                                           const KnowledgeGraph& graph, const EmbeddingStore& store,
                                           std::size_t top_k) {
  std::vector<CentralEntity> entities;
  for (std::size_t pos : detect_entities(tagged)) {
    const std::string& norm = tagged[pos].normalized;
    entities.push_back({pos, norm, top_k_extensions(graph, store, norm, top_k)});
  }
  return entities;
}

}  // namespace

Extraction extract(std::string_view sentence, const Lexicon& lexicon, const KnowledgeGraph& graph,
                   const EmbeddingStore& store, std::size_t top_k) {
  Extraction ex;
  ex.text = std::string(sentence);
  ex.tokens = tag_tokens(tokenize(sentence), lexicon);
  ex.entities = gather_entities(ex.tokens, graph, store, top_k);
  return ex;
}

Extraction extract_tagged(const PretaggedSentence& tagged, const KnowledgeGraph& graph,
                          const EmbeddingStore& store, std::size_t top_k) {
  Extraction ex;
  for (const auto& [surface, tag] : tagged) {
    if (!ex.text.empty()) ex.text.push_back(' ');
    const std::size_t begin = ex.text.size();
    ex.text += surface;
    ex.tokens.push_back({surface, tag, normalize_token(surface, tag), begin, ex.text.size(), false});
  }
  ex.entities = gather_entities(ex.tokens, graph, store, top_k);
  return ex;
}

std::vector<PretaggedSentence> read_pretagged(std::istream& in, const std::string& source) {
  std::vector<PretaggedSentence> sentences;
  PretaggedSentence current;
  std::string line, surface, tag;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    trim_cr(line);
    if (line.empty()) {
      if (!current.empty()) sentences.push_back(std::move(current));
      current.clear();
      continue;
    }
    if (!split_tab_pair(line, surface, tag)) {
      throw ParseError(source, line_no, "expected 'surface TAB tag'");
    }
    if (!is_known_tag(tag)) throw ParseError(source, line_no, "unknown POS tag '" + tag + "'");
    current.emplace_back(surface, tag);
  }
  if (!current.empty()) sentences.push_back(std::move(current));
  if (in.bad()) throw ParseError(source, 0, "read failure");
  return sentences;
}

}  // namespace ckg
