#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ckg/embedding.hpp"

namespace ckg {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;

  bool operator==(const Triple&) const = default;
};

// Labeled triples plus an undirected one-hop adjacency. Predicates are kept
// but never consulted when ranking. Only direct neighbors are ever read.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  explicit KnowledgeGraph(const std::vector<Triple>& triples);

  // Internal spaces in subject/object become underscores. Throws
  // std::invalid_argument on an empty field.
  void add(Triple triple);

  const std::vector<Triple>& triples() const { return triples_; }

  // Neighbors in either direction, never the entity itself. Unknown entities
  // yield an empty set.
  const std::set<std::string>& one_hop_neighbors(const std::string& entity) const;

  std::size_t entity_count() const { return adjacency_.size(); }

 private:
  std::vector<Triple> triples_;
  std::unordered_map<std::string, std::set<std::string>> adjacency_;
};

// `subject TAB predicate TAB object`; `#` lines and blank lines are skipped.
KnowledgeGraph load_triples(const std::filesystem::path& path);
KnowledgeGraph read_triples(std::istream& in, const std::string& source = "<stream>");

// Replaces internal spaces with underscores.
std::string normalize_entity(std::string_view name);

struct Candidate {
  std::string token;
  double score;  // cosine to the entity's own vector
};

// One-hop neighbors present in the store, ranked by cosine to the entity's
// vector (descending, ties by token), truncated to k. Empty when the entity
// is out of vocabulary.
std::vector<Candidate> top_k_extensions(const KnowledgeGraph& graph, const EmbeddingStore& store,
                                        const std::string& entity, std::size_t k = 3);

}  // namespace ckg
