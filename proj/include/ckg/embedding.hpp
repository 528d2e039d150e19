#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <map>
#include <unordered_set>
#include <vector>

namespace ckg {

using Vector = std::vector<double>;

// Word -> dense vector table. Immutable once built; lookups are exact and
// case-sensitive.
class EmbeddingStore {
 public:
  explicit EmbeddingStore(std::size_t dimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }

  // Inserts or replaces. Throws std::invalid_argument on a wrong length or
  // a non-finite component.
  void insert(const std::string& word, Vector vec);

  // nullptr when the word is absent. Never substitutes a default vector.
  const Vector* lookup(const std::string& word) const;
  bool contains(const std::string& word) const { return lookup(word) != nullptr; }

  // Ordered by word; the iteration order used by every ranking.
  const std::map<std::string, Vector, std::less<>>& entries() const { return entries_; }

  // Copy with every vector multiplied by `factor`.
  EmbeddingStore scaled(double factor) const;

 private:
  std::size_t dimension_;
  std::map<std::string, Vector, std::less<>> entries_;
};

// `word v1 ... vd` per line, single-space separated. Last duplicate wins.
// Throws ParseError naming the offending line.
EmbeddingStore load_embeddings(const std::filesystem::path& path);
EmbeddingStore read_embeddings(std::istream& in, const std::string& source = "<stream>");

// dot(a,b) / (|a| |b|), clamped to [-1, 1]. Throws std::invalid_argument on
// a length mismatch or a zero-norm input.
double cosine(std::span<const double> a, std::span<const double> b);

double norm(std::span<const double> v);

// Mean of the vectors of the tokens present in the store; absent tokens are
// skipped and do not count toward the divisor. Throws std::domain_error if
// no token is found.
Vector average_vector(const EmbeddingStore& store, std::span<const std::string> tokens);

struct Neighbor {
  std::string word;
  double score;
};

// The k stored words with the highest cosine to `query`, descending, ties
// broken by word order. Zero-norm stored vectors are never eligible.
// Throws std::invalid_argument if fewer than k words are eligible.
std::vector<Neighbor> nearest_neighbors(const EmbeddingStore& store,
                                        std::span<const double> query, std::size_t k,
                                        const std::unordered_set<std::string>& exclude = {});

}  // namespace ckg
