#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ckg/embedding.hpp"

namespace ckg::eval {

struct AnalogyQuestion {
  std::string a, b, c, d;
  std::string category;
  bool is_semantic = true;
};

// `: category` headers followed by `a b c d` lines. Categories whose name
// starts with `gram` are syntactic. Throws ParseError on a question line
// without exactly four tokens or a question before any header.
std::vector<AnalogyQuestion> load_analogies(const std::filesystem::path& path);
std::vector<AnalogyQuestion> read_analogies(std::istream& in, const std::string& source = "<stream>");

struct AnalogyResult {
  // Percentages; empty when the split has no answered question.
  std::optional<double> semantic;
  std::optional<double> syntactic;
  std::optional<double> average;
  std::size_t answered = 0;
  std::size_t skipped = 0;
};

// 3CosAdd answer to a:b :: c:?, or empty if any of a, b, c is missing or
// the offset vector is zero. Tokens are lowercased before lookup.
std::optional<std::string> predict_analogy(const EmbeddingStore& store, const AnalogyQuestion& q);

// Questions with any out-of-vocabulary slot are skipped. The average is the
// unweighted mean of the two split percentages (or the only defined one).
AnalogyResult analogy_accuracy(std::span<const AnalogyQuestion> questions,
                               const EmbeddingStore& store);

// Average ranks for ties, 1-based.
std::vector<double> fractional_ranks(std::span<const double> xs);

// Pearson correlation of the rank vectors. Throws std::invalid_argument on
// a length mismatch, fewer than two values, or constant ranks.
double spearman_rho(std::span<const double> xs, std::span<const double> ys);

struct SimilarityPair {
  std::string w1, w2;
  double gold = 0.0;
};

// `w1 TAB w2 TAB score` per line.
std::vector<SimilarityPair> load_similarity(const std::filesystem::path& path);
std::vector<SimilarityPair> read_similarity(std::istream& in, const std::string& source = "<stream>");

struct SimilarityResult {
  double rho = 0.0;
  std::size_t covered = 0;
};

// Spearman between gold scores and cosines over pairs with both words in
// the store. Throws std::invalid_argument with fewer than two covered pairs.
SimilarityResult similarity_eval(std::span<const SimilarityPair> pairs, const EmbeddingStore& store);

}  // namespace ckg::eval
