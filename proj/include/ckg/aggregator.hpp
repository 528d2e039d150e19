#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ckg/embedding.hpp"
#include "ckg/extractor.hpp"
#include "ckg/kgstore.hpp"

namespace ckg {

struct SenseSelection {
  std::size_t position;
  std::string entity;
  std::optional<std::string> chosen;
  double score = 0.0;  // cosine(chosen, context); meaningless when chosen is empty
};

struct EnrichedSentence {
  std::vector<std::string> tokens;
  std::map<std::size_t, std::string> annotations;  // position -> extension
  std::string rendered;
};

struct Resources {
  EmbeddingStore embeddings;
  KnowledgeGraph graph;
  Lexicon lexicon;
};

struct EnrichOptions {
  std::size_t top_k = 3;
  // Selections scoring below the floor are dropped.
  std::optional<double> min_score;
};

// Argmax over the candidates of cosine(candidate, context); ties go to the
// lexicographically smaller token. No selection when no candidate is in the
// store or the context has zero norm.
SenseSelection select_extension(const CentralEntity& entity, std::span<const double> context,
                                const EmbeddingStore& store,
                                std::optional<double> min_score = std::nullopt);

// Inserts ` (extension)` right after each selected token. Throws
// std::invalid_argument on duplicate or out-of-range positions.
EnrichedSentence fuse(const Extraction& extraction, const std::vector<SenseSelection>& selections);

// The normalized tokens that feed the context vector: everything outside notes.
std::vector<std::string> context_tokens(const Extraction& extraction);

// extract -> context vector -> select per entity -> fuse. Sentences with no
// in-vocabulary token come back unchanged.
EnrichedSentence enrich(std::string_view sentence, const Resources& resources,
                        const EnrichOptions& options = {});
EnrichedSentence enrich(const Extraction& extraction, const Resources& resources,
                        const EnrichOptions& options = {});

// Parallel enrichment; output[i] is the rendering of sentences[i].
// threads == 0 picks the hardware concurrency.
std::vector<std::string> enrich_batch(const std::vector<std::string>& sentences,
                                      const Resources& resources, const EnrichOptions& options = {},
                                      std::size_t threads = 0);

}  // namespace ckg
