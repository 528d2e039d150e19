#include "ckg/aggregator.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace ckg {

SenseSelection select_extension(const CentralEntity& entity, std::span<const double> context,
                                const EmbeddingStore& store, std::optional<double> min_score) {
  SenseSelection sel{entity.position, entity.normalized, std::nullopt, 0.0};
  if (norm(context) == 0.0) return sel;
  for (const auto& cand : entity.candidates) {
    const Vector* v = store.lookup(cand.token);
    if (v == nullptr || norm(*v) == 0.0) continue;
    const double score = cosine(*v, context);
    if (!sel.chosen || score > sel.score || (score == sel.score && cand.token < *sel.chosen)) {
      sel.chosen = cand.token;
      sel.score = score;
    }
  }
  if (sel.chosen && min_score && sel.score < *min_score) sel.chosen.reset();
  return sel;
}

EnrichedSentence fuse(const Extraction& extraction, const std::vector<SenseSelection>& selections) {
  EnrichedSentence out;
  out.tokens.reserve(extraction.tokens.size());
  for (const auto& t : extraction.tokens) out.tokens.push_back(t.surface);

  std::vector<std::size_t> positions;
  for (const auto& sel : selections) {
    if (sel.position >= extraction.tokens.size()) {
      throw std::invalid_argument("fuse: position " + std::to_string(sel.position) +
                                  " out of range");
    }
    positions.push_back(sel.position);
  }
  std::sort(positions.begin(), positions.end());
  if (auto dup = std::adjacent_find(positions.begin(), positions.end()); dup != positions.end()) {
    throw std::invalid_argument("fuse: duplicate position " + std::to_string(*dup));
  }
  for (const auto& sel : selections) {
    if (sel.chosen) out.annotations.emplace(sel.position, *sel.chosen);
  }

  const std::string& text = extraction.text;
  std::size_t copied = 0;
  for (const auto& [pos, ext] : out.annotations) {
    const std::size_t at = extraction.tokens[pos].end;
    out.rendered.append(text, copied, at - copied);
    out.rendered += " (";
    out.rendered += ext;
    out.rendered += ')';
    copied = at;
  }
  out.rendered.append(text, copied, std::string::npos);
  return out;
}

std::vector<std::string> context_tokens(const Extraction& extraction) {
  std::vector<std::string> out;
  for (const auto& t : extraction.tokens) {
    if (!t.in_note) out.push_back(t.normalized);
  }
  return out;
}

EnrichedSentence enrich(const Extraction& extraction, const Resources& resources,
                        const EnrichOptions& options) {
  std::vector<SenseSelection> selections;
  const auto context = context_tokens(extraction);
  const bool any_known = std::any_of(context.begin(), context.end(), [&](const std::string& w) {
    return resources.embeddings.contains(w);
  });
  if (any_known && !extraction.entities.empty()) {
    const Vector centroid = average_vector(resources.embeddings, context);
    for (const auto& entity : extraction.entities) {
      selections.push_back(select_extension(entity, centroid, resources.embeddings, options.min_score));
    }
  }
  return fuse(extraction, selections);
}

EnrichedSentence enrich(std::string_view sentence, const Resources& resources,
                        const EnrichOptions& options) {
  return enrich(extract(sentence, resources.lexicon, resources.graph, resources.embeddings,
                        options.top_k),
                resources, options);
}

std::vector<std::string> enrich_batch(const std::vector<std::string>& sentences,
                                      const Resources& resources, const EnrichOptions& options,
                                      std::size_t threads) {
  std::vector<std::string> out(sentences.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, sentences.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < sentences.size(); i = next++) {
      out[i] = enrich(sentences[i], resources, options).rendered;
    }
  };
  if (threads <= 1) {
    work();
    return out;
  }
  std::vector<std::jthread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      try {
        work();
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace ckg
