#include "ckg/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ckg/error.hpp"
#include "ckg/text.hpp"

namespace ckg::eval {

std::vector<AnalogyQuestion> read_analogies(std::istream& in, const std::string& source) {
  std::vector<AnalogyQuestion> out;
  std::string line;
  std::string category;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (line.front() == ':') {
      std::istringstream header(line.substr(1));
      header >> category;
      if (category.empty()) throw ParseError(source, line_no, "empty category header");
      continue;
    }
    std::istringstream words(line);
    std::vector<std::string> toks;
    for (std::string w; words >> w;) toks.push_back(w);
    if (toks.size() != 4) {
      throw ParseError(source, line_no,
                       "expected 4 tokens per question, got " + std::to_string(toks.size()));
    }
    if (category.empty()) throw ParseError(source, line_no, "question before any ': category' header");
    out.push_back({toks[0], toks[1], toks[2], toks[3], category, !category.starts_with("gram")});
  }
  if (in.bad()) throw ParseError(source, 0, "read failure");
  return out;
}

std::vector<AnalogyQuestion> load_analogies(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_analogies(in, path.string());
}

std::optional<std::string> predict_analogy(const EmbeddingStore& store, const AnalogyQuestion& q) {
  const std::string a = to_lower(q.a), b = to_lower(q.b), c = to_lower(q.c);
  const Vector* va = store.lookup(a);
  const Vector* vb = store.lookup(b);
  const Vector* vc = store.lookup(c);
  if (!va || !vb || !vc) return std::nullopt;
  Vector target(store.dimension());
  for (std::size_t i = 0; i < target.size(); ++i) target[i] = (*vb)[i] - (*va)[i] + (*vc)[i];
  if (norm(target) == 0.0) return std::nullopt;
  auto best = nearest_neighbors(store, target, 1, {a, b, c});
  return best.front().word;
}

AnalogyResult analogy_accuracy(std::span<const AnalogyQuestion> questions,
                               const EmbeddingStore& store) {
  AnalogyResult result;
  std::size_t answered[2] = {0, 0};  // [syntactic, semantic]
  std::size_t correct[2] = {0, 0};
  for (const auto& q : questions) {
    const bool in_vocab = store.contains(to_lower(q.a)) && store.contains(to_lower(q.b)) &&
                          store.contains(to_lower(q.c)) && store.contains(to_lower(q.d));
    if (!in_vocab) {
      ++result.skipped;
      continue;
    }
    ++result.answered;
    ++answered[q.is_semantic];
    const auto guess = predict_analogy(store, q);
    if (guess && *guess == to_lower(q.d)) ++correct[q.is_semantic];
  }
  auto pct = [&](int split) -> std::optional<double> {
    if (answered[split] == 0) return std::nullopt;
    return 100.0 * static_cast<double>(correct[split]) / static_cast<double>(answered[split]);
  };
  result.semantic = pct(1);
  result.syntactic = pct(0);
  if (result.semantic && result.syntactic) {
    result.average = (*result.semantic + *result.syntactic) / 2.0;
  } else {
    result.average = result.semantic ? result.semantic : result.syntactic;
  }
  return result;
}

std::vector<double> fractional_ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
  std::vector<double> ranks(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

double spearman_rho(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("spearman_rho: length mismatch");
  if (xs.size() < 2) throw std::invalid_argument("spearman_rho: need at least two values");
  const auto rx = fractional_ranks(xs);
  const auto ry = fractional_ranks(ys);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw std::invalid_argument("spearman_rho: zero rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<SimilarityPair> read_similarity(std::istream& in, const std::string& source) {
  std::vector<SimilarityPair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      auto tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty()) {
      throw ParseError(source, line_no, "expected 'w1 TAB w2 TAB score'");
    }
    double gold = 0.0;
    const auto& s = fields[2];
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), gold);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(gold)) {
      throw ParseError(source, line_no, "invalid score '" + s + "'");
    }
    out.push_back({fields[0], fields[1], gold});
  }
  if (in.bad()) throw ParseError(source, 0, "read failure");
  return out;
}

std::vector<SimilarityPair> load_similarity(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_similarity(in, path.string());
}

SimilarityResult similarity_eval(std::span<const SimilarityPair> pairs, const EmbeddingStore& store) {
  std::vector<double> gold, predicted;
  for (const auto& p : pairs) {
    const Vector* a = store.lookup(to_lower(p.w1));
    const Vector* b = store.lookup(to_lower(p.w2));
    if (!a || !b || norm(*a) == 0.0 || norm(*b) == 0.0) continue;
    gold.push_back(p.gold);
    predicted.push_back(cosine(*a, *b));
  }
  if (gold.size() < 2) {
    throw std::invalid_argument("similarity_eval: fewer than two covered pairs");
  }
  return {spearman_rho(gold, predicted), gold.size()};
}

}  // namespace ckg::eval
