#include "ckg/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ckg/error.hpp"

namespace ckg {

EmbeddingStore::EmbeddingStore(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

void EmbeddingStore::insert(const std::string& word, Vector vec) {
  if (vec.size() != dimension_) {
    throw std::invalid_argument("vector for '" + word + "' has " + std::to_string(vec.size()) +
                                " components, expected " + std::to_string(dimension_));
  }
  for (double x : vec) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite component for '" + word + "'");
  }
  entries_.insert_or_assign(word, std::move(vec));
}

const Vector* EmbeddingStore::lookup(const std::string& word) const {
  auto it = entries_.find(word);
  return it == entries_.end() ? nullptr : &it->second;
}

EmbeddingStore EmbeddingStore::scaled(double factor) const {
  EmbeddingStore out(dimension_);
  for (const auto& [word, vec] : entries_) {
    Vector v = vec;
    for (double& x : v) x *= factor;
    out.insert(word, std::move(v));
  }
  return out;
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(' ', pos);
    if (next == std::string_view::npos) next = line.size();
    fields.push_back(line.substr(pos, next - pos));
    pos = next + 1;
  }
  return fields;
}

double parse_component(std::string_view text, const std::string& source, std::size_t line_no) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ParseError(source, line_no, "non-numeric component '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) {
    throw ParseError(source, line_no, "non-finite component '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

EmbeddingStore read_embeddings(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<std::pair<std::string, Vector>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto fields = split_spaces(line);
    if (fields.size() < 2 || fields[0].empty()) {
      throw ParseError(source, line_no, "expected 'word v1 ... vd'");
    }
    Vector vec;
    vec.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      vec.push_back(parse_component(fields[i], source, line_no));
    }
    if (dim == 0) {
      dim = vec.size();
    } else if (vec.size() != dim) {
      throw ParseError(source, line_no,
                       "dimension mismatch: " + std::to_string(vec.size()) + " components, expected " +
                           std::to_string(dim));
    }
    rows.emplace_back(std::string(fields[0]), std::move(vec));
  }
  if (in.bad()) throw ParseError(source, 0, "read failure");
  if (rows.empty()) throw ParseError(source, 0, "empty embedding file");

  EmbeddingStore store(dim);
  for (auto& [word, vec] : rows) store.insert(word, std::move(vec));
  return store;
}

EmbeddingStore load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_embeddings(in, path.string());
}

double norm(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("cosine: length mismatch (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine: zero-norm vector");
  return std::clamp(dot / (na * nb), -1.0, 1.0);
}

Vector average_vector(const EmbeddingStore& store, std::span<const std::string> tokens) {
  Vector sum(store.dimension(), 0.0);
  std::size_t found = 0;
  for (const auto& token : tokens) {
    const Vector* v = store.lookup(token);
    if (v == nullptr) continue;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
    ++found;
  }
  if (found == 0) throw std::domain_error("average_vector: no token found in store");
  for (double& x : sum) x /= static_cast<double>(found);
  return sum;
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingStore& store, std::span<const double> query,
                                        std::size_t k,
                                        const std::unordered_set<std::string>& exclude) {
  if (k == 0) throw std::invalid_argument("nearest_neighbors: k must be positive");
  if (query.size() != store.dimension()) {
    throw std::invalid_argument("nearest_neighbors: query length mismatch");
  }
  if (norm(query) == 0.0) throw std::invalid_argument("nearest_neighbors: zero-norm query");

  std::vector<Neighbor> scored;
  scored.reserve(store.size());
  for (const auto& [word, vec] : store.entries()) {
    if (exclude.contains(word) || norm(vec) == 0.0) continue;
    scored.push_back({word, cosine(query, vec)});
  }
  if (scored.size() < k) {
    throw std::invalid_argument("nearest_neighbors: only " + std::to_string(scored.size()) +
                                " eligible words for k=" + std::to_string(k));
  }
  auto better = [](const Neighbor& a, const Neighbor& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.word < b.word;
  };
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    better);
  scored.resize(k);
  return scored;
}

}  // namespace ckg
