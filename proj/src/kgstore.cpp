#include "ckg/kgstore.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "ckg/error.hpp"

namespace ckg {

std::string normalize_entity(std::string_view name) {
  std::string out(name);
  std::replace(out.begin(), out.end(), ' ', '_');
  return out;
}

KnowledgeGraph::KnowledgeGraph(const std::vector<Triple>& triples) {
  for (const auto& t : triples) add(t);
}

void KnowledgeGraph::add(Triple triple) {
  if (triple.subject.empty() || triple.predicate.empty() || triple.object.empty()) {
    throw std::invalid_argument("triple fields must be nonempty");
  }
  triple.subject = normalize_entity(triple.subject);
  triple.object = normalize_entity(triple.object);
  if (triple.subject != triple.object) {
    adjacency_[triple.subject].insert(triple.object);
    adjacency_[triple.object].insert(triple.subject);
  }
  triples_.push_back(std::move(triple));
}

const std::set<std::string>& KnowledgeGraph::one_hop_neighbors(const std::string& entity) const {
  static const std::set<std::string> kEmpty;
  auto it = adjacency_.find(entity);
  return it == adjacency_.end() ? kEmpty : it->second;
}

KnowledgeGraph read_triples(std::istream& in, const std::string& source) {
  KnowledgeGraph graph;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    while (true) {
      std::size_t tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab == std::string::npos ? std::string::npos : tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 3) {
      throw ParseError(source, line_no,
                       "expected 3 tab-separated fields, got " + std::to_string(fields.size()));
    }
    if (fields[0].empty() || fields[1].empty() || fields[2].empty()) {
      throw ParseError(source, line_no, "empty triple field");
    }
    graph.add({std::move(fields[0]), std::move(fields[1]), std::move(fields[2])});
  }
  if (in.bad()) throw ParseError(source, 0, "read failure");
  return graph;
}

KnowledgeGraph load_triples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  return read_triples(in, path.string());
}

std::vector<Candidate> top_k_extensions(const KnowledgeGraph& graph, const EmbeddingStore& store,
                                        const std::string& entity, std::size_t k) {
  if (k == 0) throw std::invalid_argument("top_k_extensions: k must be positive");
  const Vector* center = store.lookup(entity);
  if (center == nullptr || norm(*center) == 0.0) return {};

  std::vector<Candidate> out;
  for (const auto& neighbor : graph.one_hop_neighbors(entity)) {
    if (neighbor == entity) continue;
    const Vector* v = store.lookup(neighbor);
    if (v == nullptr || norm(*v) == 0.0) continue;
    out.push_back({neighbor, cosine(*center, *v)});
  }
  std::stable_sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.token < b.token;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

}  // namespace ckg
