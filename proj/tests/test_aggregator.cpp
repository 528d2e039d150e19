#include <doctest.h>

#include <random>

#include "ckg/aggregator.hpp"
#include "ckg/text.hpp"
#include "fixtures.hpp"

using namespace ckg;
using ckg::testing::fixture;
using ckg::testing::oracle_cosine;

namespace {

Resources load_resources(double scale = 1.0) {
  auto store = load_embeddings(fixture("embeddings.txt"));
  if (scale != 1.0) store = store.scaled(scale);
  return {std::move(store), load_triples(fixture("kg.tsv")), load_lexicon(fixture("lexicon.tsv"))};
}

const Resources& resources() {
  static const Resources r = load_resources();
  return r;
}

const char* kGoldenSentence = "People in cities usually buy apples in the local markets.";
const char* kGoldenEnriched =
    "People (citizen) in cities (settlement) usually buy apples (fruit) in the local markets "
    "(supermarket).";

// Independent mean of the in-store context vectors.
Vector oracle_average(const Extraction& ex, const EmbeddingStore& store) {
  Vector sum(store.dimension(), 0.0);
  std::size_t found = 0;
  for (const auto& t : ex.tokens) {
    if (t.in_note) continue;
    if (const Vector* v = store.lookup(t.normalized)) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
      ++found;
    }
  }
  for (auto& x : sum) x /= static_cast<double>(found);
  return sum;
}

}  // namespace

TEST_CASE("select_extension: apple picks fruit, matching a brute-force argmax") {
  const auto& r = resources();
  auto ex = extract(kGoldenSentence, r.lexicon, r.graph, r.embeddings);
  const auto avg = oracle_average(ex, r.embeddings);
  const auto& apple = ex.entities[2];

  std::string best;
  double best_score = -2;
  for (const auto& c : apple.candidates) {
    const double s = oracle_cosine(*r.embeddings.lookup(c.token), avg);
    if (s > best_score || (s == best_score && c.token < best)) best = c.token, best_score = s;
  }
  auto sel = select_extension(apple, avg, r.embeddings);
  REQUIRE(sel.chosen);
  CHECK(*sel.chosen == "fruit");
  CHECK(*sel.chosen == best);
  CHECK(sel.score == doctest::Approx(best_score).epsilon(1e-12));
}

TEST_CASE("select_extension: edge cases") {
  EmbeddingStore store(2);
  store.insert("x", {1, 0});
  store.insert("y", {1, 0});
  store.insert("z", {0, 1});
  const Vector avg{1, 0.1};

  CentralEntity single{0, "e", {{"z", 0.5}}};
  CHECK(select_extension(single, avg, store).chosen == "z");

  // Identical vectors tie; the smaller token wins regardless of input order.
  CentralEntity tied{0, "e", {{"y", 0.9}, {"x", 0.9}}};
  CHECK(select_extension(tied, avg, store).chosen == "x");

  CentralEntity none{0, "e", {}};
  CHECK_FALSE(select_extension(none, avg, store).chosen);

  CHECK_FALSE(select_extension(single, Vector{0, 0}, store).chosen);

  CHECK(select_extension(single, avg, store, 0.0).chosen == "z");
  CHECK_FALSE(select_extension(single, avg, store, 0.5).chosen);
}

TEST_CASE("fuse: annotations go right after the entity") {
  const auto& r = resources();
  auto ex = extract("I like apples.", r.lexicon, r.graph, r.embeddings);
  REQUIRE(ex.tokens.size() == 4);
  auto out = fuse(ex, {{2, "apple", std::string("fruit"), 0.9}});
  CHECK(out.rendered == "I like apples (fruit).");
  CHECK(out.annotations.at(2) == "fruit");

  CHECK(fuse(ex, {}).rendered == "I like apples.");
  CHECK(fuse(ex, {{2, "apple", std::nullopt, 0.0}}).rendered == "I like apples.");

  CHECK_THROWS_AS(fuse(ex, {{2, "apple", std::string("fruit"), 0}, {2, "apple", std::string("tree"), 0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(fuse(ex, {{9, "apple", std::string("fruit"), 0}}), std::invalid_argument);
}

TEST_CASE("enrich: the golden sentence") {
  auto out = enrich(kGoldenSentence, resources());
  CHECK(out.rendered == kGoldenEnriched);
  CHECK(out.annotations.size() == 4);
}

TEST_CASE("enrich: sentences without usable entities come back unchanged") {
  CHECK(enrich("Run quickly!", resources()).rendered == "Run quickly!");
  CHECK(enrich("The zebra runs.", resources()).rendered == "The zebra runs.");
  CHECK(enrich("qwerty asdf", resources()).rendered == "qwerty asdf");
  CHECK(enrich("", resources()).rendered == "");
}

TEST_CASE("enrich: ambiguous nouns follow their context") {
  const auto& r = resources();
  for (const auto& line : ckg::testing::read_lines(fixture("sentences_100.txt"))) {
    auto ex = extract(line, r.lexicon, r.graph, r.embeddings);
    auto out = enrich(ex, r);
    const auto avg = oracle_average(ex, r.embeddings);
    for (const auto& e : ex.entities) {
      std::optional<std::string> best;
      double best_score = -2;
      for (const auto& c : e.candidates) {
        const double s = oracle_cosine(*r.embeddings.lookup(c.token), avg);
        if (s > best_score || (s == best_score && c.token < *best)) best = c.token, best_score = s;
      }
      auto it = out.annotations.find(e.position);
      if (best) {
        REQUIRE(it != out.annotations.end());
        CHECK(it->second == *best);
        CHECK(r.graph.one_hop_neighbors(e.normalized).contains(it->second));
      } else {
        CHECK(it == out.annotations.end());
      }
    }
  }
}

TEST_CASE("enrich: scale invariance, reversibility, idempotence") {
  const auto& r = resources();
  const auto small = load_resources(0.1);
  const auto big = load_resources(1000.0);
  for (const auto& line : ckg::testing::read_lines(fixture("sentences_100.txt"))) {
    const auto out = enrich(line, r);
    CHECK(enrich(line, small).annotations == out.annotations);
    CHECK(enrich(line, big).annotations == out.annotations);
    CHECK(strip_notes(out.rendered) == line);
    CHECK(enrich(out.rendered, r).rendered == out.rendered);
  }
}

TEST_CASE("enrich_batch preserves order and matches sequential enrich") {
  const auto& r = resources();
  auto lines = ckg::testing::read_lines(fixture("sentences_100.txt"));
  std::mt19937_64 rng(31);
  std::vector<std::string> many;
  for (int i = 0; i < 1000; ++i) many.push_back(lines[rng() % lines.size()]);
  std::vector<std::string> expected;
  for (const auto& s : many) expected.push_back(enrich(s, r).rendered);
  for (std::size_t threads : {1u, 2u, 8u}) CHECK(enrich_batch(many, r, {}, threads) == expected);
  CHECK(enrich_batch({}, r, {}, 4).empty());
}
