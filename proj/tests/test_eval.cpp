#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>

#include "ckg/error.hpp"
#include "ckg/eval.hpp"
#include "fixtures.hpp"

using namespace ckg;
using namespace ckg::eval;
using ckg::testing::fixture;
using ckg::testing::oracle_cosine;

namespace {

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

struct OracleAccuracy {
  std::optional<double> semantic, syntactic, average;
  std::size_t answered = 0;
};

// Exhaustive 3CosAdd over the whole store.
OracleAccuracy oracle_accuracy(const std::vector<AnalogyQuestion>& qs, const EmbeddingStore& store) {
  std::size_t total[2] = {0, 0}, hit[2] = {0, 0};
  OracleAccuracy out;
  for (const auto& q : qs) {
    const std::string a = lower(q.a), b = lower(q.b), c = lower(q.c), d = lower(q.d);
    if (!store.contains(a) || !store.contains(b) || !store.contains(c) || !store.contains(d)) continue;
    const auto &va = *store.lookup(a), &vb = *store.lookup(b), &vc = *store.lookup(c);
    Vector target(va.size());
    for (std::size_t i = 0; i < va.size(); ++i) target[i] = vb[i] - va[i] + vc[i];
    std::string best;
    double best_score = -2;
    for (const auto& [w, v] : store.entries()) {
      if (w == a || w == b || w == c) continue;
      const double s = oracle_cosine(target, v);
      if (s > best_score || (s == best_score && w < best)) best = w, best_score = s;
    }
    const int split = q.category.rfind("gram", 0) == 0 ? 0 : 1;
    ++total[split];
    ++out.answered;
    if (best == d) ++hit[split];
  }
  if (total[1]) out.semantic = 100.0 * hit[1] / total[1];
  if (total[0]) out.syntactic = 100.0 * hit[0] / total[0];
  if (out.semantic && out.syntactic) out.average = (*out.semantic + *out.syntactic) / 2;
  else if (out.semantic) out.average = out.semantic;
  else out.average = out.syntactic;
  return out;
}

// Spearman computed as Pearson over average ranks, ranks by pairwise counting.
double oracle_spearman(const std::vector<double>& x, const std::vector<double>& y) {
  auto ranks = [](const std::vector<double>& v) {
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      double less = 0, equal = 0;
      for (double w : v) less += w < v[i], equal += w == v[i];
      r[i] = less + (equal + 1) / 2;
    }
    return r;
  };
  const auto rx = ranks(x), ry = ranks(y);
  const double n = static_cast<double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += rx[i], my += ry[i];
  mx /= n, my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

}  // namespace

TEST_CASE("read_analogies") {
  std::istringstream in(": capital-world\nathens greece baghdad iraq\n\n: gram1-adverb\nslow slowly quick quickly\n");
  auto qs = read_analogies(in);
  REQUIRE(qs.size() == 2);
  CHECK(qs[0].is_semantic);
  CHECK_FALSE(qs[1].is_semantic);
  CHECK(qs[1].d == "quickly");

  std::istringstream short_line(": family\nman woman king\n");
  try {
    read_analogies(short_line);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  std::istringstream headless("a b c d\n");
  CHECK_THROWS_AS(read_analogies(headless), ParseError);
}

TEST_CASE("exact-offset analogy fixture scores 100%") {
  auto store = load_embeddings(fixture("analogy_exact_embeddings.txt"));
  auto qs = load_analogies(fixture("analogy_exact.txt"));
  auto r = analogy_accuracy(qs, store);
  CHECK(r.answered == qs.size());
  REQUIRE(r.average);
  CHECK(*r.average == 100.0);
  CHECK(r.semantic == 100.0);
  CHECK(r.syntactic == 100.0);
}

TEST_CASE("predict_analogy excludes question words and lowercases") {
  EmbeddingStore store(2);
  store.insert("man", {1, 0});
  store.insert("woman", {1, 1});
  store.insert("king", {2, 0});
  store.insert("queen", {2, 1});
  CHECK(predict_analogy(store, {"Man", "Woman", "KING", "queen", "family"}) == "queen");
  CHECK_FALSE(predict_analogy(store, {"man", "woman", "prince", "princess", "family"}));
  // b - a + c equals a: the excluded word is not returned.
  CHECK(predict_analogy(store, {"man", "man", "king", "x", "family"}) != "king");
}

TEST_CASE("all-OOV questions give no answered questions and no average") {
  EmbeddingStore store(2);
  store.insert("x", {1, 0});
  std::vector<AnalogyQuestion> qs{{"a", "b", "c", "d", "family", true}};
  auto r = analogy_accuracy(qs, store);
  CHECK(r.answered == 0);
  CHECK(r.skipped == 1);
  CHECK_FALSE(r.average);
}

TEST_CASE("mixed analogy fixture matches the brute-force oracle") {
  auto store = load_embeddings(fixture("analogy_mixed_embeddings.txt"));
  auto qs = load_analogies(fixture("analogy_mixed.txt"));
  auto r = analogy_accuracy(qs, store);
  auto o = oracle_accuracy(qs, store);
  CHECK(r.answered == o.answered);
  CHECK(r.skipped == 2);
  REQUIRE(r.semantic);
  REQUIRE(r.syntactic);
  CHECK(std::abs(*r.semantic - *o.semantic) < 1e-9);
  CHECK(std::abs(*r.syntactic - *o.syntactic) < 1e-9);
  CHECK(std::abs(*r.average - *o.average) < 1e-9);
}

TEST_CASE("random stores: accuracy matches the oracle") {
  std::mt19937_64 rng(43);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t words = 50 + rng() % 950;
    EmbeddingStore store(6);
    for (std::size_t i = 0; i < words; ++i) {
      Vector v(6);
      for (auto& x : v) x = normal(rng);
      store.insert("w" + std::to_string(i), v);
    }
    std::vector<AnalogyQuestion> qs;
    for (int i = 0; i < 40; ++i) {
      auto w = [&] { return "w" + std::to_string(rng() % (words + 5)); };
      qs.push_back({w(), w(), w(), w(), i % 2 ? "gram2" : "family", i % 2 == 0});
    }
    auto r = analogy_accuracy(qs, store);
    auto o = oracle_accuracy(qs, store);
    CHECK(r.answered == o.answered);
    CHECK(r.semantic.has_value() == o.semantic.has_value());
    if (r.semantic) CHECK(std::abs(*r.semantic - *o.semantic) < 1e-9);
    if (r.syntactic) CHECK(std::abs(*r.syntactic - *o.syntactic) < 1e-9);
  }
}

TEST_CASE("spearman_rho: textbook values") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  CHECK(spearman_rho(a, std::vector<double>{2, 4, 6, 8, 10}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spearman_rho(a, std::vector<double>{5, 4, 3, 2, 1}) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(spearman_rho(std::vector<double>{1, 2, 3, 4}, std::vector<double>{1, 3, 2, 4}) ==
        doctest::Approx(0.8).epsilon(1e-15));
  CHECK(fractional_ranks(std::vector<double>{10, 20, 20, 5}) == std::vector<double>{2, 3.5, 3.5, 1});
}

TEST_CASE("spearman_rho: errors") {
  CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 2}, std::vector<double>{1}), std::invalid_argument);
  CHECK_THROWS_AS(spearman_rho(std::vector<double>{1}, std::vector<double>{1}), std::invalid_argument);
  CHECK_THROWS_AS(spearman_rho(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                  std::invalid_argument);
}

TEST_CASE("spearman_rho: oracle agreement and monotone invariance") {
  std::mt19937_64 rng(47);
  std::uniform_int_distribution<int> small(0, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng() % 40;
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = small(rng);  // plenty of ties
    for (auto& v : y) v = small(rng);
    if (std::adjacent_find(x.begin(), x.end(), std::not_equal_to<>()) == x.end()) continue;
    if (std::adjacent_find(y.begin(), y.end(), std::not_equal_to<>()) == y.end()) continue;
    const double rho = spearman_rho(x, y);
    CHECK(std::abs(rho - oracle_spearman(x, y)) < 1e-9);
    std::vector<double> tx(n);
    std::transform(x.begin(), x.end(), tx.begin(), [](double v) { return std::exp(v) * 3 - 7; });
    CHECK(std::abs(spearman_rho(tx, y) - rho) < 1e-12);
  }
}

TEST_CASE("similarity fixtures") {
  auto store = load_embeddings(fixture("embeddings.txt"));
  auto fwd = similarity_eval(load_similarity(fixture("similarity.tsv")), store);
  CHECK(fwd.rho == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fwd.covered == 10);
  auto rev = similarity_eval(load_similarity(fixture("similarity_reversed.tsv")), store);
  CHECK(rev.rho == doctest::Approx(-1.0).epsilon(1e-12));

  const auto mixed_pairs = load_similarity(fixture("similarity_mixed.tsv"));
  auto mixed = similarity_eval(mixed_pairs, store);
  CHECK(mixed.covered == 10);
  CHECK(std::abs(mixed.rho - (1.0 - 6.0 * 16.0 / 990.0)) < 1e-9);
  std::vector<double> gold, cos;
  for (const auto& p : mixed_pairs) {
    if (!store.contains(p.w1) || !store.contains(p.w2)) continue;
    gold.push_back(p.gold);
    cos.push_back(oracle_cosine(*store.lookup(p.w1), *store.lookup(p.w2)));
  }
  CHECK(std::abs(mixed.rho - oracle_spearman(gold, cos)) < 1e-9);
}

TEST_CASE("similarity: coverage and parsing") {
  EmbeddingStore store(2);
  store.insert("a", {1, 0});
  store.insert("b", {1, 1});
  store.insert("c", {0, 1});
  store.insert("d", {-1, 1});
  std::vector<SimilarityPair> pairs{{"a", "b", 3}, {"a", "c", 2}, {"a", "d", 1}, {"b", "c", 2.5},
                                    {"a", "zzz", 9}};
  auto r = similarity_eval(pairs, store);
  CHECK(r.covered == 4);
  CHECK_THROWS_AS(similarity_eval(std::vector<SimilarityPair>{{"a", "b", 1}}, store),
                  std::invalid_argument);

  std::istringstream bad("a\tb\n");
  CHECK_THROWS_AS(read_similarity(bad), ParseError);
  std::istringstream nan("a\tb\tx\n");
  CHECK_THROWS_AS(read_similarity(nan), ParseError);
}
