#include <doctest.h>

#include <sstream>

#include "ckg/cli.hpp"
#include "fixtures.hpp"

using ckg::testing::fixture;
using ckg::testing::read_file;
using ckg::testing::TempDir;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args, const std::string& input = "") {
  args.insert(args.begin(), "ckg");
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = ckg::cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> enrich_args() {
  return {"enrich", "--embeddings", fixture("embeddings.txt").string(), "--kg",
          fixture("kg.tsv").string(), "--lexicon", fixture("lexicon.tsv").string()};
}

}  // namespace

TEST_CASE("format_number") {
  CHECK(ckg::cli::format_number(100.0) == "100.0");
  CHECK(ckg::cli::format_number(-1.0) == "-1.0");
  CHECK(ckg::cli::format_number(0.25) == "0.25");
  CHECK(ckg::cli::format_number(std::nan("")) == "NA");
}

TEST_CASE("enrich from stdin") {
  auto r = run(enrich_args(),
               "People in cities usually buy apples in the local markets.\nRun quickly!\n");
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out ==
        "People (citizen) in cities (settlement) usually buy apples (fruit) in the local markets "
        "(supermarket).\nRun quickly!\n");

  auto empty = run(enrich_args(), "");
  CHECK(empty.code == 0);
  CHECK(empty.out.empty());
}

TEST_CASE("enrich with files, threads and a score floor") {
  TempDir dir("cli_enrich");
  auto in = dir.write("in.txt", "I like apples.\n");
  auto args = enrich_args();
  args.insert(args.end(), {"--input", in.string(), "--output", (dir / "out.txt").string(),
                           "--threads", "3"});
  auto r = run(args);
  CHECK(r.code == 0);
  CHECK(read_file(dir / "out.txt") == "I like apples (fruit).\n");

  auto floor = enrich_args();
  floor.insert(floor.end(), {"--min-score", "1.5"});
  CHECK(run(floor, "I like apples.\n").out == "I like apples.\n");
}

TEST_CASE("enrich pre-tagged input") {
  auto args = enrich_args();
  args.push_back("--pretagged");
  auto r = run(args, "I\tPRP\nlike\tVBP\napples\tNNS\n");
  CHECK(r.code == 0);
  CHECK(r.out == "I like apples (fruit)\n");
}

TEST_CASE("enrich argument errors") {
  auto r = run({"enrich", "--embeddings", fixture("embeddings.txt").string(), "--lexicon",
                fixture("lexicon.tsv").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("--kg") != std::string::npos);

  auto missing = run({"enrich", "--embeddings", fixture("embeddings.txt").string(), "--kg",
                      fixture("kg.tsv").string(), "--lexicon", "/nonexistent/lexicon.tsv"});
  CHECK(missing.code == 1);
  CHECK_FALSE(missing.err.empty());

  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
}

TEST_CASE("train writes deterministic artifacts") {
  TempDir a("cli_train_a"), b("cli_train_b");
  const std::string corpus = fixture("toy_corpus.txt").string();
  auto common = [&](const TempDir& d) {
    return std::vector<std::string>{"train", "--input", corpus, "--output", d.path().string(),
                                    "--epochs", "3", "--seed", "5", "--embed-dim", "4",
                                    "--hidden-dim", "4"};
  };
  auto ra = run(common(a));
  auto rb = run(common(b));
  REQUIRE(ra.code == 0);
  REQUIRE(rb.code == 0);
  CHECK(ra.err.empty());
  CHECK(ra.out == rb.out);
  CHECK(ra.out.find("sentences\t50\n") != std::string::npos);
  CHECK(read_file(a / "trace.tsv") == read_file(b / "trace.tsv"));
  CHECK(read_file(a / "params.txt") == read_file(b / "params.txt"));
  CHECK(ckg::testing::read_lines(a / "trace.tsv").size() == 4);
  CHECK(read_file(a / "vocab.tsv").starts_with("the\t0\ncat\t1\n"));
}

TEST_CASE("train: zero epochs and bad settings") {
  TempDir d("cli_train_zero");
  auto r = run({"train", "--input", fixture("toy_corpus.txt").string(), "--output",
                d.path().string(), "--epochs", "0"});
  CHECK(r.code == 0);
  CHECK(ckg::testing::read_lines(d / "trace.tsv").size() == 1);

  auto bad = run({"train", "--input", fixture("toy_corpus.txt").string(), "--output",
                  d.path().string(), "--hidden-dim", "0"});
  CHECK(bad.code == 1);
  CHECK_FALSE(bad.err.empty());
  CHECK(bad.out.empty());

  auto empty = run({"train", "--input", "-", "--output", d.path().string()}, "\n\n");
  CHECK(empty.code == 1);
}

TEST_CASE("eval") {
  auto r = run({"eval", "--embeddings", fixture("analogy_exact_embeddings.txt").string(),
                "--analogies", fixture("analogy_exact.txt").string()});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find("average\t100.0\n") != std::string::npos);

  auto s = run({"eval", "--embeddings", fixture("embeddings.txt").string(), "--similarity",
                fixture("similarity_reversed.tsv").string()});
  CHECK(s.code == 0);
  CHECK(s.out.find("spearman\t-1.0\n") != std::string::npos);

  auto none = run({"eval", "--embeddings", fixture("embeddings.txt").string()});
  CHECK(none.code == 1);
  CHECK_FALSE(none.err.empty());
}

TEST_CASE("kg-neighbors") {
  auto r = run({"kg-neighbors", "--kg", fixture("kg.tsv").string(), "--embeddings",
                fixture("embeddings.txt").string(), "--entity", "apple"});
  CHECK(r.code == 0);
  CHECK(r.out.find("neighbor\tfruit\n") != std::string::npos);
  CHECK(r.out.find("candidate\tfruit\t") != std::string::npos);
}
