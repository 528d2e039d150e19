#include "ckg/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "ckg/aggregator.hpp"
#include "ckg/eval.hpp"
#include "ckg/neural_lm.hpp"

namespace ckg::cli {

namespace fs = std::filesystem;

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  std::string s(buf, ptr);
  if (s.find_first_of(".ein") == std::string::npos) s += ".0";
  return s;
}

namespace {

struct EnrichArgs {
  std::string embeddings, kg, lexicon;
  std::string input = "-";
  std::string output = "-";
  std::size_t top_k = 3;
  std::optional<double> min_score;
  std::size_t threads = 0;
  bool pretagged = false;
  std::uint64_t seed = 0;
};

struct TrainArgs {
  std::string input;
  std::string output;
  lm::LmConfig config;
};

struct EvalArgs {
  std::string embeddings;
  std::string analogies, similarity;
};

struct NeighborArgs {
  std::string embeddings, kg, entity;
  std::size_t top_k = 3;
};

// Input is either a file or `-` for the caller's stream.
class InputSource {
 public:
  InputSource(const std::string& path, std::istream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open input '" + path + "'");
      stream_ = &file_;
    }
  }
  std::istream& get() { return *stream_; }

 private:
  std::ifstream file_;
  std::istream* stream_;
};

class OutputSink {
 public:
  OutputSink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output '" + path + "'");
      stream_ = &file_;
    }
  }
  std::ostream& get() { return *stream_; }

 private:
  std::ofstream file_;
  std::ostream* stream_;
};

int cmd_enrich(const EnrichArgs& args, std::istream& in, std::ostream& out) {
  const Resources resources{load_embeddings(args.embeddings), load_triples(args.kg),
                            load_lexicon(args.lexicon)};
  const EnrichOptions options{args.top_k, args.min_score};
  InputSource source(args.input, in);
  OutputSink sink(args.output, out);

  if (args.pretagged) {
    for (const auto& sentence : read_pretagged(source.get(), args.input)) {
      auto ex = extract_tagged(sentence, resources.graph, resources.embeddings, args.top_k);
      sink.get() << enrich(ex, resources, options).rendered << '\n';
    }
    sink.get().flush();
    return 0;
  }

  constexpr std::size_t kBlock = 4096;
  std::vector<std::string> block;
  std::string line;
  auto flush_block = [&] {
    for (const auto& s : enrich_batch(block, resources, options, args.threads)) sink.get() << s << '\n';
    sink.get().flush();
    block.clear();
  };
  // A block closes when full or when no further input is already buffered, so
  // interactive use sees each line as soon as it is enriched.
  while (std::getline(source.get(), line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    block.push_back(line);
    if (block.size() == kBlock || source.get().rdbuf()->in_avail() <= 0) flush_block();
  }
  if (!block.empty()) flush_block();
  return 0;
}

int cmd_train(TrainArgs args, std::istream& in, std::ostream& out) {
  InputSource source(args.input, in);
  const lm::Corpus corpus = lm::read_corpus(source.get());
  if (corpus.sentences.empty()) throw std::runtime_error("corpus is empty");
  args.config.vocab_size = corpus.vocab.size();
  const auto result = lm::train(corpus.sentences, args.config);

  fs::create_directories(args.output);
  auto open = [&](const char* name) {
    std::ofstream f(fs::path(args.output) / name);
    if (!f) throw std::runtime_error("cannot write " + (fs::path(args.output) / name).string());
    return f;
  };
  {
    auto f = open("vocab.tsv");
    corpus.vocab.write(f);
  }
  {
    auto f = open("trace.tsv");
    lm::write_trace(f, result.trace);
  }
  {
    auto f = open("params.txt");
    lm::write_parameters(f, result.params);
  }
  out << "sentences\t" << corpus.sentences.size() << '\n'
      << "skipped_short\t" << result.skipped << '\n'
      << "vocab_size\t" << corpus.vocab.size() << '\n'
      << "initial_objective\t" << format_number(result.trace.objective.front()) << '\n'
      << "final_objective\t" << format_number(result.trace.objective.back()) << '\n'
      << "final_perplexity\t" << format_number(result.trace.final_perplexity) << '\n';
  return 0;
}

int cmd_eval(const EvalArgs& args, std::ostream& out) {
  if (args.analogies.empty() && args.similarity.empty()) {
    throw std::runtime_error("eval needs --analogies and/or --similarity");
  }
  const EmbeddingStore store = load_embeddings(args.embeddings);
  auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string("NA"); };
  if (!args.analogies.empty()) {
    const auto questions = eval::load_analogies(args.analogies);
    const auto r = eval::analogy_accuracy(questions, store);
    out << "semantic\t" << opt(r.semantic) << '\n'
        << "syntactic\t" << opt(r.syntactic) << '\n'
        << "average\t" << opt(r.average) << '\n'
        << "answered\t" << r.answered << '\n';
  }
  if (!args.similarity.empty()) {
    const auto pairs = eval::load_similarity(args.similarity);
    const auto r = eval::similarity_eval(pairs, store);
    out << "spearman\t" << format_number(r.rho) << '\n' << "covered\t" << r.covered << '\n';
  }
  return 0;
}

int cmd_kg_neighbors(const NeighborArgs& args, std::ostream& out) {
  const auto graph = load_triples(args.kg);
  const auto store = load_embeddings(args.embeddings);
  for (const auto& n : graph.one_hop_neighbors(args.entity)) out << "neighbor\t" << n << '\n';
  for (const auto& c : top_k_extensions(graph, store, args.entity, args.top_k)) {
    out << "candidate\t" << c.token << '\t' << format_number(c.score) << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Knowledge-graph sentence enrichment and bidirectional LM toolkit", "ckg"};
  app.require_subcommand(1);

  EnrichArgs enrich_args;
  auto* enrich_cmd = app.add_subcommand("enrich", "Annotate noun entities with KG senses");
  enrich_cmd->add_option("--embeddings", enrich_args.embeddings, "Word vectors")
      ->required()->check(CLI::ExistingFile);
  enrich_cmd->add_option("--kg", enrich_args.kg, "Triples TSV")->required()->check(CLI::ExistingFile);
  enrich_cmd->add_option("--lexicon", enrich_args.lexicon, "POS lexicon TSV")
      ->required()->check(CLI::ExistingFile);
  enrich_cmd->add_option("--input", enrich_args.input, "Sentences, one per line (- for stdin)");
  enrich_cmd->add_option("--output", enrich_args.output, "Destination (- for stdout)");
  enrich_cmd->add_option("--top-k", enrich_args.top_k, "Candidates per entity")
      ->check(CLI::PositiveNumber);
  enrich_cmd->add_option("--min-score", enrich_args.min_score, "Drop selections scoring below");
  enrich_cmd->add_option("--threads", enrich_args.threads, "Worker threads (0 = hardware)");
  enrich_cmd->add_flag("--pretagged", enrich_args.pretagged,
                       "Input is `surface TAB tag` per line, blank line between sentences");
  enrich_cmd->add_option("--seed", enrich_args.seed, "Accepted for uniformity; enrich is deterministic");

  TrainArgs train_args;
  auto& cfg = train_args.config;
  auto* train_cmd = app.add_subcommand("train", "Train the CNN + biLSTM language model");
  train_cmd->add_option("--input", train_args.input, "Corpus, one sentence per line (- for stdin)")
      ->required();
  train_cmd->add_option("--output", train_args.output, "Output directory")->required();
  train_cmd->add_option("--embed-dim", cfg.embed_dim)->check(CLI::PositiveNumber);
  train_cmd->add_option("--kernel-width", cfg.kernel_width)->check(CLI::PositiveNumber);
  train_cmd->add_option("--stride", cfg.stride)->check(CLI::PositiveNumber);
  train_cmd->add_option("--hidden-dim", cfg.hidden_dim)->check(CLI::PositiveNumber);
  train_cmd->add_option("--lr", cfg.learning_rate)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--epochs", cfg.epochs)->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--seed", cfg.seed);
  train_cmd->add_option("--clip", cfg.clip, "Gradient-norm clip, 0 = off")->check(CLI::NonNegativeNumber);

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Word analogy and similarity evaluation");
  eval_cmd->add_option("--embeddings", eval_args.embeddings)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--analogies", eval_args.analogies)->check(CLI::ExistingFile);
  eval_cmd->add_option("--similarity", eval_args.similarity)->check(CLI::ExistingFile);

  NeighborArgs nb_args;
  auto* nb_cmd = app.add_subcommand("kg-neighbors", "Print one-hop neighbors and top-k candidates");
  nb_cmd->add_option("--kg", nb_args.kg)->required()->check(CLI::ExistingFile);
  nb_cmd->add_option("--embeddings", nb_args.embeddings)->required()->check(CLI::ExistingFile);
  nb_cmd->add_option("--entity", nb_args.entity)->required();
  nb_cmd->add_option("--top-k", nb_args.top_k)->check(CLI::PositiveNumber);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    if (*enrich_cmd) return cmd_enrich(enrich_args, in, out);
    if (*train_cmd) return cmd_train(train_args, in, out);
    if (*eval_cmd) return cmd_eval(eval_args, out);
    if (*nb_cmd) return cmd_kg_neighbors(nb_args, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace ckg::cli
