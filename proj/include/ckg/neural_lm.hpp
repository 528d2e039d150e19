#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace ckg::lm {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using Sentence = std::vector<int>;

struct LmConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 16;
  std::size_t kernel_width = 3;
  std::size_t stride = 2;
  std::size_t hidden_dim = 16;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;
  std::size_t epochs = 10;
  // Global gradient-norm threshold; 0 disables clipping.
  double clip = 0.0;

  // Throws std::invalid_argument on non-positive sizes or a negative rate.
  void validate() const;
};

// Gate blocks are stacked i, f, g, o along the rows.
struct LstmWeights {
  MatrixXd input;      // 4H x D
  MatrixXd recurrent;  // 4H x H
  VectorXd bias;       // 4H
};

struct LmParameters {
  MatrixXd embedding;        // V x D
  MatrixXd kernel;           // (kernel_width * D) x D; tap j is rows [jD, jD+D), out x in
  VectorXd conv_bias;        // D
  LstmWeights forward;
  LstmWeights backward;
  MatrixXd projection;       // V x H, shared by both directions
  VectorXd projection_bias;  // V

  static LmParameters zeros(const LmConfig& config);
  // Uniform in +-scale/sqrt(fan_in) per tensor, biases zero.
  static LmParameters random(const LmConfig& config, std::uint64_t seed, double scale = 0.1);

  // Visits every tensor in a fixed order as (name, MatrixXd& or VectorXd&).
  template <class F>
  void for_each_tensor(F&& f) {
    f(std::string_view("embedding"), embedding);
    f(std::string_view("conv_kernel"), kernel);
    f(std::string_view("conv_bias"), conv_bias);
    f(std::string_view("fwd_input"), forward.input);
    f(std::string_view("fwd_recurrent"), forward.recurrent);
    f(std::string_view("fwd_bias"), forward.bias);
    f(std::string_view("bwd_input"), backward.input);
    f(std::string_view("bwd_recurrent"), backward.recurrent);
    f(std::string_view("bwd_bias"), backward.bias);
    f(std::string_view("projection"), projection);
    f(std::string_view("projection_bias"), projection_bias);
  }
  template <class F>
  void for_each_tensor(F&& f) const {
    const_cast<LmParameters*>(this)->for_each_tensor(
        [&](std::string_view name, const auto& t) { f(name, t); });
  }

  bool all_finite() const;
};

// Max-subtracted; entries sum to 1.
VectorXd softmax(const VectorXd& logits);
double log_softmax_at(const VectorXd& logits, int target);

std::size_t reduced_length(std::size_t n, std::size_t kernel_width, std::size_t stride);

// c_k = tanh(sum_j K_j x_{k*stride + j} + b). Throws std::invalid_argument
// when the sequence is shorter than the kernel.
std::vector<VectorXd> conv1d_reduce(const std::vector<VectorXd>& embedded,
                                    const LmParameters& params, std::size_t stride);

struct LstmStep {
  VectorXd i, f, g, o, c, h;
};

struct BiEncoding {
  // Indexed by position; backward[k] is the right-to-left state after
  // consuming positions m-1 .. k.
  std::vector<LstmStep> forward;
  std::vector<LstmStep> backward;
  // h_k = forward h + backward h.
  std::vector<VectorXd> combined;
};

LstmStep lstm_cell(const LstmWeights& w, const VectorXd& x, const VectorXd& h_prev,
                   const VectorXd& c_prev);

BiEncoding bilstm_encode(const std::vector<VectorXd>& reduced, const LmParameters& params);

// Target token for each reduced position: the receptive-field center.
std::vector<int> reduced_targets(const Sentence& tokens, std::size_t kernel_width,
                                 std::size_t stride);

// Mean over positions of log p_fwd(t_k | forward state k-1) +
// log p_bwd(t_k | backward state k+1); out-of-range states are zero.
double lm_objective(const BiEncoding& encoding, const std::vector<int>& fwd_targets,
                    const std::vector<int>& bwd_targets, const LmParameters& params);

// Full pipeline for one sentence.
double sentence_objective(const Sentence& tokens, const LmConfig& config,
                          const LmParameters& params);

// Position-weighted mean over the batch; the quantity training maximizes.
double batch_objective(const std::vector<Sentence>& batch, const LmConfig& config,
                       const LmParameters& params);

// Gradient of the negated batch objective, shaped like the parameters.
LmParameters gradients(const std::vector<Sentence>& batch, const LmConfig& config,
                       const LmParameters& params);

struct TrainTrace {
  std::vector<double> objective;  // [0] before training, [e] after epoch e
  double final_perplexity = 0.0;
};

struct TrainResult {
  LmParameters params;
  TrainTrace trace;
  std::size_t skipped = 0;  // sentences shorter than the kernel
};

// Online gradient ascent over sentences in corpus order. Throws
// std::invalid_argument if no sentence is long enough.
TrainResult train(const std::vector<Sentence>& corpus, const LmConfig& config);

// exp(-mean forward log-probability); sentences shorter than the kernel are
// ignored. Throws std::invalid_argument if nothing is scoreable.
double perplexity(const std::vector<Sentence>& corpus, const LmConfig& config,
                  const LmParameters& params);

class Vocabulary {
 public:
  // Ids are assigned in first-occurrence order.
  int add(const std::string& token);
  // -1 when absent.
  int id(const std::string& token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }

  void write(std::ostream& out) const;  // token TAB id

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

struct Corpus {
  Vocabulary vocab;
  std::vector<Sentence> sentences;
};

// One sentence per line, whitespace-tokenized; blank lines are skipped.
Corpus read_corpus(std::istream& in);

// Per tensor: `name rows cols`, then rows of space-separated values.
// Vectors are written as a single row.
void write_parameters(std::ostream& out, const LmParameters& params);
LmParameters read_parameters(std::istream& in, const LmConfig& config);

void write_trace(std::ostream& out, const TrainTrace& trace);

}  // namespace ckg::lm
