#include "ckg/neural_lm.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "ckg/error.hpp"

namespace ckg::lm {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_targets(const std::vector<int>& targets, std::size_t vocab) {
  for (int t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab) {
      throw std::invalid_argument("target id " + std::to_string(t) + " outside vocabulary of " +
                                  std::to_string(vocab));
    }
  }
}

LstmWeights lstm_zeros(std::size_t in, std::size_t hidden) {
  const auto h = static_cast<Eigen::Index>(hidden);
  return {MatrixXd::Zero(4 * h, static_cast<Eigen::Index>(in)), MatrixXd::Zero(4 * h, h),
          VectorXd::Zero(4 * h)};
}

std::vector<VectorXd> embed(const Sentence& tokens, const LmParameters& params) {
  std::vector<VectorXd> out;
  out.reserve(tokens.size());
  for (int t : tokens) {
    if (t < 0 || t >= params.embedding.rows()) {
      throw std::invalid_argument("token id " + std::to_string(t) + " outside vocabulary");
    }
    out.push_back(params.embedding.row(t).transpose());
  }
  return out;
}

// Runs a cell over `inputs` in the given order from zero state.
std::vector<LstmStep> run_lstm(const LstmWeights& w, const std::vector<const VectorXd*>& inputs) {
  const auto hidden = w.recurrent.cols();
  VectorXd h = VectorXd::Zero(hidden);
  VectorXd c = VectorXd::Zero(hidden);
  std::vector<LstmStep> steps;
  steps.reserve(inputs.size());
  for (const VectorXd* x : inputs) {
    steps.push_back(lstm_cell(w, *x, h, c));
    h = steps.back().h;
    c = steps.back().c;
  }
  return steps;
}

// Backpropagation through time for a cell run over `inputs` in order.
// dh_ext[t] is the loss gradient arriving at step t's hidden output.
// Accumulates weight gradients into `grad` and returns d(loss)/d(input_t).
std::vector<VectorXd> backprop_lstm(const LstmWeights& w, const std::vector<const VectorXd*>& inputs,
                                    const std::vector<LstmStep>& steps,
                                    const std::vector<VectorXd>& dh_ext, LstmWeights& grad) {
  const auto hidden = w.recurrent.cols();
  const std::size_t n = steps.size();
  std::vector<VectorXd> dx(n);
  VectorXd dh_next = VectorXd::Zero(hidden);
  VectorXd dc_next = VectorXd::Zero(hidden);
  const VectorXd zero = VectorXd::Zero(hidden);
  VectorXd dz(4 * hidden);
  for (std::size_t t = n; t-- > 0;) {
    const LstmStep& s = steps[t];
    const VectorXd& c_prev = t > 0 ? steps[t - 1].c : zero;
    const VectorXd& h_prev = t > 0 ? steps[t - 1].h : zero;

    const VectorXd dh = dh_ext[t] + dh_next;
    const VectorXd tc = s.c.array().tanh();
    const VectorXd d_o = dh.cwiseProduct(tc);
    const VectorXd dc =
        (dh.array() * s.o.array() * (1.0 - tc.array().square())).matrix() + dc_next;

    dz.segment(0, hidden) = (dc.array() * s.g.array() * s.i.array() * (1.0 - s.i.array())).matrix();
    dz.segment(hidden, hidden) =
        (dc.array() * c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
    dz.segment(2 * hidden, hidden) =
        (dc.array() * s.i.array() * (1.0 - s.g.array().square())).matrix();
    dz.segment(3 * hidden, hidden) =
        (d_o.array() * s.o.array() * (1.0 - s.o.array())).matrix();

    grad.input.noalias() += dz * inputs[t]->transpose();
    grad.recurrent.noalias() += dz * h_prev.transpose();
    grad.bias += dz;

    dx[t] = w.input.transpose() * dz;
    dh_next = w.recurrent.transpose() * dz;
    dc_next = dc.cwiseProduct(s.f);
  }
  return dx;
}

struct SentenceGrad {
  double objective_sum = 0.0;  // sum over positions, not the mean
  std::size_t positions = 0;
};

// Forward pass plus, when `grad` is non-null, backprop of
// -(1/normalizer) * sum of log-probabilities.
SentenceGrad accumulate(const Sentence& tokens, const LmConfig& config, const LmParameters& params,
                        LmParameters* grad, double normalizer) {
  const auto embedded = embed(tokens, params);
  const auto reduced = conv1d_reduce(embedded, params, config.stride);
  const auto enc = bilstm_encode(reduced, params);
  const auto targets = reduced_targets(tokens, config.kernel_width, config.stride);
  const std::size_t m = reduced.size();
  const auto hidden = params.projection.cols();
  const VectorXd zero = VectorXd::Zero(hidden);

  SentenceGrad out;
  out.positions = m;
  std::vector<VectorXd> dh_fwd(m, VectorXd::Zero(hidden));
  std::vector<VectorXd> dh_bwd(m, VectorXd::Zero(hidden));

  for (std::size_t k = 0; k < m; ++k) {
    const VectorXd& hf = k > 0 ? enc.forward[k - 1].h : zero;
    const VectorXd& hb = k + 1 < m ? enc.backward[k + 1].h : zero;
    for (int dir = 0; dir < 2; ++dir) {
      const VectorXd& h = dir == 0 ? hf : hb;
      const VectorXd logits = params.projection * h + params.projection_bias;
      out.objective_sum += log_softmax_at(logits, targets[k]);
      if (grad == nullptr) continue;
      VectorXd dlogits = softmax(logits);
      dlogits(targets[k]) -= 1.0;
      dlogits /= normalizer;
      grad->projection.noalias() += dlogits * h.transpose();
      grad->projection_bias += dlogits;
      if (dir == 0 && k > 0) dh_fwd[k - 1].noalias() += params.projection.transpose() * dlogits;
      if (dir == 1 && k + 1 < m) dh_bwd[k + 1].noalias() += params.projection.transpose() * dlogits;
    }
  }
  if (grad == nullptr) return out;

  // Forward direction processes positions 0..m-1, backward m-1..0.
  std::vector<const VectorXd*> fwd_in, bwd_in;
  std::vector<LstmStep> bwd_steps;
  std::vector<VectorXd> bwd_dh;
  for (std::size_t k = 0; k < m; ++k) fwd_in.push_back(&reduced[k]);
  for (std::size_t k = m; k-- > 0;) {
    bwd_in.push_back(&reduced[k]);
    bwd_steps.push_back(enc.backward[k]);
    bwd_dh.push_back(dh_bwd[k]);
  }
  const auto dc_f = backprop_lstm(params.forward, fwd_in, enc.forward, dh_fwd, grad->forward);
  const auto dc_b = backprop_lstm(params.backward, bwd_in, bwd_steps, bwd_dh, grad->backward);

  const auto dim = params.embedding.cols();
  for (std::size_t k = 0; k < m; ++k) {
    const VectorXd dc = dc_f[k] + dc_b[m - 1 - k];
    const VectorXd da = dc.array() * (1.0 - reduced[k].array().square());
    grad->conv_bias += da;
    for (std::size_t j = 0; j < config.kernel_width; ++j) {
      const std::size_t src = k * config.stride + j;
      const auto row0 = static_cast<Eigen::Index>(j) * dim;
      grad->kernel.block(row0, 0, dim, dim).noalias() += da * embedded[src].transpose();
      grad->embedding.row(tokens[src]).noalias() +=
          (params.kernel.block(row0, 0, dim, dim).transpose() * da).transpose();
    }
  }
  return out;
}

double global_norm(const LmParameters& g) {
  double sq = 0.0;
  g.for_each_tensor([&](std::string_view, const auto& t) { sq += t.squaredNorm(); });
  return std::sqrt(sq);
}

}  // namespace

double log_softmax_at(const VectorXd& logits, int target) {
  const double mx = logits.maxCoeff();
  const double lse = mx + std::log((logits.array() - mx).exp().sum());
  return logits(target) - lse;
}

VectorXd softmax(const VectorXd& logits) {
  VectorXd e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

void LmConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(vocab_size > 0, "vocab_size must be positive");
  require(embed_dim > 0, "embed_dim must be positive");
  require(kernel_width > 0, "kernel_width must be positive");
  require(stride > 0, "stride must be positive");
  require(hidden_dim > 0, "hidden_dim must be positive");
  require(std::isfinite(learning_rate) && learning_rate >= 0.0,
          "learning_rate must be finite and non-negative");
  require(std::isfinite(clip) && clip >= 0.0, "clip must be finite and non-negative");
}

LmParameters LmParameters::zeros(const LmConfig& config) {
  config.validate();
  const auto V = static_cast<Eigen::Index>(config.vocab_size);
  const auto D = static_cast<Eigen::Index>(config.embed_dim);
  const auto H = static_cast<Eigen::Index>(config.hidden_dim);
  const auto K = static_cast<Eigen::Index>(config.kernel_width);
  LmParameters p;
  p.embedding = MatrixXd::Zero(V, D);
  p.kernel = MatrixXd::Zero(K * D, D);
  p.conv_bias = VectorXd::Zero(D);
  p.forward = lstm_zeros(config.embed_dim, config.hidden_dim);
  p.backward = lstm_zeros(config.embed_dim, config.hidden_dim);
  p.projection = MatrixXd::Zero(V, H);
  p.projection_bias = VectorXd::Zero(V);
  return p;
}

LmParameters LmParameters::random(const LmConfig& config, std::uint64_t seed, double scale) {
  LmParameters p = zeros(config);
  std::mt19937_64 rng(seed);
  auto fill = [&](MatrixXd& m, std::size_t fan_in) {
    const double a = scale / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-a, a);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = dist(rng);
  };
  fill(p.embedding, config.embed_dim);
  fill(p.kernel, config.kernel_width * config.embed_dim);
  fill(p.forward.input, config.embed_dim);
  fill(p.forward.recurrent, config.hidden_dim);
  fill(p.backward.input, config.embed_dim);
  fill(p.backward.recurrent, config.hidden_dim);
  fill(p.projection, config.hidden_dim);
  return p;
}

bool LmParameters::all_finite() const {
  bool ok = true;
  for_each_tensor([&](std::string_view, const auto& t) { ok = ok && t.allFinite(); });
  return ok;
}

std::size_t reduced_length(std::size_t n, std::size_t kernel_width, std::size_t stride) {
  if (kernel_width == 0 || stride == 0) throw std::invalid_argument("kernel and stride must be positive");
  if (n < kernel_width) {
    throw std::invalid_argument("sequence of length " + std::to_string(n) +
                                " is shorter than kernel width " + std::to_string(kernel_width));
  }
  return (n - kernel_width) / stride + 1;
}

std::vector<VectorXd> conv1d_reduce(const std::vector<VectorXd>& embedded,
                                    const LmParameters& params, std::size_t stride) {
  const auto dim = params.conv_bias.size();
  const auto width = static_cast<std::size_t>(params.kernel.rows() / dim);
  const std::size_t m = reduced_length(embedded.size(), width, stride);
  std::vector<VectorXd> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    VectorXd a = params.conv_bias;
    for (std::size_t j = 0; j < width; ++j) {
      a.noalias() += params.kernel.block(static_cast<Eigen::Index>(j) * dim, 0, dim, dim) *
                     embedded[k * stride + j];
    }
    out.push_back(a.array().tanh());
  }
  return out;
}

LstmStep lstm_cell(const LstmWeights& w, const VectorXd& x, const VectorXd& h_prev,
                   const VectorXd& c_prev) {
  const auto H = w.recurrent.cols();
  const VectorXd z = w.input * x + w.recurrent * h_prev + w.bias;
  LstmStep s;
  s.i = z.segment(0, H).unaryExpr(&sigmoid);
  s.f = z.segment(H, H).unaryExpr(&sigmoid);
  s.g = z.segment(2 * H, H).array().tanh();
  s.o = z.segment(3 * H, H).unaryExpr(&sigmoid);
  s.c = s.f.cwiseProduct(c_prev) + s.i.cwiseProduct(s.g);
  s.h = s.o.cwiseProduct(VectorXd(s.c.array().tanh()));
  return s;
}

BiEncoding bilstm_encode(const std::vector<VectorXd>& reduced, const LmParameters& params) {
  if (reduced.empty()) throw std::invalid_argument("bilstm_encode: empty sequence");
  const std::size_t m = reduced.size();
  std::vector<const VectorXd*> fwd_in, bwd_in;
  for (std::size_t k = 0; k < m; ++k) fwd_in.push_back(&reduced[k]);
  for (std::size_t k = m; k-- > 0;) bwd_in.push_back(&reduced[k]);

  BiEncoding enc;
  enc.forward = run_lstm(params.forward, fwd_in);
  auto bwd = run_lstm(params.backward, bwd_in);
  enc.backward.assign(bwd.rbegin(), bwd.rend());
  for (std::size_t k = 0; k < m; ++k) enc.combined.push_back(enc.forward[k].h + enc.backward[k].h);
  return enc;
}

std::vector<int> reduced_targets(const Sentence& tokens, std::size_t kernel_width,
                                 std::size_t stride) {
  const std::size_t m = reduced_length(tokens.size(), kernel_width, stride);
  std::vector<int> out;
  out.reserve(m);
  for (std::size_t k = 0; k < m; ++k) out.push_back(tokens[k * stride + kernel_width / 2]);
  return out;
}

double lm_objective(const BiEncoding& encoding, const std::vector<int>& fwd_targets,
                    const std::vector<int>& bwd_targets, const LmParameters& params) {
  const std::size_t m = encoding.forward.size();
  if (fwd_targets.size() != m || bwd_targets.size() != m || encoding.backward.size() != m) {
    throw std::invalid_argument("lm_objective: targets do not align with positions");
  }
  const auto vocab = static_cast<std::size_t>(params.projection.rows());
  check_targets(fwd_targets, vocab);
  check_targets(bwd_targets, vocab);
  const VectorXd zero = VectorXd::Zero(params.projection.cols());
  double sum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    const VectorXd& hf = k > 0 ? encoding.forward[k - 1].h : zero;
    const VectorXd& hb = k + 1 < m ? encoding.backward[k + 1].h : zero;
    sum += log_softmax_at(params.projection * hf + params.projection_bias, fwd_targets[k]);
    sum += log_softmax_at(params.projection * hb + params.projection_bias, bwd_targets[k]);
  }
  return sum / static_cast<double>(m);
}

double sentence_objective(const Sentence& tokens, const LmConfig& config,
                          const LmParameters& params) {
  const auto r = accumulate(tokens, config, params, nullptr, 1.0);
  return r.objective_sum / static_cast<double>(r.positions);
}

namespace {

std::size_t total_positions(const std::vector<Sentence>& batch, const LmConfig& config) {
  std::size_t total = 0;
  for (const auto& s : batch) total += reduced_length(s.size(), config.kernel_width, config.stride);
  if (total == 0) throw std::invalid_argument("empty batch");
  return total;
}

}  // namespace

double batch_objective(const std::vector<Sentence>& batch, const LmConfig& config,
                       const LmParameters& params) {
  const std::size_t total = total_positions(batch, config);
  double sum = 0.0;
  for (const auto& s : batch) sum += accumulate(s, config, params, nullptr, 1.0).objective_sum;
  return sum / static_cast<double>(total);
}

LmParameters gradients(const std::vector<Sentence>& batch, const LmConfig& config,
                       const LmParameters& params) {
  const std::size_t total = total_positions(batch, config);
  LmParameters grad = LmParameters::zeros(config);
  for (const auto& s : batch) accumulate(s, config, params, &grad, static_cast<double>(total));
  return grad;
}

TrainResult train(const std::vector<Sentence>& corpus, const LmConfig& config) {
  config.validate();
  if (corpus.empty()) throw std::invalid_argument("train: empty corpus");
  TrainResult result;
  std::vector<Sentence> usable;
  for (const auto& s : corpus) {
    if (s.size() < config.kernel_width) {
      ++result.skipped;
    } else {
      usable.push_back(s);
    }
  }
  if (usable.empty()) throw std::invalid_argument("train: no sentence reaches the kernel width");

  result.params = LmParameters::random(config, config.seed);
  result.trace.objective.push_back(batch_objective(usable, config, result.params));
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& s : usable) {
      LmParameters g = gradients({s}, config, result.params);
      double step = config.learning_rate;
      if (config.clip > 0.0) {
        const double n = global_norm(g);
        if (n > config.clip) step *= config.clip / n;
      }
      LmParameters& p = result.params;
      p.embedding -= step * g.embedding;
      p.kernel -= step * g.kernel;
      p.conv_bias -= step * g.conv_bias;
      for (auto [w, gw] : {std::pair{&p.forward, &g.forward}, std::pair{&p.backward, &g.backward}}) {
        w->input -= step * gw->input;
        w->recurrent -= step * gw->recurrent;
        w->bias -= step * gw->bias;
      }
      p.projection -= step * g.projection;
      p.projection_bias -= step * g.projection_bias;
    }
    if (!result.params.all_finite()) throw std::runtime_error("train: parameters diverged");
    result.trace.objective.push_back(batch_objective(usable, config, result.params));
  }
  result.trace.final_perplexity = perplexity(usable, config, result.params);
  return result;
}

double perplexity(const std::vector<Sentence>& corpus, const LmConfig& config,
                  const LmParameters& params) {
  double log_prob = 0.0;
  std::size_t count = 0;
  const VectorXd zero = VectorXd::Zero(params.projection.cols());
  for (const auto& s : corpus) {
    if (s.size() < config.kernel_width) continue;
    const auto enc = bilstm_encode(conv1d_reduce(embed(s, params), params, config.stride), params);
    const auto targets = reduced_targets(s, config.kernel_width, config.stride);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const VectorXd& hf = k > 0 ? enc.forward[k - 1].h : zero;
      log_prob += log_softmax_at(params.projection * hf + params.projection_bias, targets[k]);
      ++count;
    }
  }
  if (count == 0) throw std::invalid_argument("perplexity: empty corpus");
  return std::exp(-log_prob / static_cast<double>(count));
}

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, static_cast<int>(tokens_.size()));
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocabulary::id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? -1 : it->second;
}

void Vocabulary::write(std::ostream& out) const {
  for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << '\t' << i << '\n';
}

Corpus read_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    Sentence s;
    for (std::string w; words >> w;) s.push_back(corpus.vocab.add(w));
    if (!s.empty()) corpus.sentences.push_back(std::move(s));
  }
  return corpus;
}

void write_parameters(std::ostream& out, const LmParameters& params) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  params.for_each_tensor([&](std::string_view name, const auto& t) {
    constexpr bool is_vector = std::is_same_v<std::decay_t<decltype(t)>, VectorXd>;
    const auto rows = is_vector ? 1 : t.rows();
    const auto cols = is_vector ? t.rows() : t.cols();
    out << name << ' ' << rows << ' ' << cols << '\n';
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (c > 0) out << ' ';
        out << (is_vector ? t(c) : t(r, c));
      }
      out << '\n';
    }
  });
}

LmParameters read_parameters(std::istream& in, const LmConfig& config) {
  LmParameters params = LmParameters::zeros(config);
  params.for_each_tensor([&](std::string_view name, auto& t) {
    std::string got;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> got >> rows >> cols) || got != name) {
      throw ParseError("<parameters>", 0, "expected tensor header for " + std::string(name));
    }
    if (rows * cols != t.size()) {
      throw ParseError("<parameters>", 0, "shape mismatch for " + std::string(name));
    }
    constexpr bool is_vector = std::is_same_v<std::decay_t<decltype(t)>, VectorXd>;
    if (is_vector && rows != 1) {
      throw ParseError("<parameters>", 0, "expected a single row for " + std::string(name));
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        double v = 0.0;
        if (!(in >> v)) throw ParseError("<parameters>", 0, "truncated tensor " + std::string(name));
        if (is_vector) t(c) = v; else t(r, c) = v;
      }
    }
  });
  return params;
}

void write_trace(std::ostream& out, const TrainTrace& trace) {
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t e = 0; e < trace.objective.size(); ++e) {
    out << e << '\t' << trace.objective[e] << '\n';
  }
}

}  // namespace ckg::lm
