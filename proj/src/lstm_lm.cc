#include "synlin/lstm_lm.h"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace synlin {
namespace {

Vector Sigmoid(const Vector &z) { return (1.0 + (-z.array()).exp()).inverse(); }

double LogSumExp(const Vector &z) {
  const double top = z.maxCoeff();
  return top + std::log((z.array() - top).exp().sum());
}

// Everything a backward pass needs from one layer at one step.
struct CellTrace {
  Vector input;   // [h_below; h_prev]
  Vector i, f, o, g;
  Vector c_prev;
  Vector c;
  Vector tanh_c;
  Vector h;
  Vector mask;    // dropout multipliers on h going up; empty when inactive
  Vector h_up;    // h * mask
};

CellTrace RunCell(const Matrix &weights, const Vector *bias, const Vector &h_below,
                  const Vector &h_prev, const Vector &c_prev) {
  const Eigen::Index n = h_prev.size();
  if (h_below.size() != n || c_prev.size() != n || weights.rows() != 4 * n ||
      weights.cols() != 2 * n || (bias != nullptr && bias->size() != 4 * n)) {
    throw ConfigError("LSTM cell width mismatch");
  }
  CellTrace trace;
  trace.input.resize(2 * n);
  trace.input << h_below, h_prev;
  Vector z = weights * trace.input;
  if (bias != nullptr) z += *bias;
  trace.i = Sigmoid(z.segment(0, n));
  trace.f = Sigmoid(z.segment(n, n));
  trace.o = Sigmoid(z.segment(2 * n, n));
  trace.g = z.segment(3 * n, n).array().tanh();
  trace.c_prev = c_prev;
  trace.c = trace.f.cwiseProduct(c_prev) + trace.i.cwiseProduct(trace.g);
  trace.tanh_c = trace.c.array().tanh();
  trace.h = trace.o.cwiseProduct(trace.tanh_c);
  return trace;
}

}  // namespace

void LmConfig::Validate() const {
  if (layers <= 0 || units <= 0) throw ConfigError("LM layers and units must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("LM dropout must be in [0, 1)");
  if (epochs < 0 || batch_size <= 0) throw ConfigError("bad LM epochs / batch_size");
  if (learning_rate < 0.0) throw ConfigError("LM learning_rate must be >= 0");
}

LmParams LmParams::Zeros(int num_words, const LmConfig &config) {
  config.Validate();
  LmParams p;
  p.layers = config.layers;
  p.units = config.units;
  p.vocab_size = num_words + 2;
  p.gate_bias = config.gate_bias;
  const int n = config.units;
  p.embed = Matrix::Zero(n, p.vocab_size);
  for (int l = 0; l < p.layers; ++l) {
    p.gates.push_back(Matrix::Zero(4 * n, 2 * n));
    if (p.gate_bias) p.biases.push_back(Matrix::Zero(4 * n, 1));
  }
  p.output = Matrix::Zero(p.vocab_size, n);
  return p;
}

LmParams LmParams::Random(int num_words, const LmConfig &config, Rng *rng) {
  LmParams p = Zeros(num_words, config);
  TensorList tensors = p.Tensors();
  tensors.erase(std::remove_if(tensors.begin(), tensors.end(),
                               [](const NamedTensor &t) {
                                 return t.name.find(".b") != std::string::npos;
                               }),
                tensors.end());
  FillUniform(tensors, config.init_range, rng);
  return p;
}

TensorList LmParams::Tensors() {
  TensorList list{{"lm.embed", &embed}};
  for (int l = 0; l < layers; ++l) {
    list.push_back({"lm.layer" + std::to_string(l) + ".W", &gates[l]});
    if (gate_bias) list.push_back({"lm.layer" + std::to_string(l) + ".b", &biases[l]});
  }
  list.push_back({"lm.output", &output});
  return list;
}

void LmParams::CheckShapes() const {
  const int n = units;
  bool ok = layers > 0 && n > 0 && vocab_size >= 2 && embed.rows() == n &&
            embed.cols() == vocab_size && output.rows() == vocab_size && output.cols() == n &&
            static_cast<int>(gates.size()) == layers &&
            static_cast<int>(biases.size()) == (gate_bias ? layers : 0);
  for (const Matrix &w : gates) ok = ok && w.rows() == 4 * n && w.cols() == 2 * n;
  for (const Matrix &b : biases) ok = ok && b.rows() == 4 * n && b.cols() == 1;
  if (!ok) throw std::invalid_argument("LM tensors do not match their declared shape");
}

std::pair<Vector, Vector> LstmCell(const Matrix &weights, const Vector *bias,
                                   const Vector &h_below, const Vector &h_prev,
                                   const Vector &c_prev) {
  CellTrace trace = RunCell(weights, bias, h_below, h_prev, c_prev);
  return {std::move(trace.h), std::move(trace.c)};
}

LmState LmInitialState(const LmParams &params) {
  LmState state;
  state.h.assign(params.layers, Vector::Zero(params.units));
  state.c.assign(params.layers, Vector::Zero(params.units));
  return state;
}

LmState LmStep(const LmParams &params, const LmState &state, int word) {
  if (word < 0 || word >= params.vocab_size) throw ConfigError("LM word id out of range");
  LmState next;
  next.h.reserve(params.layers);
  next.c.reserve(params.layers);
  Vector below = params.embed.col(word);
  for (int l = 0; l < params.layers; ++l) {
    Vector bias;
    if (params.gate_bias) bias = params.biases[l].col(0);
    auto [h, c] = LstmCell(params.gates[l], params.gate_bias ? &bias : nullptr, below,
                           state.h[l], state.c[l]);
    below = h;
    next.h.push_back(std::move(h));
    next.c.push_back(std::move(c));
  }
  next.length = state.length + 1;
  return next;
}

LmState LmStartState(const LmParams &params) {
  return LmStep(params, LmInitialState(params), params.bos());
}

Vector LmFullLogProbs(const LmParams &params, const LmState &state) {
  Vector logits = params.output * state.top();
  return logits.array() - LogSumExp(logits);
}

std::vector<double> LmLogProbs(const LmParams &params, const LmState &state,
                               std::span<const int> candidates) {
  if (candidates.empty()) throw std::invalid_argument("empty candidate set");
  Vector logits(static_cast<Eigen::Index>(candidates.size()));
  for (size_t k = 0; k < candidates.size(); ++k) {
    if (candidates[k] < 0 || candidates[k] >= params.vocab_size) {
      throw ConfigError("LM candidate id out of range");
    }
    logits[k] = params.output.row(candidates[k]).dot(state.top());
  }
  const double norm = LogSumExp(logits);
  std::vector<double> out(candidates.size());
  for (size_t k = 0; k < candidates.size(); ++k) out[k] = logits[k] - norm;
  return out;
}

LmCorpus EncodeForLm(const Indexers &indexers, const std::vector<DepSentence> &corpus) {
  LmCorpus encoded;
  encoded.reserve(corpus.size());
  for (const DepSentence &sentence : corpus) {
    std::vector<int> ids;
    for (const Token &token : sentence.tokens) ids.push_back(indexers.WordId(token.form));
    encoded.push_back(std::move(ids));
  }
  return encoded;
}

double LmLoss(const LmParams &params, const LmCorpus &sentences) {
  double loss = 0.0;
  for (const std::vector<int> &sentence : sentences) {
    LmState state = LmStartState(params);
    for (size_t t = 0; t <= sentence.size(); ++t) {
      const int target = t < sentence.size() ? sentence[t] : params.eos();
      loss -= LmFullLogProbs(params, state)[target];
      if (t < sentence.size()) state = LmStep(params, state, sentence[t]);
    }
  }
  return loss;
}

double LmPerplexity(const LmParams &params, const LmCorpus &sentences) {
  long targets = 0;
  for (const auto &sentence : sentences) targets += static_cast<long>(sentence.size()) + 1;
  if (targets == 0) return 1.0;
  return std::exp(LmLoss(params, sentences) / static_cast<double>(targets));
}

double LmLossAndGradient(const LmParams &params, const LmCorpus &sentences, double dropout,
                         Rng *rng, LmParams *grads, long *num_targets) {
  const int n = params.units;
  const int layers = params.layers;
  if (grads->vocab_size != params.vocab_size || grads->units != n || grads->layers != layers ||
      grads->gate_bias != params.gate_bias) {
    LmConfig shape;
    shape.layers = layers;
    shape.units = n;
    shape.gate_bias = params.gate_bias;
    shape.dropout = 0.0;
    *grads = LmParams::Zeros(params.vocab_size - 2, shape);
  }
  SetZero(grads->Tensors());
  const bool use_dropout = rng != nullptr && dropout > 0.0;

  std::vector<Vector> biases(layers);
  for (int l = 0; l < layers && params.gate_bias; ++l) biases[l] = params.biases[l].col(0);

  double loss = 0.0;
  long targets = 0;
  for (const std::vector<int> &sentence : sentences) {
    // Inputs: <s> w1 .. wn; targets: w1 .. wn </s>.
    const int steps = static_cast<int>(sentence.size()) + 1;
    std::vector<int> inputs{params.bos()};
    inputs.insert(inputs.end(), sentence.begin(), sentence.end());
    std::vector<int> outputs(sentence.begin(), sentence.end());
    outputs.push_back(params.eos());

    std::vector<std::vector<CellTrace>> trace(steps);
    std::vector<Vector> probs(steps);
    std::vector<Vector> h_prev(layers, Vector::Zero(n));
    std::vector<Vector> c_prev(layers, Vector::Zero(n));
    for (int t = 0; t < steps; ++t) {
      if (inputs[t] < 0 || inputs[t] >= params.vocab_size) {
        throw ConfigError("LM word id out of range");
      }
      Vector below = params.embed.col(inputs[t]);
      for (int l = 0; l < layers; ++l) {
        CellTrace cell = RunCell(params.gates[l], params.gate_bias ? &biases[l] : nullptr, below,
                                 h_prev[l], c_prev[l]);
        if (use_dropout) {
          cell.mask.resize(n);
          for (int k = 0; k < n; ++k) {
            cell.mask[k] = rng->Uniform() < dropout ? 0.0 : 1.0 / (1.0 - dropout);
          }
          cell.h_up = cell.h.cwiseProduct(cell.mask);
        } else {
          cell.h_up = cell.h;
        }
        h_prev[l] = cell.h;
        c_prev[l] = cell.c;
        below = cell.h_up;
        trace[t].push_back(std::move(cell));
      }
      Vector logits = params.output * below;
      const double norm = LogSumExp(logits);
      loss -= logits[outputs[t]] - norm;
      probs[t] = (logits.array() - norm).exp();
    }
    targets += steps;

    std::vector<Vector> dh_next(layers, Vector::Zero(n));
    std::vector<Vector> dc_next(layers, Vector::Zero(n));
    for (int t = steps - 1; t >= 0; --t) {
      Vector dlogits = probs[t];
      dlogits[outputs[t]] -= 1.0;
      const Vector &top_up = trace[t].back().h_up;
      grads->output.noalias() += dlogits * top_up.transpose();
      Vector d_up = params.output.transpose() * dlogits;
      for (int l = layers - 1; l >= 0; --l) {
        const CellTrace &cell = trace[t][l];
        Vector dh = (cell.mask.size() > 0 ? Vector(d_up.cwiseProduct(cell.mask)) : d_up) +
                    dh_next[l];
        Vector dc = dc_next[l] + Vector(dh.array() * cell.o.array() *
                                        (1.0 - cell.tanh_c.array().square()));
        Vector dz(4 * n);
        dz.segment(0, n) = dc.array() * cell.g.array() * cell.i.array() * (1.0 - cell.i.array());
        dz.segment(n, n) =
            dc.array() * cell.c_prev.array() * cell.f.array() * (1.0 - cell.f.array());
        dz.segment(2 * n, n) =
            dh.array() * cell.tanh_c.array() * cell.o.array() * (1.0 - cell.o.array());
        dz.segment(3 * n, n) = dc.array() * cell.i.array() * (1.0 - cell.g.array().square());
        grads->gates[l].noalias() += dz * cell.input.transpose();
        if (params.gate_bias) grads->biases[l].col(0) += dz;
        Vector dinput = params.gates[l].transpose() * dz;
        dh_next[l] = dinput.segment(n, n);
        dc_next[l] = dc.cwiseProduct(cell.f);
        d_up = dinput.segment(0, n);
      }
      grads->embed.col(inputs[t]) += d_up;
    }
  }
  if (num_targets != nullptr) *num_targets = targets;
  return loss;
}

std::vector<LmEpochStats> TrainLm(LmParams *params, LmCorpus sentences, const LmConfig &config,
                                  const std::function<void(const LmEpochStats &)> &on_epoch) {
  config.Validate();
  params->CheckShapes();
  Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + 2);
  TensorList values = params->Tensors();
  Adagrad optimizer(values, config.learning_rate, config.adagrad_epsilon);
  LmParams grads;
  std::vector<LmEpochStats> log;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(&sentences);
    double total = 0.0;
    long targets = 0;
    for (size_t start = 0; start < sentences.size(); start += config.batch_size) {
      const size_t end = std::min(sentences.size(), start + config.batch_size);
      LmCorpus batch(sentences.begin() + start, sentences.begin() + end);
      long batch_targets = 0;
      double loss = LmLossAndGradient(*params, batch, config.dropout, &rng, &grads,
                                      &batch_targets);
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite LM loss at epoch " << epoch << ", batch starting at sentence "
            << start;
        throw TrainingError(msg.str());
      }
      total += loss;
      targets += batch_targets;
      optimizer.Step(values, grads.Tensors());
    }
    LmEpochStats stats{epoch, targets > 0 ? std::exp(total / targets) : 1.0};
    log.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return log;
}

GradCheckReport LmGradCheck(const LmParams &params, const LmCorpus &sentences, double epsilon,
                            int samples, std::uint64_t seed) {
  LmParams work = params;
  LmParams grads;
  LmLossAndGradient(work, sentences, 0.0, nullptr, &grads);
  return CheckGradients(work.Tensors(), grads.Tensors(),
                        [&]() { return LmLoss(work, sentences); }, epsilon, samples, seed);
}

}  // namespace synlin
