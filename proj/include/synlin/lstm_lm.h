// Stacked LSTM word language model.
//
// Each layer i at step t maps (h[t][i-1], h[t-1][i]) through one 4n x 2n
// weight block to the gates (i, f, o, g) = (sigm, sigm, sigm, tanh), then
//   c = f * c_prev + i * g,   h = o * tanh(c).
// h[t][0] is the input embedding of the word at t, so embeddings are n wide.
// The next word is scored by a softmax over v_j . h[t][top]. Gate biases are
// off by default and available through LmConfig::gate_bias.
//
// Vocabulary: the word ids of the owning Indexers, followed by <s> and </s>.

#ifndef SYNLIN_LSTM_LM_H_
#define SYNLIN_LSTM_LM_H_

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "synlin/corpus.h"
#include "synlin/errors.h"
#include "synlin/grad_check.h"
#include "synlin/random.h"
#include "synlin/tensor.h"

namespace synlin {

struct LmConfig {
  int layers = 2;
  int units = 128;
  double dropout = 0.5;
  double learning_rate = 0.1;
  int epochs = 10;
  int batch_size = 1;  // sentences per update
  std::uint64_t seed = 1;
  double init_range = 0.1;
  bool gate_bias = false;
  double adagrad_epsilon = 1e-8;

  void Validate() const;
};

struct LmParams {
  int layers = 0;
  int units = 0;
  int vocab_size = 0;  // including <s> and </s>
  bool gate_bias = false;
  Matrix embed;                // units x V
  std::vector<Matrix> gates;   // per layer, 4 units x 2 units
  std::vector<Matrix> biases;  // per layer, 4 units x 1; empty when disabled
  Matrix output;               // V x units, row j is v_j

  int bos() const { return vocab_size - 2; }
  int eos() const { return vocab_size - 1; }

  static LmParams Zeros(int num_words, const LmConfig &config);
  static LmParams Random(int num_words, const LmConfig &config, Rng *rng);

  TensorList Tensors();
  void CheckShapes() const;
};

// Per-layer (h, c) after consuming `length` inputs. Plain value; stepping
// never modifies the source state.
struct LmState {
  std::vector<Vector> h;
  std::vector<Vector> c;
  int length = 0;

  const Vector &top() const { return h.back(); }
};

// One LSTM layer step. `bias` may be null. Throws ConfigError on width
// mismatch.
std::pair<Vector, Vector> LstmCell(const Matrix &weights, const Vector *bias,
                                   const Vector &h_below, const Vector &h_prev,
                                   const Vector &c_prev);

LmState LmInitialState(const LmParams &params);

// Feeds `word` (an LM vocabulary id) through all layers; top() of the result
// is the top-layer output.
LmState LmStep(const LmParams &params, const LmState &state, int word);

// State after consuming <s>.
LmState LmStartState(const LmParams &params);

// log softmax of v_j . h_top over the whole vocabulary.
Vector LmFullLogProbs(const LmParams &params, const LmState &state);

// log softmax restricted to `candidates` (one entry per candidate, aligned
// with the input; repeated ids are scored independently).
std::vector<double> LmLogProbs(const LmParams &params, const LmState &state,
                               std::span<const int> candidates);

// Sentences as LM ids, without <s> / </s>.
using LmCorpus = std::vector<std::vector<int>>;
LmCorpus EncodeForLm(const Indexers &indexers, const std::vector<DepSentence> &corpus);

// Sum over sentences of -log p(w_1..w_n, </s> | <s>), full-vocabulary
// softmax, no dropout.
double LmLoss(const LmParams &params, const LmCorpus &sentences);

// Loss and gradient (overwrites `grads`). Dropout on layer outputs when rng
// is non-null and dropout > 0. `num_targets` receives the predicted token
// count when non-null.
double LmLossAndGradient(const LmParams &params, const LmCorpus &sentences, double dropout,
                         Rng *rng, LmParams *grads, long *num_targets = nullptr);

double LmPerplexity(const LmParams &params, const LmCorpus &sentences);

struct LmEpochStats {
  int epoch = 0;
  double perplexity = 0.0;  // over the epoch's training updates
};

std::vector<LmEpochStats> TrainLm(LmParams *params, LmCorpus sentences, const LmConfig &config,
                                  const std::function<void(const LmEpochStats &)> &on_epoch = {});

GradCheckReport LmGradCheck(const LmParams &params, const LmCorpus &sentences, double epsilon,
                            int samples, std::uint64_t seed);

}  // namespace synlin

#endif  // SYNLIN_LSTM_LM_H_
