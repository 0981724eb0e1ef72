// Feed-forward action scorer.
//
//   h = tanh(W1w xw + W1t xt + W1l xl + W1lm hlm + b1)
//   p(a | s) = softmax over the feasible actions of (W2 h)_a
//
// xw, xt and xl are concatenated word, POS and label embeddings of the
// feature slots; hlm is the optional top-layer output of a frozen language
// model. W2 has no bias and one row per action of the global inventory, so
// each row doubles as an action embedding.

#ifndef SYNLIN_FFNN_H_
#define SYNLIN_FFNN_H_

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "synlin/errors.h"
#include "synlin/features.h"
#include "synlin/grad_check.h"
#include "synlin/random.h"
#include "synlin/tensor.h"
#include "synlin/transition.h"

namespace synlin {

struct ScorerShape {
  Variant variant = Variant::kFull;
  int num_words = 0;
  int num_pos = 0;
  int num_labels = 0;
  int num_actions = 0;
  int embed_dim = 50;
  int hidden_dim = 200;
  int lm_dim = 0;  // 0 disables the language-model feature block

  static ScorerShape For(const TransitionSystem &system, int embed_dim, int hidden_dim,
                         int lm_dim);
  friend bool operator==(const ScorerShape &, const ScorerShape &) = default;
};

struct LinearizerParams {
  ScorerShape shape;
  Matrix word_embed;     // d x Nw
  Matrix pos_embed;      // d x Nt (empty for light)
  Matrix label_embed;    // d x Nl (empty for light)
  Matrix hidden_word;    // H x 15d
  Matrix hidden_pos;     // H x 15d (empty for light)
  Matrix hidden_label;   // H x 12d (empty for light)
  Matrix hidden_lm;      // H x lm_dim
  Matrix hidden_bias;    // H x 1
  Matrix output;         // |A| x H

  static LinearizerParams Zeros(const ScorerShape &shape);
  // Uniform(-range, range) everywhere except the hidden bias, which is zero.
  static LinearizerParams Random(const ScorerShape &shape, double range, Rng *rng);

  TensorList Tensors();
  // Throws std::invalid_argument if a tensor disagrees with `shape`.
  void CheckShapes() const;
};

// One oracle decision: the state's features, the inventory rows of its
// feasible actions, and the gold row.
struct TrainingExample {
  FeatureVector features;
  std::vector<int> rows;
  int gold_row = -1;
  Vector lm_feature;  // empty unless the scorer has an LM block
};

// Log-probabilities aligned with `rows`. `lm_feature` may be null only when
// the scorer has no LM block. With `rng` non-null and dropout > 0, inverted
// dropout is applied to the hidden layer.
std::vector<double> ScoreActions(const LinearizerParams &params, const FeatureVector &features,
                                 const Vector *lm_feature, std::span<const int> rows,
                                 double dropout = 0.0, Rng *rng = nullptr);

// -sum log p(gold) + l2/2 * ||theta||^2, without dropout. Throws DataError
// when a gold row is not feasible.
double Loss(const LinearizerParams &params, std::span<const TrainingExample> batch, double l2);

// Same objective with dropout (when rng is non-null) and its gradient, which
// is written into `grads` (same shapes as params, overwritten).
double LossAndGradient(const LinearizerParams &params, std::span<const TrainingExample> batch,
                       double l2, double dropout, Rng *rng, LinearizerParams *grads);

struct TrainConfig {
  double learning_rate = 0.01;
  double l2 = 1e-8;
  double dropout = 0.3;
  int epochs = 30;
  int batch_size = 32;
  std::uint64_t seed = 1;
  int embed_dim = 50;
  int hidden_dim = 200;
  double init_range = 0.01;
  double adagrad_epsilon = 1e-8;

  void Validate() const;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;  // summed batch cross-entropy plus final L2 term
  double param_norm = 0.0;
};

// Mini-batch Adagrad over shuffled examples. Returns one entry per epoch.
std::vector<EpochStats> Train(LinearizerParams *params, std::vector<TrainingExample> examples,
                              const TrainConfig &config,
                              const std::function<void(const EpochStats &)> &on_epoch = {});

// Max relative error between the analytic gradient of Loss (no dropout) and
// central differences, over up to `samples` coordinates per tensor.
GradCheckReport FfnnGradCheck(const LinearizerParams &params, std::span<const TrainingExample> batch,
                     double l2, double epsilon, int samples, std::uint64_t seed);

}  // namespace synlin

#endif  // SYNLIN_FFNN_H_
