#include "synlin/ffnn.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace synlin {
namespace {

struct Activations {
  Vector word_input;
  Vector pos_input;
  Vector label_input;
  Vector hidden;   // tanh output
  Vector mask;     // inverted-dropout multipliers; empty when inactive
  Vector dropped;  // hidden * mask
  std::vector<double> log_probs;
};

void Gather(const Matrix &embed, const std::vector<int> &ids, int dim, Vector *out) {
  out->resize(static_cast<Eigen::Index>(ids.size()) * dim);
  for (size_t k = 0; k < ids.size(); ++k) {
    const int id = ids[k];
    if (id < 0 || id >= embed.cols()) {
      throw ConfigError("feature id " + std::to_string(id) + " outside embedding of size " +
                        std::to_string(embed.cols()));
    }
    out->segment(static_cast<Eigen::Index>(k) * dim, dim) = embed.col(id);
  }
}

void Scatter(const Vector &grad, const std::vector<int> &ids, int dim, Matrix *embed_grad) {
  for (size_t k = 0; k < ids.size(); ++k) {
    embed_grad->col(ids[k]) += grad.segment(static_cast<Eigen::Index>(k) * dim, dim);
  }
}

std::vector<double> LogSoftmax(const std::vector<double> &logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - top);
  const double log_total = top + std::log(total);
  std::vector<double> out(logits.size());
  for (size_t k = 0; k < logits.size(); ++k) out[k] = logits[k] - log_total;
  return out;
}

Activations Forward(const LinearizerParams &params, const FeatureVector &features,
                    const Vector *lm_feature, std::span<const int> rows, double dropout,
                    Rng *rng) {
  const ScorerShape &shape = params.shape;
  const int d = shape.embed_dim;
  if (rows.empty()) throw std::invalid_argument("empty feasible action set");
  if (static_cast<int>(features.words.size()) != kNumWordSlots) {
    throw ConfigError("feature vector has wrong word slot count");
  }
  Activations act;
  Gather(params.word_embed, features.words, d, &act.word_input);
  Vector pre = params.hidden_word * act.word_input + params.hidden_bias.col(0);
  if (shape.variant == Variant::kFull) {
    if (static_cast<int>(features.pos.size()) != kNumPosSlots ||
        static_cast<int>(features.labels.size()) != kNumLabelSlots) {
      throw ConfigError("full scorer given light features");
    }
    Gather(params.pos_embed, features.pos, d, &act.pos_input);
    Gather(params.label_embed, features.labels, d, &act.label_input);
    pre += params.hidden_pos * act.pos_input + params.hidden_label * act.label_input;
  }
  if (shape.lm_dim > 0) {
    if (lm_feature == nullptr || lm_feature->size() != shape.lm_dim) {
      throw ConfigError("scorer expects a language-model feature of width " +
                        std::to_string(shape.lm_dim));
    }
    pre += params.hidden_lm * *lm_feature;
  }
  act.hidden = pre.array().tanh();
  if (rng != nullptr && dropout > 0.0) {
    act.mask.resize(act.hidden.size());
    const double keep = 1.0 - dropout;
    for (Eigen::Index k = 0; k < act.mask.size(); ++k) {
      act.mask[k] = rng->Uniform() < dropout ? 0.0 : 1.0 / keep;
    }
    act.dropped = act.hidden.cwiseProduct(act.mask);
  } else {
    act.dropped = act.hidden;
  }

  std::vector<double> logits(rows.size());
  for (size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= params.output.rows()) {
      throw ConfigError("action row " + std::to_string(rows[k]) + " outside output layer");
    }
    logits[k] = params.output.row(rows[k]).dot(act.dropped);
  }
  act.log_probs = LogSoftmax(logits);
  return act;
}

int GoldIndex(const TrainingExample &example, size_t position) {
  auto it = std::find(example.rows.begin(), example.rows.end(), example.gold_row);
  if (it == example.rows.end()) {
    throw DataError("example " + std::to_string(position) + ": gold action row " +
                    std::to_string(example.gold_row) + " is not feasible");
  }
  return static_cast<int>(it - example.rows.begin());
}

const Vector *LmFeature(const TrainingExample &example) {
  return example.lm_feature.size() > 0 ? &example.lm_feature : nullptr;
}

}  // namespace

ScorerShape ScorerShape::For(const TransitionSystem &system, int embed_dim, int hidden_dim,
                             int lm_dim) {
  ScorerShape shape;
  shape.variant = system.variant();
  shape.num_words = system.indexers().num_words();
  if (shape.variant == Variant::kFull) {
    shape.num_pos = system.indexers().num_pos();
    shape.num_labels = system.indexers().num_labels();
  }
  shape.num_actions = system.NumActions();
  shape.embed_dim = embed_dim;
  shape.hidden_dim = hidden_dim;
  shape.lm_dim = lm_dim;
  return shape;
}

LinearizerParams LinearizerParams::Zeros(const ScorerShape &shape) {
  if (shape.embed_dim <= 0 || shape.hidden_dim <= 0 || shape.lm_dim < 0) {
    throw ConfigError("scorer dimensions must be positive");
  }
  const bool full = shape.variant == Variant::kFull;
  const int d = shape.embed_dim;
  const int h = shape.hidden_dim;
  LinearizerParams p;
  p.shape = shape;
  p.word_embed = Matrix::Zero(d, shape.num_words);
  p.pos_embed = Matrix::Zero(d, full ? shape.num_pos : 0);
  p.label_embed = Matrix::Zero(d, full ? shape.num_labels : 0);
  p.hidden_word = Matrix::Zero(h, kNumWordSlots * d);
  p.hidden_pos = Matrix::Zero(h, full ? kNumPosSlots * d : 0);
  p.hidden_label = Matrix::Zero(h, full ? kNumLabelSlots * d : 0);
  p.hidden_lm = Matrix::Zero(h, shape.lm_dim);
  p.hidden_bias = Matrix::Zero(h, 1);
  p.output = Matrix::Zero(shape.num_actions, h);
  return p;
}

LinearizerParams LinearizerParams::Random(const ScorerShape &shape, double range, Rng *rng) {
  LinearizerParams p = Zeros(shape);
  TensorList tensors = p.Tensors();
  tensors.erase(std::remove_if(tensors.begin(), tensors.end(),
                               [](const NamedTensor &t) { return t.name == "b1"; }),
                tensors.end());
  FillUniform(tensors, range, rng);
  return p;
}

TensorList LinearizerParams::Tensors() {
  return {{"E_w", &word_embed},     {"E_t", &pos_embed},     {"E_l", &label_embed},
          {"W1_w", &hidden_word},   {"W1_t", &hidden_pos},   {"W1_l", &hidden_label},
          {"W1_lm", &hidden_lm},    {"b1", &hidden_bias},    {"W2", &output}};
}

void LinearizerParams::CheckShapes() const {
  LinearizerParams expected = Zeros(shape);
  LinearizerParams &self = const_cast<LinearizerParams &>(*this);
  TensorList want = expected.Tensors();
  TensorList have = self.Tensors();
  for (size_t k = 0; k < want.size(); ++k) {
    if (want[k].value->rows() != have[k].value->rows() ||
        want[k].value->cols() != have[k].value->cols()) {
      throw std::invalid_argument("tensor " + want[k].name + " has shape " +
                                  std::to_string(have[k].value->rows()) + "x" +
                                  std::to_string(have[k].value->cols()) + ", expected " +
                                  std::to_string(want[k].value->rows()) + "x" +
                                  std::to_string(want[k].value->cols()));
    }
  }
}

std::vector<double> ScoreActions(const LinearizerParams &params, const FeatureVector &features,
                                 const Vector *lm_feature, std::span<const int> rows,
                                 double dropout, Rng *rng) {
  return Forward(params, features, lm_feature, rows, dropout, rng).log_probs;
}

double Loss(const LinearizerParams &params, std::span<const TrainingExample> batch, double l2) {
  double loss = 0.0;
  for (size_t k = 0; k < batch.size(); ++k) {
    const TrainingExample &example = batch[k];
    const int gold = GoldIndex(example, k);
    Activations act = Forward(params, example.features, LmFeature(example), example.rows, 0.0,
                              nullptr);
    loss -= act.log_probs[gold];
  }
  if (l2 != 0.0) loss += 0.5 * l2 * SquaredNorm(const_cast<LinearizerParams &>(params).Tensors());
  return loss;
}

double LossAndGradient(const LinearizerParams &params, std::span<const TrainingExample> batch,
                       double l2, double dropout, Rng *rng, LinearizerParams *grads) {
  const ScorerShape &shape = params.shape;
  const int d = shape.embed_dim;
  if (!(grads->shape == shape)) *grads = LinearizerParams::Zeros(shape);
  SetZero(grads->Tensors());

  double loss = 0.0;
  for (size_t k = 0; k < batch.size(); ++k) {
    const TrainingExample &example = batch[k];
    const int gold = GoldIndex(example, k);
    const Vector *lm_feature = LmFeature(example);
    Activations act = Forward(params, example.features, lm_feature, example.rows, dropout, rng);
    loss -= act.log_probs[gold];

    Vector grad_dropped = Vector::Zero(shape.hidden_dim);
    for (size_t a = 0; a < example.rows.size(); ++a) {
      const double dlogit = std::exp(act.log_probs[a]) - (static_cast<int>(a) == gold ? 1.0 : 0.0);
      grads->output.row(example.rows[a]) += dlogit * act.dropped.transpose();
      grad_dropped += dlogit * params.output.row(example.rows[a]).transpose();
    }
    Vector grad_hidden = act.mask.size() > 0 ? Vector(grad_dropped.cwiseProduct(act.mask))
                                             : grad_dropped;
    Vector grad_pre = grad_hidden.array() * (1.0 - act.hidden.array().square());

    grads->hidden_bias.col(0) += grad_pre;
    grads->hidden_word.noalias() += grad_pre * act.word_input.transpose();
    Scatter(params.hidden_word.transpose() * grad_pre, example.features.words, d,
            &grads->word_embed);
    if (shape.variant == Variant::kFull) {
      grads->hidden_pos.noalias() += grad_pre * act.pos_input.transpose();
      grads->hidden_label.noalias() += grad_pre * act.label_input.transpose();
      Scatter(params.hidden_pos.transpose() * grad_pre, example.features.pos, d,
              &grads->pos_embed);
      Scatter(params.hidden_label.transpose() * grad_pre, example.features.labels, d,
              &grads->label_embed);
    }
    if (shape.lm_dim > 0) grads->hidden_lm.noalias() += grad_pre * lm_feature->transpose();
  }

  if (l2 != 0.0) {
    LinearizerParams &p = const_cast<LinearizerParams &>(params);
    TensorList values = p.Tensors();
    TensorList g = grads->Tensors();
    for (size_t t = 0; t < values.size(); ++t) *g[t].value += l2 * *values[t].value;
    loss += 0.5 * l2 * SquaredNorm(values);
  }
  return loss;
}

void TrainConfig::Validate() const {
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0, 1)");
  if (embed_dim <= 0 || hidden_dim <= 0) throw ConfigError("dimensions must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (learning_rate < 0.0 || l2 < 0.0) throw ConfigError("learning_rate and l2 must be >= 0");
}

std::vector<EpochStats> Train(LinearizerParams *params, std::vector<TrainingExample> examples,
                              const TrainConfig &config,
                              const std::function<void(const EpochStats &)> &on_epoch) {
  config.Validate();
  params->CheckShapes();
  // Distinct stream from the one used for initialization.
  Rng rng(config.seed * 0x9E3779B97F4A7C15ULL + 1);
  TensorList values = params->Tensors();
  Adagrad optimizer(values, config.learning_rate, config.adagrad_epsilon);
  LinearizerParams grads = LinearizerParams::Zeros(params->shape);
  TensorList grad_list = grads.Tensors();

  std::vector<EpochStats> log;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.Shuffle(&examples);
    double total = 0.0;
    for (size_t start = 0; start < examples.size(); start += config.batch_size) {
      const size_t size = std::min<size_t>(config.batch_size, examples.size() - start);
      std::span<const TrainingExample> batch(examples.data() + start, size);
      double loss = LossAndGradient(*params, batch, 0.0, config.dropout, &rng, &grads);
      if (config.l2 != 0.0) {
        for (size_t t = 0; t < values.size(); ++t) {
          *grad_list[t].value += config.l2 * *values[t].value;
        }
      }
      if (!std::isfinite(loss)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << ", batch starting at example " << start
            << " (parameter norm " << std::sqrt(SquaredNorm(values)) << ")";
        throw TrainingError(msg.str());
      }
      total += loss;
      optimizer.Step(values, grad_list);
    }
    const double norm2 = SquaredNorm(values);
    EpochStats stats{epoch, total + 0.5 * config.l2 * norm2, std::sqrt(norm2)};
    log.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return log;
}

GradCheckReport FfnnGradCheck(const LinearizerParams &params,
                              std::span<const TrainingExample> batch, double l2, double epsilon,
                              int samples, std::uint64_t seed) {
  LinearizerParams work = params;
  LinearizerParams grads;
  LossAndGradient(work, batch, l2, 0.0, nullptr, &grads);
  return CheckGradients(work.Tensors(), grads.Tensors(),
                        [&]() { return Loss(work, batch, l2); }, epsilon, samples, seed);
}

}  // namespace synlin
