// Search over linearization derivations.
//
// Modes:
//   syn       linearizer log-probabilities over legal actions
//   lstm      language model alone: n bag-restricted word choices, no tree
//   syn+lstm  log p_syn(a) + alpha * log p_lm(w_a) for Shift-w, + 0 otherwise
//             (not renormalized unless DecodeConfig::renormalize)
//   syn*lstm  linearizer whose input includes the LM's top-layer output
//
// The language model advances only on Shift, starting from the state after
// <s>. Beam search is step-synchronous: every hypothesis in a beam has taken
// the same number of actions. Ties in accumulated score are broken by the
// lexicographically smaller action history (see CompareActions).

#ifndef SYNLIN_DECODER_H_
#define SYNLIN_DECODER_H_

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synlin/corpus.h"
#include "synlin/ffnn.h"
#include "synlin/lstm_lm.h"
#include "synlin/transition.h"

namespace synlin {

struct LinearizerModel {
  Indexers indexers;
  LinearizerParams params;
  TrainConfig config;

  Variant variant() const { return params.shape.variant; }
};

struct LanguageModel {
  Indexers indexers;
  LmParams params;
  LmConfig config;
};

enum class DecodeMode { kSyn, kLstm, kJoint, kFeature };

const char *DecodeModeName(DecodeMode mode);
// Accepts syn, lstm, syn+lstm, syn*lstm (also synxlstm).
DecodeMode ParseDecodeMode(std::string_view name);

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kSyn;
  int beam_size = 1;
  double alpha = 0.4;
  bool renormalize = false;
};

// Models are borrowed and must outlive the decoder.
struct DecodeModels {
  const LinearizerModel *linearizer = nullptr;
  const LanguageModel *lm = nullptr;
};

struct BeamItem {
  State state;
  double score = 0.0;
  std::shared_ptr<const LmState> lm;          // LM modes only
  std::shared_ptr<const std::vector<int>> lm_ids;  // LM id per bag form
};

struct ScoredAction {
  Action action;
  double score = 0.0;
};

struct OutputArc {
  int head = 0;       // 1-based position in the output sentence
  int dependent = 0;  // 1-based position in the output sentence
  std::string label;  // empty in the light variant
};

struct DecodeResult {
  std::vector<std::string> words;
  std::vector<OutputArc> arcs;
  std::vector<std::string> derivation;
  double score = 0.0;
  std::vector<Action> actions;
};

class SearchBoundError : public std::length_error {
 public:
  using std::length_error::length_error;
};

class Decoder {
 public:
  // Throws ConfigError when the models do not fit the mode.
  Decoder(const DecodeModels &models, const DecodeConfig &config);

  const DecodeConfig &config() const { return config_; }
  const TransitionSystem &system() const { return *system_; }

  // Actions in a complete derivation: 3n / 2n / n.
  int NumSteps(int n) const;

  BeamItem Start(const WordBag &bag) const;
  std::vector<ScoredAction> StepScores(const BeamItem &item) const;
  BeamItem Advance(const BeamItem &item, const ScoredAction &scored) const;

  DecodeResult Beam(const WordBag &bag) const;

  // Largest bag Exhaustive accepts for this mode.
  int ExhaustiveLimit() const;
  // Scores every derivation exactly as Beam accumulates them and returns the
  // best. Throws SearchBoundError above ExhaustiveLimit().
  DecodeResult Exhaustive(const WordBag &bag, long *num_derivations = nullptr) const;

 private:
  DecodeResult Finish(const BeamItem &item) const;
  bool UsesLm() const;

  DecodeModels models_;
  DecodeConfig config_;
  std::unique_ptr<TransitionSystem> system_;
};

}  // namespace synlin

#endif  // SYNLIN_DECODER_H_
