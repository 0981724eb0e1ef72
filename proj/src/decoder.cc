#include "synlin/decoder.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "synlin/features.h"

namespace synlin {
namespace {

struct Candidate {
  int parent = 0;
  ScoredAction scored;
  double total = 0.0;
};

double LogSumExp(const std::vector<double> &values) {
  const double top = *std::max_element(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - top);
  return top + std::log(sum);
}

// True when (score_a, history_a) ranks before (score_b, history_b).
bool Better(double score_a, const State &history_a, const Action &last_a, double score_b,
            const State &history_b, const Action &last_b) {
  if (score_a != score_b) return score_a > score_b;
  int c = State::CompareHistories(history_a, history_b);
  if (c != 0) return c < 0;
  return CompareActions(last_a, last_b) < 0;
}

}  // namespace

const char *DecodeModeName(DecodeMode mode) {
  switch (mode) {
    case DecodeMode::kSyn: return "syn";
    case DecodeMode::kLstm: return "lstm";
    case DecodeMode::kJoint: return "syn+lstm";
    case DecodeMode::kFeature: return "syn*lstm";
  }
  return "?";
}

DecodeMode ParseDecodeMode(std::string_view name) {
  if (name == "syn") return DecodeMode::kSyn;
  if (name == "lstm") return DecodeMode::kLstm;
  if (name == "syn+lstm") return DecodeMode::kJoint;
  if (name == "syn*lstm" || name == "synxlstm") return DecodeMode::kFeature;
  throw ConfigError("unknown decode mode '" + std::string(name) + "'");
}

Decoder::Decoder(const DecodeModels &models, const DecodeConfig &config)
    : models_(models), config_(config) {
  if (config_.beam_size < 1) throw ConfigError("beam size must be >= 1");
  const bool needs_syn = config_.mode != DecodeMode::kLstm;
  if (needs_syn && models_.linearizer == nullptr) {
    throw ConfigError(std::string("mode ") + DecodeModeName(config_.mode) +
                      " needs a linearizer model");
  }
  if (UsesLm() && models_.lm == nullptr) {
    throw ConfigError(std::string("mode ") + DecodeModeName(config_.mode) +
                      " needs a language model");
  }
  if (needs_syn) {
    const int lm_dim = models_.linearizer->params.shape.lm_dim;
    if (config_.mode == DecodeMode::kFeature && lm_dim != models_.lm->params.units) {
      throw ConfigError("syn*lstm needs a linearizer trained with LM features of width " +
                        std::to_string(models_.lm->params.units));
    }
    if (config_.mode != DecodeMode::kFeature && lm_dim != 0) {
      throw ConfigError("linearizer expects LM features; decode it with syn*lstm");
    }
    system_ = std::make_unique<TransitionSystem>(models_.linearizer->indexers,
                                                 models_.linearizer->variant());
  } else {
    system_ = std::make_unique<TransitionSystem>(models_.lm->indexers, Variant::kLight);
  }
}

bool Decoder::UsesLm() const { return config_.mode != DecodeMode::kSyn; }

int Decoder::NumSteps(int n) const {
  return config_.mode == DecodeMode::kLstm ? n : system_->DerivationLength(n);
}

int Decoder::ExhaustiveLimit() const { return config_.mode == DecodeMode::kLstm ? 8 : 6; }

BeamItem Decoder::Start(const WordBag &bag) const {
  BeamItem item{system_->Initial(bag), 0.0, nullptr, nullptr};
  if (UsesLm()) {
    const LanguageModel &lm = *models_.lm;
    auto ids = std::make_shared<std::vector<int>>();
    for (const WordBag::Entry &entry : bag.entries()) ids->push_back(lm.indexers.WordId(entry.form));
    item.lm_ids = std::move(ids);
    item.lm = std::make_shared<const LmState>(LmStartState(lm.params));
  }
  return item;
}

std::vector<ScoredAction> Decoder::StepScores(const BeamItem &item) const {
  const State &state = item.state;
  std::vector<ScoredAction> out;

  auto lm_shift_scores = [&](const std::vector<Action> &shifts) {
    std::vector<int> ids;
    ids.reserve(shifts.size());
    for (const Action &a : shifts) ids.push_back((*item.lm_ids)[a.form]);
    return LmLogProbs(models_.lm->params, *item.lm, ids);
  };

  if (config_.mode == DecodeMode::kLstm) {
    std::vector<Action> shifts = system_->ShiftActions(state);
    if (shifts.empty()) return out;
    std::vector<double> logp = lm_shift_scores(shifts);
    for (size_t k = 0; k < shifts.size(); ++k) out.push_back({shifts[k], logp[k]});
    return out;
  }

  std::vector<Action> legal = system_->LegalActions(state);
  if (legal.empty()) return out;
  std::vector<int> rows;
  rows.reserve(legal.size());
  for (const Action &a : legal) rows.push_back(system_->ActionRow(a));
  const FeatureVector features = ExtractFeatures(state, system_->variant());
  const Vector *lm_feature = config_.mode == DecodeMode::kFeature ? &item.lm->top() : nullptr;
  std::vector<double> logp =
      ScoreActions(models_.linearizer->params, features, lm_feature, rows);
  for (size_t k = 0; k < legal.size(); ++k) out.push_back({legal[k], logp[k]});

  if (config_.mode == DecodeMode::kJoint) {
    std::vector<Action> shifts;
    std::vector<size_t> where;
    for (size_t k = 0; k < legal.size(); ++k) {
      if (legal[k].is_shift()) {
        shifts.push_back(legal[k]);
        where.push_back(k);
      }
    }
    if (!shifts.empty()) {
      std::vector<double> lm_logp = lm_shift_scores(shifts);
      for (size_t k = 0; k < shifts.size(); ++k) {
        out[where[k]].score += config_.alpha * lm_logp[k];
      }
    }
    if (config_.renormalize) {
      std::vector<double> scores;
      for (const ScoredAction &s : out) scores.push_back(s.score);
      const double norm = LogSumExp(scores);
      for (ScoredAction &s : out) s.score -= norm;
    }
  }
  return out;
}

BeamItem Decoder::Advance(const BeamItem &item, const ScoredAction &scored) const {
  BeamItem next{system_->Apply(item.state, scored.action), item.score + scored.score, item.lm,
                item.lm_ids};
  if (item.lm && scored.action.is_shift()) {
    next.lm = std::make_shared<const LmState>(
        LmStep(models_.lm->params, *item.lm, (*item.lm_ids)[scored.action.form]));
  }
  return next;
}

DecodeResult Decoder::Finish(const BeamItem &item) const {
  DecodeResult result;
  const State &state = item.state;
  const WordBag &bag = state.bag();
  std::vector<int> tokens = config_.mode == DecodeMode::kLstm ? state.ShiftedTokens()
                                                              : system_->RealizedTokens(state);
  std::vector<int> position(bag.size(), 0);
  for (size_t k = 0; k < tokens.size(); ++k) {
    position[tokens[k]] = static_cast<int>(k) + 1;
    result.words.push_back(bag.form_of_token(tokens[k]));
  }
  for (const Arc &arc : state.Arcs()) {
    OutputArc out{position[arc.head], position[arc.dependent], ""};
    if (arc.label >= 0) out.label = system_->indexers().labels.Symbol(arc.label);
    result.arcs.push_back(out);
  }
  result.actions = state.History();
  for (const Action &a : result.actions) result.derivation.push_back(system_->ActionName(a, &bag));
  result.score = item.score;
  return result;
}

DecodeResult Decoder::Beam(const WordBag &bag) const {
  std::vector<BeamItem> beam{Start(bag)};
  const int steps = NumSteps(bag.size());
  std::vector<Candidate> candidates;
  for (int step = 0; step < steps; ++step) {
    candidates.clear();
    for (int p = 0; p < static_cast<int>(beam.size()); ++p) {
      for (const ScoredAction &scored : StepScores(beam[p])) {
        candidates.push_back({p, scored, beam[p].score + scored.score});
      }
    }
    auto better = [&](const Candidate &a, const Candidate &b) {
      return Better(a.total, beam[a.parent].state, a.scored.action, b.total,
                    beam[b.parent].state, b.scored.action);
    };
    const size_t keep = std::min<size_t>(config_.beam_size, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(), better);
    std::vector<BeamItem> next;
    next.reserve(keep);
    for (size_t k = 0; k < keep; ++k) {
      next.push_back(Advance(beam[candidates[k].parent], candidates[k].scored));
    }
    beam = std::move(next);
  }
  return Finish(beam.front());
}

DecodeResult Decoder::Exhaustive(const WordBag &bag, long *num_derivations) const {
  if (bag.size() > ExhaustiveLimit()) {
    throw SearchBoundError("exhaustive search refused: bag of " + std::to_string(bag.size()) +
                           " words exceeds the limit of " + std::to_string(ExhaustiveLimit()) +
                           " for mode " + DecodeModeName(config_.mode));
  }
  const int steps = NumSteps(bag.size());
  std::optional<BeamItem> best;
  long count = 0;
  std::function<void(const BeamItem &)> expand = [&](const BeamItem &item) {
    if (item.state.num_steps() == steps) {
      ++count;
      if (!best || Better(item.score, item.state, Action::End(), best->score, best->state,
                          Action::End())) {
        best = item;
      }
      return;
    }
    for (const ScoredAction &scored : StepScores(item)) expand(Advance(item, scored));
  };
  expand(Start(bag));
  if (num_derivations != nullptr) *num_derivations = count;
  return Finish(*best);
}

}  // namespace synlin
