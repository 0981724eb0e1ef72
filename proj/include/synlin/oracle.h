// Static arc-standard oracle for linearization training.

#ifndef SYNLIN_ORACLE_H_
#define SYNLIN_ORACLE_H_

#include <stdexcept>
#include <vector>

#include "synlin/corpus.h"
#include "synlin/transition.h"

namespace synlin {

class DerivationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Actions that rebuild `sentence` (surface order and gold arcs) from
// Initial(ToBag(sentence)). Words are shifted in gold order. RightArc fires as
// soon as the top item is complete; a valid LeftArc is postponed in favour of
// Shift while the next word still belongs to the top item's subtree.
//
// Throws DerivationError for non-projective trees, and for POS tags or labels
// missing from the system's indexers.
std::vector<Action> DeriveOracle(const DepSentence &sentence, const TransitionSystem &system);

// Replays `actions` from the initial state of ToBag(sentence).
State ReplayOracle(const DepSentence &sentence, const TransitionSystem &system,
                   const std::vector<Action> &actions);

// Realized order equals gold order and the arc set equals the gold arcs
// (labels included in the full variant).
bool MatchesGold(const DepSentence &sentence, const TransitionSystem &system,
                 const State &terminal);

}  // namespace synlin

#endif  // SYNLIN_ORACLE_H_
