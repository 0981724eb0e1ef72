#include "synlin/oracle.h"

#include <algorithm>

namespace synlin {
namespace {

bool IsDescendant(const DepSentence &sentence, int node, int ancestor) {
  while (node != 0) {
    if (node == ancestor) return true;
    node = sentence.token(node).head;
  }
  return false;
}

}  // namespace

std::vector<Action> DeriveOracle(const DepSentence &sentence, const TransitionSystem &system) {
  const Indexers &indexers = system.indexers();
  const bool full = system.variant() == Variant::kFull;
  const int n = sentence.size();
  const WordBag bag = ToBag(sentence);

  std::vector<int> missing(n + 1, 0);  // gold dependents not yet attached
  for (const Token &token : sentence.tokens) {
    if (token.head != 0) ++missing[token.head];
  }
  auto label_of = [&](int dependent) {
    if (!full) return -1;
    int id = indexers.LabelId(sentence.token(dependent).label);
    if (id < 1) {
      throw DerivationError("unknown arc label '" + sentence.token(dependent).label + "'");
    }
    return id;
  };

  std::vector<Action> actions;
  actions.reserve(system.DerivationLength(n));
  std::vector<int> stack;
  int next = 1;
  while (true) {
    if (stack.size() >= 2) {
      const int i = stack.back();
      const int j = stack[stack.size() - 2];
      if (sentence.token(i).head == j && missing[i] == 0) {
        actions.push_back(Action::RightArc(label_of(i)));
        --missing[j];
        stack.pop_back();
        continue;
      }
      if (sentence.token(j).head == i && missing[j] == 0 &&
          !(next <= n && IsDescendant(sentence, next, i))) {
        actions.push_back(Action::LeftArc(label_of(j)));
        --missing[i];
        stack.erase(stack.end() - 2);
        continue;
      }
    }
    if (next <= n) {
      const Token &token = sentence.token(next);
      actions.push_back(Action::Shift(bag.FindForm(token.form), indexers.WordId(token.form)));
      if (full) {
        int pos = indexers.PosId(token.pos);
        if (pos < 1) throw DerivationError("unknown POS tag '" + token.pos + "'");
        actions.push_back(Action::Pos(pos));
      }
      stack.push_back(next++);
      continue;
    }
    if (stack.size() == 1) {
      actions.push_back(Action::End());
      return actions;
    }
    throw DerivationError("tree cannot be derived with arc-standard transitions");
  }
}

State ReplayOracle(const DepSentence &sentence, const TransitionSystem &system,
                   const std::vector<Action> &actions) {
  State state = system.Initial(ToBag(sentence));
  for (const Action &action : actions) state = system.Apply(state, action);
  return state;
}

bool MatchesGold(const DepSentence &sentence, const TransitionSystem &system,
                 const State &terminal) {
  if (!terminal.terminal()) return false;
  const WordBag &bag = terminal.bag();
  std::vector<int> order;
  for (int token : system.RealizedTokens(terminal)) order.push_back(bag.source(token));
  for (int k = 0; k < sentence.size(); ++k) {
    if (order[k] != k + 1) return false;
  }
  std::vector<Arc> arcs = terminal.Arcs();
  if (static_cast<int>(arcs.size()) != sentence.size() - 1) return false;
  const bool full = system.variant() == Variant::kFull;
  for (const Arc &arc : arcs) {
    const Token &dependent = sentence.token(bag.source(arc.dependent));
    if (dependent.head != bag.source(arc.head)) return false;
    if (full && system.indexers().labels.Symbol(arc.label) != dependent.label) return false;
  }
  return true;
}

}  // namespace synlin
