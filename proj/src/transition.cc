#include "synlin/transition.h"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace synlin {
namespace {

std::string Summarize(const State &state) {
  std::ostringstream out;
  out << "stack=" << state.stack_size() << " remaining=" << state.remaining_total()
      << " steps=" << state.num_steps() << (state.pending_pos() ? " pending-pos" : "")
      << (state.terminal() ? " terminal" : "");
  return out.str();
}

int KindRank(ActionKind kind) { return static_cast<int>(kind); }

}  // namespace

const char *VariantName(Variant variant) {
  return variant == Variant::kFull ? "full" : "light";
}

Variant ParseVariant(std::string_view name) {
  if (name == "full") return Variant::kFull;
  if (name == "light") return Variant::kLight;
  throw std::invalid_argument("unknown variant '" + std::string(name) + "'");
}

const Subtree::Child *Subtree::LeftChild(int k) const {
  const int n = static_cast<int>(left.size());
  return k <= n ? &left[n - k] : nullptr;
}

const Subtree::Child *Subtree::RightChild(int k) const {
  const int n = static_cast<int>(right.size());
  return k <= n ? &right[n - k] : nullptr;
}

void Subtree::AppendSpan(std::vector<int> *tokens) const {
  for (auto it = left.rbegin(); it != left.rend(); ++it) it->tree->AppendSpan(tokens);
  tokens->push_back(root);
  for (const Child &child : right) child.tree->AppendSpan(tokens);
}

std::vector<int> Subtree::Span() const {
  std::vector<int> tokens;
  tokens.reserve(size);
  AppendSpan(&tokens);
  return tokens;
}

const Subtree *State::StackItem(int depth) const {
  const StackLink *link = stack_.get();
  for (int i = 0; i < depth && link != nullptr; ++i) link = link->next.get();
  return link == nullptr ? nullptr : link->value.get();
}

std::vector<Arc> State::Arcs() const {
  std::vector<Arc> arcs;
  for (const Link<Arc> *link = arcs_.get(); link; link = link->next.get()) {
    arcs.push_back(link->value);
  }
  std::reverse(arcs.begin(), arcs.end());
  return arcs;
}

std::vector<Action> State::History() const {
  std::vector<Action> actions;
  actions.reserve(num_steps_);
  for (const Link<Action> *link = history_.get(); link; link = link->next.get()) {
    actions.push_back(link->value);
  }
  std::reverse(actions.begin(), actions.end());
  return actions;
}

std::vector<int> State::ShiftedTokens() const {
  std::vector<int> tokens;
  for (const Link<int> *link = shifted_.get(); link; link = link->next.get()) {
    tokens.push_back(link->value);
  }
  std::reverse(tokens.begin(), tokens.end());
  return tokens;
}

int State::CompareHistories(const State &a, const State &b) {
  if (a.history_ == b.history_) return 0;
  std::vector<Action> ha = a.History();
  std::vector<Action> hb = b.History();
  const size_t n = std::min(ha.size(), hb.size());
  for (size_t i = 0; i < n; ++i) {
    int c = CompareActions(ha[i], hb[i]);
    if (c != 0) return c;
  }
  if (ha.size() == hb.size()) return 0;
  return ha.size() < hb.size() ? -1 : 1;
}

int CompareActions(const Action &a, const Action &b) {
  auto key = [](const Action &x) {
    return std::tuple(KindRank(x.kind), x.word, x.form, x.pos, x.label);
  };
  auto ka = key(a);
  auto kb = key(b);
  if (ka < kb) return -1;
  if (kb < ka) return 1;
  return 0;
}

TransitionSystem::TransitionSystem(const Indexers &indexers, Variant variant)
    : indexers_(&indexers), variant_(variant) {}

State TransitionSystem::Initial(const WordBag &bag) const {
  if (bag.empty()) throw std::invalid_argument("cannot linearize an empty bag");
  auto info = std::make_shared<State::BagInfo>();
  info->bag = bag;
  for (const WordBag::Entry &entry : bag.entries()) {
    info->word_ids.push_back(indexers_->WordId(entry.form));
  }
  State state;
  state.bag_ = std::move(info);
  for (const WordBag::Entry &entry : bag.entries()) {
    state.remaining_.push_back(entry.count);
  }
  state.remaining_total_ = bag.size();
  return state;
}

std::vector<Action> TransitionSystem::ShiftActions(const State &state) const {
  std::vector<Action> actions;
  if (state.terminal_ || state.pending_pos_) return actions;
  for (int form = 0; form < static_cast<int>(state.remaining_.size()); ++form) {
    if (state.remaining_[form] > 0) {
      actions.push_back(Action::Shift(form, state.form_word_id(form)));
    }
  }
  return actions;
}

std::vector<Action> TransitionSystem::LegalActions(const State &state) const {
  std::vector<Action> actions;
  if (state.terminal_) return actions;
  if (state.pending_pos_) {
    for (int p = 1; p < indexers_->num_pos(); ++p) actions.push_back(Action::Pos(p));
    return actions;
  }
  actions = ShiftActions(state);
  if (state.stack_size_ >= 2) {
    if (variant_ == Variant::kFull) {
      for (int l = 1; l < indexers_->num_labels(); ++l) actions.push_back(Action::LeftArc(l));
      for (int l = 1; l < indexers_->num_labels(); ++l) actions.push_back(Action::RightArc(l));
    } else {
      actions.push_back(Action::LeftArc());
      actions.push_back(Action::RightArc());
    }
  }
  if (state.remaining_total_ == 0 && state.stack_size_ == 1) {
    actions.push_back(Action::End());
  }
  return actions;
}

bool TransitionSystem::IsLegal(const State &state, const Action &action) const {
  if (state.terminal_) return false;
  const bool full = variant_ == Variant::kFull;
  if (state.pending_pos_) {
    return action.kind == ActionKind::kPos && action.pos >= 1 &&
           action.pos < indexers_->num_pos();
  }
  switch (action.kind) {
    case ActionKind::kShift:
      return action.form >= 0 && action.form < static_cast<int>(state.remaining_.size()) &&
             state.remaining_[action.form] > 0 &&
             action.word == state.form_word_id(action.form);
    case ActionKind::kPos:
      return false;
    case ActionKind::kLeftArc:
    case ActionKind::kRightArc:
      if (state.stack_size_ < 2) return false;
      return full ? (action.label >= 1 && action.label < indexers_->num_labels())
                  : action.label == -1;
    case ActionKind::kEnd:
      return state.remaining_total_ == 0 && state.stack_size_ == 1;
  }
  return false;
}

State TransitionSystem::Apply(const State &state, const Action &action) const {
  if (!IsLegal(state, action)) {
    throw ContractError("illegal action " + ActionName(action, &state.bag()) + " in state " +
                        Summarize(state));
  }
  State next = state;
  next.history_ = std::make_shared<State::Link<Action>>(
      State::Link<Action>{action, state.history_});
  ++next.num_steps_;

  switch (action.kind) {
    case ActionKind::kShift: {
      const WordBag::Entry &entry = state.bag().entries()[action.form];
      const int token = entry.first + entry.count - state.remaining_[action.form];
      auto leaf = std::make_shared<Subtree>();
      leaf->root = token;
      next.stack_ = std::make_shared<State::StackLink>(
          State::StackLink{std::move(leaf), state.stack_});
      next.shifted_ = std::make_shared<State::Link<int>>(
          State::Link<int>{token, state.shifted_});
      --next.remaining_[action.form];
      --next.remaining_total_;
      ++next.stack_size_;
      next.pending_pos_ = variant_ == Variant::kFull;
      break;
    }
    case ActionKind::kPos: {
      auto tagged = std::make_shared<Subtree>(*state.stack_->value);
      tagged->pos = action.pos;
      next.stack_ = std::make_shared<State::StackLink>(
          State::StackLink{std::move(tagged), state.stack_->next});
      next.pending_pos_ = false;
      break;
    }
    case ActionKind::kLeftArc:
    case ActionKind::kRightArc: {
      // i is the top item, j the one below it; j precedes i in the output.
      const SubtreePtr &i = state.stack_->value;
      const SubtreePtr &j = state.stack_->next->value;
      auto combined = std::make_shared<Subtree>();
      Arc arc;
      arc.label = action.label;
      if (action.kind == ActionKind::kLeftArc) {
        *combined = *i;
        combined->left.push_back({j, action.label});
        arc.head = i->root;
        arc.dependent = j->root;
      } else {
        *combined = *j;
        combined->right.push_back({i, action.label});
        arc.head = j->root;
        arc.dependent = i->root;
      }
      combined->size = i->size + j->size;
      next.stack_ = std::make_shared<State::StackLink>(
          State::StackLink{std::move(combined), state.stack_->next->next});
      next.arcs_ = std::make_shared<State::Link<Arc>>(State::Link<Arc>{arc, state.arcs_});
      ++next.num_arcs_;
      --next.stack_size_;
      break;
    }
    case ActionKind::kEnd:
      next.terminal_ = true;
      break;
  }
  return next;
}

int TransitionSystem::NumActions() const {
  const int words = indexers_->num_words();
  if (variant_ == Variant::kLight) return words + 3;
  return words + indexers_->num_pos() + 2 * indexers_->num_labels() + 1;
}

int TransitionSystem::ActionRow(const Action &action) const {
  const int words = indexers_->num_words();
  const int pos = indexers_->num_pos();
  const int labels = indexers_->num_labels();
  const bool full = variant_ == Variant::kFull;
  switch (action.kind) {
    case ActionKind::kShift: return action.word;
    case ActionKind::kPos: return words + action.pos;
    case ActionKind::kLeftArc: return full ? words + pos + action.label : words;
    case ActionKind::kRightArc: return full ? words + pos + labels + action.label : words + 1;
    case ActionKind::kEnd: return NumActions() - 1;
  }
  return -1;
}

Action TransitionSystem::RowAction(int row) const {
  const int words = indexers_->num_words();
  const int pos = indexers_->num_pos();
  const int labels = indexers_->num_labels();
  if (row < 0 || row >= NumActions()) throw std::out_of_range("action row out of range");
  if (row < words) return Action::Shift(-1, row);
  if (row == NumActions() - 1) return Action::End();
  row -= words;
  if (variant_ == Variant::kLight) return row == 0 ? Action::LeftArc() : Action::RightArc();
  if (row < pos) return Action::Pos(row);
  row -= pos;
  if (row < labels) return Action::LeftArc(row);
  return Action::RightArc(row - labels);
}

int TransitionSystem::FindRow(std::string_view name) const {
  for (int row = 0; row < NumActions(); ++row) {
    if (ActionName(RowAction(row)) == name) return row;
  }
  return -1;
}

std::string TransitionSystem::ActionName(const Action &action, const WordBag *bag) const {
  auto labelled = [&](const char *stem) {
    std::string name = stem;
    if (action.label >= 0) name += "-" + indexers_->labels.Symbol(action.label);
    return name;
  };
  switch (action.kind) {
    case ActionKind::kShift:
      if (bag != nullptr && action.form >= 0 && action.form < bag->num_forms()) {
        return "Shift-" + bag->entries()[action.form].form;
      }
      return "Shift-" + indexers_->words.Symbol(action.word);
    case ActionKind::kPos:
      return "Pos-" + indexers_->pos.Symbol(action.pos);
    case ActionKind::kLeftArc: return labelled("LArc");
    case ActionKind::kRightArc: return labelled("RArc");
    case ActionKind::kEnd: return "End";
  }
  return "?";
}

std::vector<int> TransitionSystem::RealizedTokens(const State &state) const {
  if (!state.terminal_) {
    throw ContractError("realized sentence requested from non-terminal state " +
                        Summarize(state));
  }
  return state.stack_->value->Span();
}

std::vector<std::string> TransitionSystem::RealizedSentence(const State &state) const {
  std::vector<std::string> words;
  for (int token : RealizedTokens(state)) words.push_back(state.bag().form_of_token(token));
  return words;
}

}  // namespace synlin
