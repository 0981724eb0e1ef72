// Transition system for syntactic linearization.
//
// A state is (stack, remaining bag, arcs). Shift-w moves any remaining word
// onto the stack; arc actions combine the top two stack items. Because arcs
// only join adjacent items, the surface order of the output is the order in
// which words were shifted, and the tree built over it is projective.
//
//   full:  Shift-w, Pos-p, LeftArc-l, RightArc-l, End   (3n actions)
//   light: Shift-w, LeftArc, RightArc, End              (2n actions)
//
// States are immutable and share structure, so beam search can branch from
// one state many times without copying subtrees.

#ifndef SYNLIN_TRANSITION_H_
#define SYNLIN_TRANSITION_H_

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "synlin/corpus.h"

namespace synlin {

enum class Variant { kFull, kLight };

const char *VariantName(Variant variant);
// Throws std::invalid_argument for anything but "full" / "light".
Variant ParseVariant(std::string_view name);

enum class ActionKind : std::uint8_t { kShift, kPos, kLeftArc, kRightArc, kEnd };

struct Action {
  ActionKind kind = ActionKind::kEnd;
  int form = -1;   // Shift: distinct-form index in the state's bag
  int word = -1;   // Shift: word id, used for scoring
  int pos = -1;    // Pos: POS id
  int label = -1;  // LeftArc/RightArc, full variant only

  static Action Shift(int form, int word) { return {ActionKind::kShift, form, word, -1, -1}; }
  static Action Pos(int pos) { return {ActionKind::kPos, -1, -1, pos, -1}; }
  static Action LeftArc(int label = -1) { return {ActionKind::kLeftArc, -1, -1, -1, label}; }
  static Action RightArc(int label = -1) { return {ActionKind::kRightArc, -1, -1, -1, label}; }
  static Action End() { return {}; }

  bool is_shift() const { return kind == ActionKind::kShift; }
  friend bool operator==(const Action &, const Action &) = default;
};

// Dependency arc between bag token positions.
struct Arc {
  int head = 0;
  int dependent = 0;
  int label = -1;
  friend bool operator==(const Arc &, const Arc &) = default;
};

struct Subtree;
using SubtreePtr = std::shared_ptr<const Subtree>;

// A stack item: a subtree over a contiguous stretch of the output.
struct Subtree {
  struct Child {
    SubtreePtr tree;
    int label = -1;
  };

  int root = 0;          // bag token position
  int pos = kNullId;     // assigned POS id; kNullId until a Pos action
  std::vector<Child> left;   // nearest to the root first
  std::vector<Child> right;  // nearest to the root first
  int size = 1;

  // k = 1 is the outermost child on that side, k = 2 the next one in.
  const Child *LeftChild(int k) const;
  const Child *RightChild(int k) const;

  // Realized tokens: left children outermost first, root, right children
  // innermost first.
  void AppendSpan(std::vector<int> *tokens) const;
  std::vector<int> Span() const;
};

class State {
 public:
  // Persistent singly-linked list; `next` points toward older entries.
  template <typename T>
  struct Link {
    T value;
    std::shared_ptr<const Link> next;
  };

  const WordBag &bag() const { return bag_->bag; }
  int num_tokens() const { return bag_->bag.size(); }
  int word_id(int token) const { return bag_->word_ids[bag_->bag.form_index(token)]; }
  int form_word_id(int form) const { return bag_->word_ids[form]; }

  int stack_size() const { return stack_size_; }
  // depth 0 is the top of the stack.
  const Subtree *StackItem(int depth) const;

  int remaining(int form) const { return remaining_[form]; }
  int remaining_total() const { return remaining_total_; }
  bool pending_pos() const { return pending_pos_; }
  bool terminal() const { return terminal_; }
  int num_steps() const { return num_steps_; }
  int num_arcs() const { return num_arcs_; }

  // Oldest first.
  std::vector<Arc> Arcs() const;
  std::vector<Action> History() const;
  std::vector<int> ShiftedTokens() const;
  const Action *LastAction() const { return history_ ? &history_->value : nullptr; }

  // Lexicographic comparison of action histories (see ActionOrder).
  static int CompareHistories(const State &a, const State &b);

 private:
  friend class TransitionSystem;

  struct BagInfo {
    WordBag bag;
    std::vector<int> word_ids;  // per distinct form
  };
  using StackLink = Link<SubtreePtr>;

  std::shared_ptr<const BagInfo> bag_;
  std::shared_ptr<const StackLink> stack_;
  std::shared_ptr<const Link<Arc>> arcs_;
  std::shared_ptr<const Link<Action>> history_;
  std::shared_ptr<const Link<int>> shifted_;
  std::vector<int> remaining_;
  int remaining_total_ = 0;
  int stack_size_ = 0;
  int num_arcs_ = 0;
  int num_steps_ = 0;
  bool pending_pos_ = false;
  bool terminal_ = false;
};

// Illegal action or non-terminal read of a result.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class TransitionSystem {
 public:
  // `indexers` must outlive the system.
  TransitionSystem(const Indexers &indexers, Variant variant);

  Variant variant() const { return variant_; }
  const Indexers &indexers() const { return *indexers_; }

  // Throws std::invalid_argument for an empty bag.
  State Initial(const WordBag &bag) const;

  // Empty for terminal states.
  std::vector<Action> LegalActions(const State &state) const;
  // Shift-w for every distinct remaining form, in form order.
  std::vector<Action> ShiftActions(const State &state) const;
  bool IsLegal(const State &state, const Action &action) const;

  // Throws ContractError when `action` is not legal in `state`.
  State Apply(const State &state, const Action &action) const;

  // Number of actions in a complete derivation over n words.
  int DerivationLength(int n) const { return variant_ == Variant::kFull ? 3 * n : 2 * n; }

  // Global action inventory: one row per action type of the output layer.
  int NumActions() const;
  int ActionRow(const Action &action) const;
  // Action for `row` with no bag attached (form = -1).
  Action RowAction(int row) const;
  // Inverse of the naming below over the inventory; -1 if unknown.
  int FindRow(std::string_view name) const;

  // Table-style names: Shift-I, Pos-PRP, LArc-nsubj, RArc-dobj, End. Shift
  // uses the bag's original form when `bag` is given, the vocabulary word
  // otherwise.
  std::string ActionName(const Action &action, const WordBag *bag = nullptr) const;

  // Tokens of the single remaining tree. Throws ContractError unless the
  // state is terminal.
  std::vector<int> RealizedTokens(const State &state) const;
  std::vector<std::string> RealizedSentence(const State &state) const;

 private:
  const Indexers *indexers_;
  Variant variant_;
};

// Total order on actions used for deterministic tie-breaking: inventory row,
// then bag form.
int CompareActions(const Action &a, const Action &b);

}  // namespace synlin

#endif  // SYNLIN_TRANSITION_H_
