#include "synlin/features.h"

namespace synlin {
namespace {

struct Referent {
  const Subtree *tree = nullptr;
  int label = kNullId;  // label of the arc attaching `tree`
};

Referent Left(const Referent &parent, int k) {
  if (parent.tree == nullptr) return {};
  const Subtree::Child *child = parent.tree->LeftChild(k);
  if (child == nullptr) return {};
  return {child->tree.get(), child->label < 0 ? kNullId : child->label};
}

Referent Right(const Referent &parent, int k) {
  if (parent.tree == nullptr) return {};
  const Subtree::Child *child = parent.tree->RightChild(k);
  if (child == nullptr) return {};
  return {child->tree.get(), child->label < 0 ? kNullId : child->label};
}

// The 15 structural referents in slot order.
std::array<Referent, kNumWordSlots> Referents(const State &state) {
  std::array<Referent, kNumWordSlots> slots;
  for (int i = 0; i < 3; ++i) slots[i].tree = state.StackItem(i);
  for (int i = 0; i < 2; ++i) {
    const Referent &s = slots[i];
    slots[3 + 4 * i + 0] = Left(s, 1);
    slots[3 + 4 * i + 1] = Left(s, 2);
    slots[3 + 4 * i + 2] = Right(s, 1);
    slots[3 + 4 * i + 3] = Right(s, 2);
    slots[11 + 2 * i + 0] = Left(Left(s, 1), 1);
    slots[11 + 2 * i + 1] = Right(Right(s, 1), 1);
  }
  return slots;
}

}  // namespace

FeatureVector ExtractFeatures(const State &state, Variant variant) {
  const std::array<Referent, kNumWordSlots> slots = Referents(state);
  FeatureVector features;
  features.words.resize(kNumWordSlots, kNullId);
  for (int k = 0; k < kNumWordSlots; ++k) {
    if (slots[k].tree != nullptr) features.words[k] = state.word_id(slots[k].tree->root);
  }
  if (variant == Variant::kLight) return features;

  features.pos.resize(kNumPosSlots, kNullId);
  features.labels.resize(kNumLabelSlots, kNullId);
  for (int k = 0; k < kNumPosSlots; ++k) {
    if (slots[k].tree != nullptr) features.pos[k] = slots[k].tree->pos;
  }
  for (int k = 0; k < kNumLabelSlots; ++k) features.labels[k] = slots[k + 3].label;
  return features;
}

FeatureVector ExtractLightFeatures(const State &state) {
  return ExtractFeatures(state, Variant::kLight);
}

std::vector<std::string> FeatureSlotNames(Variant variant) {
  static const char *const kReferents[kNumWordSlots] = {
      "S1",         "S2",         "S3",         "lc1(S1)",       "lc2(S1)",
      "rc1(S1)",    "rc2(S1)",    "lc1(S2)",    "lc2(S2)",       "rc1(S2)",
      "rc2(S2)",    "lc1(lc1(S1))", "rc1(rc1(S1))", "lc1(lc1(S2))", "rc1(rc1(S2))"};
  std::vector<std::string> names;
  for (const char *r : kReferents) names.push_back(std::string(r) + ".w");
  if (variant == Variant::kLight) return names;
  for (const char *r : kReferents) names.push_back(std::string(r) + ".t");
  for (int k = 3; k < kNumWordSlots; ++k) names.push_back(std::string(kReferents[k]) + ".l");
  return names;
}

}  // namespace synlin
