// Stack feature templates for the action scorer.
//
// Slot layout (S1 = top of stack, lc1 = leftmost child, lc2 = second
// leftmost, rc1 = rightmost, rc2 = second rightmost):
//
//   word/POS slots (15 each)
//     0..2    S1, S2, S3
//     3..6    lc1(S1), lc2(S1), rc1(S1), rc2(S1)
//     7..10   lc1(S2), lc2(S2), rc1(S2), rc2(S2)
//     11, 12  lc1(lc1(S1)), rc1(rc1(S1))
//     13, 14  lc1(lc1(S2)), rc1(rc1(S2))
//   label slots (12): word/POS slots 3..14, shifted down by 3
//
// Nothing is read from the unordered bag. Missing referents give NULL ids; a
// word not yet tagged gives NULL^t. The light variant has word slots only.

#ifndef SYNLIN_FEATURES_H_
#define SYNLIN_FEATURES_H_

#include <array>
#include <string>
#include <vector>

#include "synlin/transition.h"

namespace synlin {

inline constexpr int kNumWordSlots = 15;
inline constexpr int kNumPosSlots = 15;
inline constexpr int kNumLabelSlots = 12;

struct FeatureVector {
  std::vector<int> words;   // kNumWordSlots
  std::vector<int> pos;     // kNumPosSlots, empty for light
  std::vector<int> labels;  // kNumLabelSlots, empty for light

  friend bool operator==(const FeatureVector &, const FeatureVector &) = default;
};

FeatureVector ExtractFeatures(const State &state, Variant variant);
FeatureVector ExtractLightFeatures(const State &state);

// Slot names in layout order ("S1.w", "lc1(S2).t", "rc1(rc1(S1)).l", ...).
std::vector<std::string> FeatureSlotNames(Variant variant);

}  // namespace synlin

#endif  // SYNLIN_FEATURES_H_
