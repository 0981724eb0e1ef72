#include "synlin/eval.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "synlin/random.h"

namespace synlin {
namespace {

TokenList Words(const std::string &text) {
  TokenList out;
  std::string word;
  for (char ch : text + " ") {
    if (ch == ' ') {
      if (!word.empty()) out.push_back(word);
      word.clear();
    } else {
      word += ch;
    }
  }
  return out;
}

// Straightforward BLEU used to cross-check the library.
double ReferenceBleu(const std::vector<TokenList> &refs, const std::vector<TokenList> &hyps) {
  double log_sum = 0.0;
  int orders = 0;
  long c = 0, r = 0;
  for (size_t s = 0; s < refs.size(); ++s) {
    c += hyps[s].size();
    r += refs[s].size();
  }
  for (size_t n = 1; n <= 4; ++n) {
    long match = 0, total = 0;
    for (size_t s = 0; s < refs.size(); ++s) {
      std::map<TokenList, long> ref_counts, hyp_counts;
      for (size_t i = 0; i + n <= refs[s].size(); ++i) {
        ++ref_counts[TokenList(refs[s].begin() + i, refs[s].begin() + i + n)];
      }
      for (size_t i = 0; i + n <= hyps[s].size(); ++i) {
        ++hyp_counts[TokenList(hyps[s].begin() + i, hyps[s].begin() + i + n)];
      }
      for (const auto &[gram, count] : hyp_counts) {
        total += count;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) match += std::min(count, it->second);
      }
    }
    if (total == 0) continue;
    if (match == 0) return 0.0;
    log_sum += std::log(static_cast<double>(match) / total);
    ++orders;
  }
  if (orders == 0 || c == 0) return 0.0;
  const double bp = c >= r ? 1.0 : std::exp(1.0 - static_cast<double>(r) / c);
  return 100.0 * bp * std::exp(log_sum / orders);
}

TEST(CorpusBleu, IdentityIsHundred) {
  const std::vector<TokenList> refs = {Words("I love NLP"), Words("the dog saw a cat today")};
  const BleuReport report = CorpusBleu(refs, refs);
  EXPECT_DOUBLE_EQ(report.bleu, 100.0);
  EXPECT_EQ(report.brevity_penalty, 1.0);
  EXPECT_EQ(report.sentences, 2);
  EXPECT_EQ(report.hyp_length, 9);
  EXPECT_EQ(report.ref_length, 9);
}

TEST(CorpusBleu, ReversedThreeWords) {
  const BleuReport report = CorpusBleu({Words("I love NLP")}, {Words("NLP love I")});
  EXPECT_EQ(report.bleu, 0.0);
  EXPECT_EQ(report.matches[0], 3);
  EXPECT_EQ(report.totals[0], 3);
  EXPECT_DOUBLE_EQ(report.precision[0], 1.0);
  EXPECT_EQ(report.matches[1], 0);
  EXPECT_EQ(report.totals[1], 2);
  EXPECT_EQ(report.totals[2], 1);
  EXPECT_EQ(report.totals[3], 0);
}

TEST(CorpusBleu, SingleTokenIdentity) {
  EXPECT_DOUBLE_EQ(CorpusBleuScore({{"Go"}}, {{"Go"}}), 100.0);
  EXPECT_EQ(CorpusBleuScore({{"Go"}}, {{"Stop"}}), 0.0);
}

TEST(CorpusBleu, LengthMismatchThrows) {
  EXPECT_THROW(CorpusBleu({Words("a b")}, {}), std::invalid_argument);
}

TEST(CorpusBleu, BrevityPenalty) {
  const TokenList ref = Words("a b c d e f g h i j");
  const TokenList hyp = Words("a b c d e f g h");
  const BleuReport report = CorpusBleu({ref}, {hyp});
  EXPECT_NEAR(report.brevity_penalty, std::exp(1.0 - 10.0 / 8.0), 1e-15);
  EXPECT_NEAR(report.bleu, 100.0 * std::exp(1.0 - 10.0 / 8.0), 1e-9);
  EXPECT_EQ(CorpusBleu({ref}, {TokenList{}}).brevity_penalty, 0.0);
  EXPECT_EQ(CorpusBleu({hyp}, {ref}).brevity_penalty, 1.0);
}

TEST(CorpusBleu, ClipsRepeatedWords) {
  const BleuReport report = CorpusBleu({Words("the cat")}, {Words("the the the")});
  EXPECT_EQ(report.matches[0], 1);
  EXPECT_EQ(report.totals[0], 3);
}

TEST(CorpusBleu, InvariantToPairOrder) {
  std::vector<TokenList> refs = {Words("the dog saw a cat"), Words("a big red ball in the park"),
                                 Words("he took the ball today")};
  std::vector<TokenList> hyps = {Words("the dog a saw cat"), Words("a red big ball in the park"),
                                 Words("he took the today ball")};
  const double a = CorpusBleuScore(refs, hyps);
  std::swap(refs[0], refs[2]);
  std::swap(hyps[0], hyps[2]);
  EXPECT_DOUBLE_EQ(CorpusBleuScore(refs, hyps), a);
  EXPECT_GT(a, 0.0);
}

struct FrozenCase {
  std::vector<TokenList> refs;
  std::vector<TokenList> hyps;
  double bleu;
};

// Values computed once with nltk's corpus_bleu (default weights, no smoothing).
// Every hypothesis has at least four tokens: below that nltk counts a phantom
// 4-gram in the denominator.
const std::vector<FrozenCase> &FrozenCases() {
  static const std::vector<FrozenCase> cases = {
    {{{"today", "man", "near", "big", "a", "today", "man", "dog", "a", "ball", "ball", "a", "man"}, {"cat", "cat", "dog", "ball", "ball", "big", "saw", "a", "big", "near"}, {"man", "in", "cat", "took", "saw"}, {"man", "red", "ball", "a", "dog", "park"}},
     {{"today", "man", "big", "near", "a", "today", "man", "dog", "a", "ball", "ball", "a", "man"}, {"cat", "cat", "dog", "ball", "big", "ball", "saw", "a", "big", "near"}, {"man", "in", "cat", "took", "saw"}, {"man", "red", "ball", "a", "dog", "park"}},
     76.4116619451},
    {{{"red", "near", "cat", "saw", "the", "took", "park", "the", "man", "ball"}, {"in", "big", "in", "the", "in"}},
     {{"red", "near", "saw", "cat", "the", "park", "took", "the", "man", "ball"}, {"in", "the", "in", "big", "in"}},
     0.0000000000},
    {{{"the", "in", "cat", "man", "ball", "in"}},
     {{"in", "the", "cat", "man", "ball", "in"}},
     56.2341325190},
    {{{"today", "a", "near", "the", "today", "saw", "took", "today", "a", "dog"}, {"a", "cat", "a", "near", "near", "park", "the", "saw", "near", "man", "ball"}, {"red", "near", "dog", "dog", "park", "dog", "red", "took", "cat", "in", "in", "man"}},
     {{"today", "a", "near", "the", "today", "saw", "took", "today", "a", "dog"}, {"a", "cat", "near", "a", "near", "park", "the", "saw", "near", "man", "ball"}, {"red", "near", "dog", "dog", "park", "dog", "red", "took", "cat", "in", "in", "man"}},
     90.2204316513},
    {{{"big", "big", "red", "ball", "saw", "near", "today", "dog", "red", "today", "dog", "ball"}, {"ball", "ball", "a", "a", "park", "ball", "red", "ball", "man", "big", "ball", "the", "man", "near"}},
     {{"big", "big", "red", "saw", "near", "today", "dog", "red", "dog", "today", "ball"}, {"ball", "a", "ball", "a", "park", "ball", "red", "ball", "man", "ball", "big", "the", "man", "near"}},
     49.1799604515},
    {{{"saw", "took", "near", "red", "a", "the", "cat", "near"}, {"ball", "saw", "a", "park", "a", "today", "near", "ball", "took", "a", "took", "cat", "in"}, {"near", "dog", "man", "in", "ball", "the", "took", "cat", "near", "took"}},
     {{"saw", "near", "took", "a", "red", "cat", "the", "near"}, {"ball", "saw", "a", "a", "park", "today", "near", "ball", "took", "a", "took", "cat", "in"}, {"dog", "man", "in", "the", "ball", "took", "cat", "near", "took"}},
     49.0496112291},
    {{{"near", "the", "ball", "the", "park", "saw", "in", "in", "near", "took", "ball", "in", "near"}, {"took", "dog", "dog", "ball", "the", "ball", "took", "cat", "park", "took", "cat"}, {"the", "a", "a", "the", "ball", "near"}, {"red", "took", "big", "big", "saw", "near", "took", "today", "red", "park", "the"}},
     {{"near", "the", "ball", "park", "saw", "in", "in", "near", "took", "in", "ball", "near"}, {"took", "dog", "dog", "ball", "the", "ball", "took", "park", "took", "cat", "cat"}, {"the", "a", "a", "the", "ball", "near"}, {"red", "took", "big", "big", "saw", "took", "near", "today", "park", "red", "the"}},
     61.7527437450},
    {{{"took", "big", "the", "man", "took", "near", "saw", "in", "man", "park"}, {"big", "took", "today", "saw", "ball", "ball", "park", "man", "today", "dog", "in", "cat"}, {"man", "today", "near", "big", "a"}},
     {{"took", "big", "the", "man", "took", "near", "in", "park", "man"}, {"big", "took", "today", "saw", "ball", "ball", "park", "man", "today", "dog", "in", "cat"}, {"man", "today", "near", "a", "big"}},
     77.2024229066},
    {{{"dog", "in", "took", "saw", "near", "dog", "ball", "today", "park"}, {"saw", "park", "saw", "the", "the", "cat", "big", "dog", "near"}},
     {{"dog", "in", "took", "saw", "near", "dog", "ball", "park", "today"}, {"park", "saw", "the", "cat", "the", "big", "dog", "near"}},
     58.0408976805},
    {{{"big", "ball", "cat", "near", "cat", "cat", "man", "big"}, {"in", "the", "in", "park", "in", "red", "a", "saw", "red", "in", "saw"}},
     {{"big", "ball", "cat", "near", "cat", "cat", "big", "man"}, {"the", "in", "in", "park", "in", "red", "a", "saw", "red", "in", "saw"}},
     80.4118260281},
    {{{"big", "a", "ball", "the", "park", "man", "today", "a", "ball", "dog", "big", "saw", "a"}, {"cat", "red", "cat", "near", "big", "the", "near", "big"}},
     {{"big", "a", "ball", "the", "park", "man", "today", "a", "ball", "dog", "big", "saw", "a"}, {"cat", "red", "cat", "near", "big", "the", "near", "big"}},
     100.0000000000},
    {{{"the", "today", "a", "in", "near", "man", "took", "ball", "red", "in", "red", "today", "today"}, {"ball", "near", "the", "red", "red", "saw"}},
     {{"the", "today", "a", "in", "near", "man", "took", "ball", "red", "red", "in", "today"}, {"ball", "near", "red", "the", "red", "saw"}},
     62.2476337167},
    {{{"the", "big", "in", "red", "near"}, {"ball", "saw", "dog", "took", "saw", "the", "the", "ball", "ball", "ball"}, {"in", "a", "saw", "man", "cat", "saw", "ball", "ball", "the", "red", "near", "man", "red"}},
     {{"the", "big", "in", "red", "near"}, {"ball", "saw", "dog", "took", "saw", "the", "the", "ball", "ball", "ball"}, {"in", "a", "man", "saw", "cat", "saw", "ball", "ball", "the", "red", "near", "red", "man"}},
     79.4317736368},
    {{{"red", "near", "cat", "took", "saw", "cat", "park", "cat", "in", "cat", "the", "in", "today", "man"}},
     {{"red", "near", "took", "cat", "saw", "cat", "park", "cat", "in", "cat", "the", "today", "in", "man"}},
     53.4444593479},
    {{{"took", "saw", "park", "saw", "ball", "took", "red", "man", "big", "big", "today", "in"}, {"big", "dog", "a", "today", "dog", "took", "took", "dog", "cat", "man", "dog", "took", "big", "big"}, {"took", "a", "took", "took", "the", "park", "big", "park", "today", "today", "big", "man", "saw"}, {"took", "ball", "man", "red", "a", "dog", "a"}},
     {{"took", "saw", "park", "ball", "saw", "red", "man", "big", "big", "in", "today"}, {"big", "dog", "a", "today", "dog", "took", "took", "dog", "cat", "man", "dog", "took", "big", "big"}, {"a", "took", "took", "park", "the", "park", "big", "today", "today", "big", "man", "saw"}, {"took", "ball", "man", "red", "dog", "a"}},
     64.8612922999},
    {{{"the", "saw", "saw", "park", "in", "the", "near", "near", "near", "red", "man"}},
     {{"the", "saw", "saw", "park", "in", "the", "near", "near", "red", "man"}},
     87.0630454040},
    {{{"a", "dog", "near", "in", "dog", "a", "saw", "red", "park", "park", "man", "took"}, {"cat", "ball", "a", "in", "in", "dog", "took", "near"}, {"man", "dog", "near", "big", "big", "cat", "today", "near", "red", "man", "in"}, {"dog", "cat", "saw", "red", "saw", "saw"}},
     {{"dog", "a", "near", "dog", "in", "a", "saw", "red", "park", "park", "took", "man"}, {"cat", "ball", "a", "dog", "in", "in", "took", "near"}, {"man", "dog", "near", "big", "big", "cat", "near", "red", "man", "in"}, {"cat", "dog", "saw", "saw", "red", "saw"}},
     48.4116555207},
    {{{"big", "park", "ball", "took", "big", "cat"}, {"ball", "a", "saw", "saw", "took"}},
     {{"big", "park", "ball", "took", "cat", "big"}, {"ball", "a", "saw", "took"}},
     50.0683605404},
    {{{"park", "in", "red", "in", "took", "man", "red", "big", "took", "a", "the", "ball", "cat"}, {"saw", "park", "park", "today", "today", "today", "ball", "near", "in"}},
     {{"red", "park", "in", "in", "took", "man", "red", "big", "took", "the", "cat", "ball"}, {"saw", "park", "park", "today", "today", "today", "ball", "in", "near"}},
     59.9275211584},
    {{{"today", "near", "today", "the", "in", "saw", "a", "cat"}, {"near", "today", "big", "the", "red", "dog", "in", "in", "dog"}},
     {{"today", "near", "today", "the", "in", "saw", "a", "cat"}, {"near", "today", "big", "the", "red", "dog", "in", "in"}},
     93.9413062813},
  };
  return cases;
}

TEST(CorpusBleu, MatchesFrozenValues) {
  ASSERT_EQ(FrozenCases().size(), 20u);
  for (size_t k = 0; k < FrozenCases().size(); ++k) {
    const FrozenCase &c = FrozenCases()[k];
    EXPECT_NEAR(CorpusBleuScore(c.refs, c.hyps), c.bleu, 0.01) << "case " << k;
  }
}

TEST(CorpusBleu, MatchesReferenceImplementation) {
  Rng rng(5);
  const TokenList vocab = Words("a b c d e f");
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<TokenList> refs, hyps;
    const int sentences = 1 + static_cast<int>(rng.Below(4));
    for (int s = 0; s < sentences; ++s) {
      TokenList ref, hyp;
      const int n = 1 + static_cast<int>(rng.Below(9));
      const int m = 1 + static_cast<int>(rng.Below(9));
      for (int i = 0; i < n; ++i) ref.push_back(vocab[rng.Below(vocab.size())]);
      for (int i = 0; i < m; ++i) hyp.push_back(vocab[rng.Below(vocab.size())]);
      refs.push_back(ref);
      hyps.push_back(hyp);
    }
    EXPECT_NEAR(CorpusBleuScore(refs, hyps), ReferenceBleu(refs, hyps), 1e-9) << trial;
  }
}

TEST(CorpusBleu, Buckets) {
  ASSERT_EQ(BleuBuckets().size(), 7u);
  EXPECT_EQ(BleuBuckets().front().Label(), "1-10");
  EXPECT_EQ(BleuBuckets()[1].Label(), "11-15");
  EXPECT_EQ(BleuBuckets().back().Label(), "36+");

  TokenList longer;
  for (int i = 0; i < 40; ++i) longer.push_back("w" + std::to_string(i % 7));
  const std::vector<TokenList> refs = {Words("a b c d e"), Words("a b c d e f g h i j k l"),
                                       longer, Words("x y z")};
  std::vector<TokenList> hyps = refs;
  std::swap(hyps[1][0], hyps[1][5]);
  const BleuReport report = CorpusBleu(refs, hyps);
  ASSERT_EQ(report.buckets.size(), 7u);
  EXPECT_EQ(report.buckets[0].sentences, 2);
  EXPECT_DOUBLE_EQ(report.buckets[0].bleu, 100.0);
  EXPECT_EQ(report.buckets[1].sentences, 1);
  EXPECT_DOUBLE_EQ(report.buckets[1].bleu, CorpusBleuScore({refs[1]}, {hyps[1]}));
  EXPECT_EQ(report.buckets[2].sentences, 0);
  EXPECT_EQ(report.buckets[2].bleu, 0.0);
  EXPECT_EQ(report.buckets[6].sentences, 1);

  const std::string kv = report.KeyValues();
  EXPECT_EQ(kv.rfind("bleu=", 0), 0u);
  EXPECT_NE(kv.find("bucket.36+.sentences=1\n"), std::string::npos);
  EXPECT_NE(report.Table().find("36+"), std::string::npos);
}

TEST(ActionNeighbors, Cosine) {
  Matrix m(5, 2);
  m << 2, 1,   //
      1, 2,    //
      4, 2,    //
      -1, 2,   //
      0, 0;
  const std::vector<Neighbor> n = ActionNeighbors(m, 0, 4);
  ASSERT_EQ(n.size(), 4u);
  EXPECT_EQ(n[0].row, 2);
  EXPECT_NEAR(n[0].cosine, 1.0, 1e-15);
  EXPECT_EQ(n[1].row, 1);
  EXPECT_NEAR(n[1].cosine, 0.8, 1e-15);
  // Orthogonal row and zero row tie at 0 and keep row order.
  EXPECT_EQ(n[2].row, 3);
  EXPECT_NEAR(n[2].cosine, 0.0, 1e-15);
  EXPECT_EQ(n[3].row, 4);
  EXPECT_EQ(n[3].cosine, 0.0);
}

TEST(ActionNeighbors, ScaleInvariantAndBounded) {
  Rng rng(3);
  Matrix m(6, 4);
  for (Eigen::Index k = 0; k < m.size(); ++k) m(k) = rng.Uniform(-1, 1);
  const std::vector<Neighbor> a = ActionNeighbors(m, 2, 3);
  Matrix scaled = m;
  scaled.row(2) *= 7.5;
  scaled.row(4) *= 0.01;
  const std::vector<Neighbor> b = ActionNeighbors(scaled, 2, 3);
  ASSERT_EQ(a.size(), 3u);
  for (size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].row, b[k].row);
    EXPECT_NEAR(a[k].cosine, b[k].cosine, 1e-12);
    EXPECT_LE(std::abs(a[k].cosine), 1.0 + 1e-12);
  }
  EXPECT_EQ(ActionNeighbors(m, 0, 100).size(), 5u);
  EXPECT_THROW(ActionNeighbors(m, 6, 1), std::out_of_range);
  EXPECT_THROW(ActionNeighbors(m, -1, 1), std::out_of_range);
}

}  // namespace
}  // namespace synlin
