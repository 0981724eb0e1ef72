#include "synlin/decoder.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "synlin/commands.h"
#include "test_util.h"

namespace synlin {
namespace {

using testing::ILoveNlp;
using testing::RandomLanguageModel;
using testing::RandomLinearizer;
using testing::ReadData;

WordBag Bag(const std::vector<std::string> &forms) { return WordBag(forms); }

// Every complete derivation with its accumulated score, by brute force.
void Enumerate(const Decoder &decoder, const BeamItem &item, int steps,
               std::vector<BeamItem> *out) {
  if (item.state.num_steps() == steps) {
    out->push_back(item);
    return;
  }
  for (const ScoredAction &s : decoder.StepScores(item)) {
    Enumerate(decoder, decoder.Advance(item, s), steps, out);
  }
}

void ExpectValidOutput(const DecodeResult &r, const WordBag &bag, bool tree) {
  std::vector<std::string> got = r.words, want;
  for (const WordBag::Entry &e : bag.entries()) {
    for (int k = 0; k < e.count; ++k) want.push_back(e.form);
  }
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  EXPECT_EQ(got, want);
  if (!tree) {
    EXPECT_TRUE(r.arcs.empty());
    return;
  }
  const int n = bag.size();
  ASSERT_EQ(static_cast<int>(r.arcs.size()), n - 1);
  std::vector<int> head(n + 1, 0);
  for (const OutputArc &a : r.arcs) {
    ASSERT_GE(a.dependent, 1);
    ASSERT_LE(a.dependent, n);
    EXPECT_EQ(head[a.dependent], 0) << "two heads for " << a.dependent;
    head[a.dependent] = a.head;
  }
  // Every token reaches the single root without a cycle.
  for (int t = 1; t <= n; ++t) {
    int x = t, hops = 0;
    while (head[x] != 0 && hops <= n) {
      x = head[x];
      ++hops;
    }
    EXPECT_LE(hops, n);
  }
}

class DecoderTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = ReadData("toy_train.conll");
    full_ = RandomLinearizer(corpus_, Variant::kFull, 6, 12, 0, 0.5, 11);
    light_ = RandomLinearizer(corpus_, Variant::kLight, 6, 12, 0, 0.5, 12);
    lm_ = RandomLanguageModel(corpus_, 2, 8, 0.5, 13);
    lm_.params.output *= 5.0;
    feature_ = RandomLinearizer(corpus_, Variant::kFull, 6, 12, 8, 0.5, 14);
  }

  std::vector<DepSentence> corpus_;
  LinearizerModel full_, light_, feature_;
  LanguageModel lm_;
};

TEST_F(DecoderTest, ModeNames) {
  for (DecodeMode m : {DecodeMode::kSyn, DecodeMode::kLstm, DecodeMode::kJoint,
                       DecodeMode::kFeature}) {
    EXPECT_EQ(ParseDecodeMode(DecodeModeName(m)), m);
  }
  EXPECT_EQ(ParseDecodeMode("synxlstm"), DecodeMode::kFeature);
  EXPECT_THROW(ParseDecodeMode("ngram"), ConfigError);
}

TEST_F(DecoderTest, ModelsMustFitMode) {
  DecodeConfig c;
  c.mode = DecodeMode::kSyn;
  EXPECT_THROW(Decoder({nullptr, nullptr}, c), ConfigError);
  EXPECT_THROW(Decoder({&feature_, nullptr}, c), ConfigError);
  c.mode = DecodeMode::kLstm;
  EXPECT_THROW(Decoder({&full_, nullptr}, c), ConfigError);
  EXPECT_NO_THROW(Decoder({nullptr, &lm_}, c));
  c.mode = DecodeMode::kJoint;
  EXPECT_THROW(Decoder({&full_, nullptr}, c), ConfigError);
  EXPECT_THROW(Decoder({&feature_, &lm_}, c), ConfigError);
  c.mode = DecodeMode::kFeature;
  EXPECT_THROW(Decoder({&full_, &lm_}, c), ConfigError);
  EXPECT_NO_THROW(Decoder({&feature_, &lm_}, c));
  c.mode = DecodeMode::kSyn;
  c.beam_size = 0;
  EXPECT_THROW(Decoder({&full_, nullptr}, c), ConfigError);
}

TEST_F(DecoderTest, JointScoresAddWeightedLmOnShiftOnly) {
  DecodeConfig syn_config;
  DecodeConfig joint_config;
  joint_config.mode = DecodeMode::kJoint;
  joint_config.alpha = 0.4;
  Decoder syn({&full_, nullptr}, syn_config);
  Decoder joint({&full_, &lm_}, joint_config);
  const WordBag bag = Bag({"the", "dog", "saw", "a", "ball"});

  BeamItem s = syn.Start(bag), j = joint.Start(bag);
  int shifts_checked = 0, others_checked = 0;
  for (int step = 0; step < 9; ++step) {
    const std::vector<ScoredAction> a = syn.StepScores(s), b = joint.StepScores(j);
    ASSERT_EQ(a.size(), b.size());
    std::vector<int> ids;
    for (const ScoredAction &x : a) {
      if (x.action.is_shift()) ids.push_back(lm_.indexers.WordId(bag.entries()[x.action.form].form));
    }
    const std::vector<double> lm_logp =
        ids.empty() ? std::vector<double>{} : LmLogProbs(lm_.params, *j.lm, ids);
    size_t shift_k = 0;
    for (size_t k = 0; k < a.size(); ++k) {
      ASSERT_EQ(a[k].action, b[k].action);
      if (a[k].action.is_shift()) {
        EXPECT_DOUBLE_EQ(b[k].score, a[k].score + 0.4 * lm_logp[shift_k++]);
        ++shifts_checked;
      } else {
        EXPECT_EQ(b[k].score, a[k].score);
        ++others_checked;
      }
    }
    // Walk down the highest-scoring syn action.
    const auto best = std::max_element(a.begin(), a.end(), [](auto &x, auto &y) {
      return x.score < y.score;
    });
    const ScoredAction pick = *best;
    s = syn.Advance(s, pick);
    j = joint.Advance(j, pick);
  }
  EXPECT_GT(shifts_checked, 0);
  EXPECT_GT(others_checked, 0);
}

TEST_F(DecoderTest, JointWithZeroWeightMatchesSyn) {
  DecodeConfig syn_config;
  syn_config.beam_size = 4;
  DecodeConfig joint_config = syn_config;
  joint_config.mode = DecodeMode::kJoint;
  joint_config.alpha = 0.0;
  Decoder syn({&full_, nullptr}, syn_config);
  Decoder joint({&full_, &lm_}, joint_config);
  for (size_t k = 0; k < 5; ++k) {
    const WordBag bag = ToBag(corpus_[k]);
    const DecodeResult a = syn.Beam(bag), b = joint.Beam(bag);
    EXPECT_EQ(a.words, b.words);
    EXPECT_EQ(a.derivation, b.derivation);
    EXPECT_EQ(a.score, b.score);
  }
}

TEST_F(DecoderTest, RenormalizedJointScoresSumToOne) {
  DecodeConfig c;
  c.mode = DecodeMode::kJoint;
  c.renormalize = true;
  Decoder joint({&full_, &lm_}, c);
  const BeamItem start = joint.Start(Bag({"the", "dog", "saw"}));
  double mass = 0.0;
  for (const ScoredAction &s : joint.StepScores(start)) mass += std::exp(s.score);
  EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST_F(DecoderTest, LightTwoWordBagHasFourDerivations) {
  DecodeConfig c;
  Decoder d({&light_, nullptr}, c);
  long count = 0;
  d.Exhaustive(Bag({"dog", "saw"}), &count);
  EXPECT_EQ(count, 4);
}

TEST_F(DecoderTest, LstmModeCountsDistinctOrders) {
  DecodeConfig c;
  c.mode = DecodeMode::kLstm;
  Decoder d({nullptr, &lm_}, c);
  long count = 0;
  d.Exhaustive(Bag({"the", "dog", "saw", "a"}), &count);
  EXPECT_EQ(count, 24);
  d.Exhaustive(Bag({"the", "the", "dog"}), &count);
  EXPECT_EQ(count, 3);
}

TEST_F(DecoderTest, FullDerivationCountMatchesEnumeration) {
  DecodeConfig c;
  Decoder d({&full_, nullptr}, c);
  const WordBag bag = Bag({"dog", "saw"});
  std::vector<BeamItem> all;
  Enumerate(d, d.Start(bag), d.NumSteps(2), &all);
  long count = 0;
  d.Exhaustive(bag, &count);
  EXPECT_EQ(count, static_cast<long>(all.size()));
  // Two orders, a tag per word, two arc directions, one label.
  const long tags = full_.indexers.num_real_pos();
  const long labels = full_.indexers.num_real_labels();
  EXPECT_EQ(count, 2 * tags * tags * 2 * labels);
}

TEST_F(DecoderTest, SingleWordBag) {
  for (const LinearizerModel *m : {&full_, &light_}) {
    DecodeConfig c;
    c.beam_size = 3;
    Decoder d({m, nullptr}, c);
    const DecodeResult r = d.Beam(Bag({"go"}));
    EXPECT_EQ(r.words, std::vector<std::string>{"go"});
    EXPECT_TRUE(r.arcs.empty());
    EXPECT_EQ(static_cast<int>(r.derivation.size()), d.NumSteps(1));
    EXPECT_EQ(r.derivation.back(), "End");
  }
}

TEST_F(DecoderTest, BeamOfOneIsGreedy) {
  DecodeConfig c;
  Decoder d({&full_, nullptr}, c);
  const WordBag bag = ToBag(corpus_[3]);
  BeamItem item = d.Start(bag);
  for (int step = 0; step < d.NumSteps(bag.size()); ++step) {
    std::vector<ScoredAction> scored = d.StepScores(item);
    ScoredAction best = scored.front();
    for (const ScoredAction &s : scored) {
      if (s.score > best.score ||
          (s.score == best.score && CompareActions(s.action, best.action) < 0)) {
        best = s;
      }
    }
    item = d.Advance(item, best);
  }
  const DecodeResult r = d.Beam(bag);
  EXPECT_EQ(r.actions, item.state.History());
  EXPECT_DOUBLE_EQ(r.score, item.score);
}

TEST_F(DecoderTest, ExhaustiveRefusesLargeBags) {
  DecodeConfig c;
  Decoder syn({&light_, nullptr}, c);
  EXPECT_EQ(syn.ExhaustiveLimit(), 6);
  EXPECT_THROW(syn.Exhaustive(Bag({"a", "b", "c", "d", "e", "f", "g"})), SearchBoundError);
  c.mode = DecodeMode::kLstm;
  Decoder lstm({nullptr, &lm_}, c);
  EXPECT_EQ(lstm.ExhaustiveLimit(), 8);
  EXPECT_THROW(lstm.Exhaustive(Bag({"a", "b", "c", "d", "e", "f", "g", "h", "i"})),
               SearchBoundError);
}

TEST_F(DecoderTest, ExhaustiveIsArgmaxAndWideBeamFindsIt) {
  const WordBag bag = Bag({"the", "dog", "saw", "a"});
  for (DecodeMode mode : {DecodeMode::kSyn, DecodeMode::kJoint, DecodeMode::kLstm}) {
    DecodeConfig c;
    c.mode = mode;
    c.beam_size = 100000;
    const LinearizerModel *syn = mode == DecodeMode::kLstm ? nullptr : &light_;
    const LanguageModel *lm = mode == DecodeMode::kSyn ? nullptr : &lm_;
    Decoder d({syn, lm}, c);
    std::vector<BeamItem> all;
    Enumerate(d, d.Start(bag), d.NumSteps(bag.size()), &all);
    const DecodeResult best = d.Exhaustive(bag);
    for (const BeamItem &item : all) EXPECT_LE(item.score, best.score);
    const DecodeResult wide = d.Beam(bag);
    EXPECT_EQ(wide.actions, best.actions) << DecodeModeName(mode);
    EXPECT_EQ(wide.score, best.score);
  }
}

TEST_F(DecoderTest, OutputsAreValid) {
  const std::vector<DepSentence> dev = ReadData("toy_dev.conll");
  struct Case {
    DecodeMode mode;
    const LinearizerModel *syn;
    bool tree;
  };
  for (const Case &cs : {Case{DecodeMode::kSyn, &full_, true}, Case{DecodeMode::kSyn, &light_, true},
                         Case{DecodeMode::kJoint, &full_, true},
                         Case{DecodeMode::kFeature, &feature_, true},
                         Case{DecodeMode::kLstm, nullptr, false}}) {
    DecodeConfig c;
    c.mode = cs.mode;
    c.beam_size = 4;
    Decoder d({cs.syn, cs.mode == DecodeMode::kSyn ? nullptr : &lm_}, c);
    for (size_t k = 0; k < 6; ++k) {
      const WordBag bag = ToBag(dev[k]);
      const DecodeResult r = d.Beam(bag);
      ExpectValidOutput(r, bag, cs.tree);
      EXPECT_EQ(static_cast<int>(r.derivation.size()), d.NumSteps(bag.size()));
      EXPECT_TRUE(std::isfinite(r.score));
      EXPECT_LE(r.score, 0.0);
    }
  }
}

TEST_F(DecoderTest, UnknownWordsDecode) {
  DecodeConfig c;
  c.mode = DecodeMode::kJoint;
  c.beam_size = 2;
  Decoder d({&full_, &lm_}, c);
  const WordBag bag = Bag({"zebra", "saw", "the", "quokka"});
  ExpectValidOutput(d.Beam(bag), bag, true);
}

TEST(DecoderOverfit, RecoversILoveNlp) {
  const std::vector<DepSentence> corpus = {ILoveNlp()};
  TrainConfig config;
  config.embed_dim = 8;
  config.hidden_dim = 16;
  config.dropout = 0.0;
  config.learning_rate = 0.1;
  config.epochs = 300;
  config.batch_size = 1;
  const LinearizerModel model = TrainLinearizer(corpus, Variant::kFull, config, 1);

  DecodeConfig c;
  Decoder d({&model, nullptr}, c);
  const DecodeResult r = d.Beam(ToBag(corpus[0]));
  EXPECT_EQ(r.words, (std::vector<std::string>{"I", "love", "NLP"}));
  std::set<std::tuple<int, int, std::string>> arcs;
  for (const OutputArc &a : r.arcs) arcs.insert({a.head, a.dependent, a.label});
  EXPECT_EQ(arcs, (std::set<std::tuple<int, int, std::string>>{{2, 1, "nsubj"}, {2, 3, "dobj"}}));
  EXPECT_EQ(r.derivation, (std::vector<std::string>{"Shift-I", "Pos-PRP", "Shift-love",
                                                    "Pos-VBP", "Shift-NLP", "Pos-NNP",
                                                    "RArc-dobj", "LArc-nsubj", "End"}));
}

}  // namespace
}  // namespace synlin
