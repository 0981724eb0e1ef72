#include "synlin/grad_check.h"

#include <gtest/gtest.h>

#include <cmath>

#include "synlin/commands.h"
#include "synlin/ffnn.h"
#include "test_util.h"

namespace synlin {
namespace {

TEST(RelativeError, Basics) {
  EXPECT_EQ(RelativeError(0.0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(RelativeError(1.0, 1.1), (1.1 - 1.0) / 1.1);
  EXPECT_DOUBLE_EQ(RelativeError(-2.0, 2.0), 2.0);
  EXPECT_DOUBLE_EQ(RelativeError(1e-12, 3e-12), 2e-12);
}

TEST(CheckGradients, Quadratic) {
  // f(w) = sum w_i^3, gradient 3 w_i^2.
  Matrix w(2, 3);
  w << 0.5, -1.0, 2.0, 0.1, 0.0, -0.7;
  Matrix g = 3.0 * w.array().square();
  const Matrix original = w;
  TensorList params{{"w", &w}};
  TensorList grads{{"w", &g}};
  auto loss = [&]() { return w.array().cube().sum(); };
  GradCheckReport report = CheckGradients(params, grads, loss, 1e-5, 100, 1);
  EXPECT_LT(report.max_relative_error, 1e-8);
  EXPECT_EQ(report.coordinates, 6);
  EXPECT_TRUE(w == original);

  g(1, 2) += 0.5;
  report = CheckGradients(params, grads, loss, 1e-5, 100, 1);
  EXPECT_GT(report.max_relative_error, 0.1);
  EXPECT_EQ(report.worst_tensor, "w");
  EXPECT_EQ(report.worst_index, 5);
}

class FfnnGradTest : public ::testing::Test {
 protected:
  FfnnGradTest()
      : corpus_(testing::ReadData("toy_train.conll")),
        ix_(BuildIndexers(corpus_, 1)),
        system_(ix_, Variant::kFull) {
    for (TrainingExample &e : OracleExamples(corpus_[0], system_)) batch_.push_back(e);
    Rng rng(5);
    params_ = LinearizerParams::Random(ScorerShape::For(system_, 6, 10, 0), 0.5, &rng);
  }

  std::vector<DepSentence> corpus_;
  Indexers ix_;
  TransitionSystem system_;
  std::vector<TrainingExample> batch_;
  LinearizerParams params_;
};

TEST_F(FfnnGradTest, UnusedEmbeddingsHaveExactlyZeroGradient) {
  std::vector<bool> used(ix_.num_words(), false);
  for (const TrainingExample &e : batch_) {
    for (int id : e.features.words) used[id] = true;
  }
  int unused = -1;
  for (int id = 0; id < ix_.num_words() && unused < 0; ++id) {
    if (!used[id]) unused = id;
  }
  ASSERT_GE(unused, 0);
  LinearizerParams grads;
  LossAndGradient(params_, batch_, 0.0, 0.0, nullptr, &grads);
  EXPECT_TRUE((grads.word_embed.col(unused).array() == 0.0).all());
  LinearizerParams plus = params_, minus = params_;
  plus.word_embed(0, unused) += 1e-5;
  minus.word_embed(0, unused) -= 1e-5;
  EXPECT_EQ(Loss(plus, batch_, 0.0) - Loss(minus, batch_, 0.0), 0.0);
}

TEST_F(FfnnGradTest, LargeStepShowsTruncationError) {
  const double fine = FfnnGradCheck(params_, batch_, 0.0, 1e-5, 30, 4).max_relative_error;
  const double coarse = FfnnGradCheck(params_, batch_, 0.0, 1e-1, 30, 4).max_relative_error;
  EXPECT_LT(fine, 1e-4);
  EXPECT_GT(coarse, 10 * fine);
}

}  // namespace
}  // namespace synlin
