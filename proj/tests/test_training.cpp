#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fedhgn/error.hpp"
#include "fedhgn/training.hpp"
#include "test_support.hpp"

namespace fedhgn {
namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), 0);
  return r;
}

// Loss straight from the definition, no max subtraction.
double scalar_loss(const Matrix& logits, const std::vector<Label>& labels, const std::vector<std::size_t>& rows) {
  double total = 0.0;
  for (std::size_t r : rows) {
    double z = 0.0;
    for (std::size_t c = 0; c < logits.cols(); ++c) z += std::exp(logits(r, c));
    total -= std::log(std::exp(logits(r, static_cast<std::size_t>(labels[r]))) / z);
  }
  return total / static_cast<double>(rows.size());
}

double loss_of(const Matrix& x, const ClassifierParams& p, const std::vector<Label>& labels,
               const std::vector<std::size_t>& rows, const DropoutMasks* masks) {
  Matrix picked = gather_rows(x, rows);
  std::vector<Label> y;
  for (std::size_t r : rows) y.push_back(labels[r]);
  return cross_entropy_loss(forward(picked, p, masks), y, all_rows(rows.size()));
}

TEST(Forward, IdentityBlockReturnsInput) {
  std::mt19937_64 rng(1);
  const Matrix x = testing::random_matrix(5, 4, rng);
  ClassifierParams p{{Matrix::identity(4)}};
  EXPECT_EQ(forward(x, p), x);
}

TEST(Forward, ZeroParamsGiveUniformLoss) {
  std::mt19937_64 rng(2);
  const Matrix x = testing::random_matrix(6, 3, rng);
  ClassifierParams p{{Matrix(3, 5), Matrix(5, 4)}};
  const std::vector<Label> y{0, 1, 2, 3, 0, 1};
  const auto logits = forward(x, p);
  for (double v : logits.values()) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(cross_entropy_loss(logits, y, all_rows(6)), std::log(4.0), 1e-12);
}

TEST(Forward, MatchesNaiveChain) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = testing::random_matrix(7, 5, rng);
    const auto p = init_params(5, 6, 3, 1 + trial % 4, trial);
    Matrix expect = x;
    for (const auto& b : p.blocks) expect = testing::naive_matmul(expect, b);
    EXPECT_LT(max_abs_diff(forward(x, p), expect), 1e-12);
  }
}

TEST(Forward, RejectsBrokenChain) {
  ClassifierParams p{{Matrix(3, 4), Matrix(5, 2)}};
  try {
    forward(Matrix(2, 3), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
  }
}

TEST(CrossEntropy, MatchesScalarLoop) {
  std::mt19937_64 rng(4);
  const Matrix logits = testing::random_matrix(20, 6, rng, 3.0);
  std::vector<Label> y;
  for (int i = 0; i < 20; ++i) y.push_back(i % 6);
  const std::vector<std::size_t> rows{0, 3, 4, 9, 15, 19};
  EXPECT_NEAR(cross_entropy_loss(logits, y, rows), scalar_loss(logits, y, rows), 1e-12);
}

TEST(CrossEntropy, StableForHugeLogits) {
  Matrix logits(1, 2);
  logits(0, 0) = 1000.0;
  logits(0, 1) = 0.0;
  const std::vector<Label> y{1};
  EXPECT_NEAR(cross_entropy_loss(logits, y, all_rows(1)), 1000.0, 1e-9);
}

TEST(CrossEntropy, EmptyMask) {
  try {
    cross_entropy_loss(Matrix(2, 2), std::vector<Label>{0, 1}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyMask);
  }
}

TEST(Gradients, MatchCentralDifferences) {
  int configs = 0;
  for (std::uint64_t seed = 0; seed < 24; ++seed) {
    std::mt19937_64 rng(seed);
    const std::size_t n = 6 + seed % 5, in = 2 + seed % 4, hidden = 3 + seed % 3, classes = 2 + seed % 3;
    const std::size_t blocks = 1 + seed % 3;
    const Matrix x = testing::random_matrix(n, in, rng);
    auto p = init_params(in, hidden, classes, blocks, seed);
    std::vector<Label> y;
    for (std::size_t i = 0; i < n; ++i) y.push_back(static_cast<Label>((i * 7 + seed) % classes));
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < n; i += 1 + seed % 2) rows.push_back(i);

    DropoutMasks masks;
    const DropoutMasks* mp = nullptr;
    if (seed % 2 == 1) {
      masks = sample_dropout(rows.size(), p, 0.3, rng);
      mp = &masks;
    }
    const auto g = gradients(x, p, y, rows, mp);
    ASSERT_EQ(g.size(), blocks);
    const double h = 1e-5;
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t i = 0; i < p.blocks[b].size(); ++i) {
        double& w = p.blocks[b].values()[i];
        const double keep = w;
        w = keep + h;
        const double up = loss_of(x, p, y, rows, mp);
        w = keep - h;
        const double down = loss_of(x, p, y, rows, mp);
        w = keep;
        const double numeric = (up - down) / (2 * h);
        const double analytic = g[b].values()[i];
        const double scale = std::max({std::abs(numeric), std::abs(analytic), 1e-3});
        EXPECT_LT(std::abs(numeric - analytic) / scale, 1e-4) << "seed " << seed << " block " << b;
      }
    }
    ++configs;
  }
  EXPECT_GE(configs, 20);
}

TEST(Gradients, ClosedFormSingleRow) {
  // x = [1], Θ1 = [[a]], Θ2 = [[b, 0]], label 0: z = [ab, 0].
  const double a = 0.7, b = -1.3;
  ClassifierParams p{{Matrix(1, 1, a), Matrix(1, 2)}};
  p.blocks[1](0, 0) = b;
  const std::vector<Label> y{0};
  const auto g = gradients(Matrix(1, 1, 1.0), p, y, all_rows(1));
  const double p0 = std::exp(a * b) / (std::exp(a * b) + 1.0);
  EXPECT_NEAR(g[0](0, 0), (p0 - 1.0) * b, 1e-12);
  EXPECT_NEAR(g[1](0, 0), (p0 - 1.0) * a, 1e-12);
  EXPECT_NEAR(g[1](0, 1), (1.0 - p0) * a, 1e-12);
}

TEST(Adam, ZeroGradientLeavesParams) {
  auto p = init_params(3, 4, 2, 2, 5);
  const auto before = p;
  auto state = AdamState::zeros_like(p);
  std::vector<Matrix> zero{Matrix(3, 4), Matrix(4, 2)};
  for (int i = 0; i < 5; ++i) adam_step(p, zero, state, 0.01);
  EXPECT_EQ(p, before);
  EXPECT_EQ(state.step, 5u);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::mt19937_64 rng(6);
  ClassifierParams p{{testing::random_matrix(4, 3, rng)}};
  const auto before = p;
  auto state = AdamState::zeros_like(p);
  const std::vector<Matrix> g{testing::random_matrix(4, 3, rng)};
  adam_step(p, g, state, 0.01);
  for (std::size_t i = 0; i < 12; ++i) {
    const double gi = g[0].values()[i];
    const double moved = p.blocks[0].values()[i] - before.blocks[0].values()[i];
    EXPECT_NEAR(moved, -0.01 * (gi > 0 ? 1.0 : -1.0), 1e-6);
  }
}

TEST(Adam, DescendsQuadraticBowl) {
  ClassifierParams p{{Matrix(1, 2, 3.0)}};
  auto state = AdamState::zeros_like(p);
  double prev = INFINITY;
  for (int i = 0; i < 200; ++i) {
    const auto& w = p.blocks[0];
    const double f = w(0, 0) * w(0, 0) + w(0, 1) * w(0, 1);
    EXPECT_LT(f, prev);
    prev = f;
    Matrix g(1, 2);
    g(0, 0) = 2 * w(0, 0);
    g(0, 1) = 2 * w(0, 1);
    adam_step(p, {g}, state, 0.01);
  }
}

TEST(Adam, ShapeMismatch) {
  auto p = init_params(3, 4, 2, 2, 5);
  auto state = AdamState::zeros_like(p);
  try {
    adam_step(p, {Matrix(3, 4), Matrix(2, 4)}, state, 0.01);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ShapeMismatch);
  }
}

TEST(Evaluate, TiesGoToLowestClass) {
  // Zero logits everywhere: argmax is class 0.
  ClassifierParams p{{Matrix(2, 3)}};
  const std::vector<Label> y{0, 1, 0, 2};
  EXPECT_DOUBLE_EQ(evaluate(p, Matrix(4, 2, 1.0), y, all_rows(4)), 0.5);
}

TEST(Evaluate, Subset) {
  ClassifierParams p{{Matrix::identity(2)}};
  Matrix x(3, 2);
  x(0, 0) = 1;  // class 0
  x(1, 1) = 1;  // class 1
  x(2, 0) = 1;  // class 0
  const std::vector<Label> y{0, 0, 0};
  EXPECT_DOUBLE_EQ(evaluate(p, x, y, std::vector<std::size_t>{0, 1}), 0.5);
  EXPECT_DOUBLE_EQ(evaluate(p, x, y, std::vector<std::size_t>{2}), 1.0);
}

TEST(InitParams, GlorotBoundsAndShapes) {
  const auto p = init_params(100, 16, 7, 3, 9);
  ASSERT_EQ(p.blocks.size(), 3u);
  EXPECT_EQ(p.blocks[0].rows(), 100u);
  EXPECT_EQ(p.blocks[0].cols(), 16u);
  EXPECT_EQ(p.blocks[1].rows(), 16u);
  EXPECT_EQ(p.blocks[1].cols(), 16u);
  EXPECT_EQ(p.blocks[2].cols(), 7u);
  const double bound = std::sqrt(6.0 / 116.0);
  for (double v : p.blocks[0].values()) EXPECT_LE(std::abs(v), bound);
  EXPECT_EQ(init_params(100, 16, 7, 3, 9), p);
  EXPECT_NE(init_params(100, 16, 7, 3, 10), p);
  EXPECT_EQ(init_params(8, 99, 4, 1, 1).blocks[0].cols(), 4u);
}

TEST(Dropout, MaskExpectationIsOne) {
  ClassifierParams p{{Matrix(4, 3), Matrix(3, 2)}};
  std::mt19937_64 rng(11);
  std::vector<double> sum(12, 0.0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const auto masks = sample_dropout(3, p, 0.5, rng);
    ASSERT_EQ(masks[0].rows(), 3u);
    ASSERT_EQ(masks[0].cols(), 4u);
    ASSERT_EQ(masks[1].cols(), 3u);
    for (std::size_t k = 0; k < 12; ++k) {
      const double v = masks[0].values()[k];
      EXPECT_TRUE(v == 0.0 || v == 2.0);
      sum[k] += v;
    }
  }
  double mean = 0.0;
  for (double s : sum) mean += s / draws / 12.0;
  EXPECT_NEAR(mean, 1.0, 0.01);
}

TEST(Dropout, RejectsBadRate) {
  std::mt19937_64 rng(1);
  ClassifierParams p{{Matrix(2, 2)}};
  EXPECT_THROW(sample_dropout(2, p, 1.0, rng), Error);
  EXPECT_THROW(sample_dropout(2, p, -0.1, rng), Error);
}

TEST(LocalTrainer, DeterministicAndLearns) {
  std::mt19937_64 rng(12);
  Matrix x(40, 2);
  std::vector<Label> y;
  for (std::size_t i = 0; i < 40; ++i) {
    const Label c = static_cast<Label>(i % 2);
    x(i, 0) = c == 0 ? 1.0 : -1.0;
    x(i, 1) = std::normal_distribution<double>(0.0, 0.1)(rng);
    y.push_back(c);
  }
  TrainConfig cfg;
  cfg.dropout_rate = 0.2;
  cfg.learning_rate = 0.05;
  const auto init = init_params(2, 4, 2, 2, 3);
  LocalTrainer a(x, y, all_rows(40), init, cfg, 99);
  LocalTrainer b(x, y, all_rows(40), init, cfg, 99);
  const double start = a.train_loss();
  a.run(60);
  b.run(60);
  EXPECT_EQ(a.params(), b.params());
  EXPECT_EQ(a.optimizer().step, 60u);
  EXPECT_LT(a.train_loss(), start);
  EXPECT_EQ(a.correct(all_rows(40)), 40u);
}

TEST(LocalTrainer, SetParamsChecksShape) {
  const auto init = init_params(2, 4, 2, 2, 3);
  LocalTrainer t(Matrix(3, 2), {0, 1, 0}, {0, 1}, init, TrainConfig{}, 1);
  EXPECT_THROW(t.set_params(init_params(2, 5, 2, 2, 3)), Error);
  EXPECT_THROW(t.set_params(init_params(2, 4, 2, 3, 3)), Error);
  t.set_params(init_params(2, 4, 2, 2, 4));
  EXPECT_EQ(t.params(), init_params(2, 4, 2, 2, 4));
}

TEST(LocalTrainer, NoTrainRowsIsNoop) {
  const auto init = init_params(2, 4, 2, 2, 3);
  LocalTrainer t(Matrix(3, 2, 1.0), {0, 1, 0}, {}, init, TrainConfig{}, 1);
  t.run(5);
  EXPECT_EQ(t.params(), init);
  EXPECT_EQ(t.train_loss(), 0.0);
}

}  // namespace
}  // namespace fedhgn
