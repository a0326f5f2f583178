#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fedhgn/hypergraph.hpp"
#include "fedhgn/matrix.hpp"

namespace fedhgn {

// Factored linear head Θ = Θ^(1) Θ^(2) ... Θ^(N). No biases.
struct ClassifierParams {
  std::vector<Matrix> blocks;

  friend bool operator==(const ClassifierParams&, const ClassifierParams&) = default;
};

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState zeros_like(const ClassifierParams& params);
};

struct TrainConfig {
  double learning_rate = 0.01;
  double dropout_rate = 0.5;
  std::size_t hidden_dim = 16;
  std::size_t rounds = 150;
  std::size_t local_iters = 3;
  std::uint64_t seed = 0;
};

// One multiplicative mask per block input: entries are 0 or 1/(1-p).
using DropoutMasks = std::vector<Matrix>;

// Block shapes chain in_dim -> hidden -> ... -> num_classes, `num_blocks`
// matrices in total. Entries are uniform in ±sqrt(6 / (fan_in + fan_out)).
ClassifierParams init_params(std::size_t in_dim, std::size_t hidden_dim, std::size_t num_classes,
                             std::size_t num_blocks, std::uint64_t seed);

void check_chain(const ClassifierParams& params, std::size_t in_dim);

DropoutMasks sample_dropout(std::size_t rows, const ClassifierParams& params, double rate, std::mt19937_64& rng);

// logits = ((X ⊙ M0) Θ1 ⊙ M1) Θ2 ...; `masks` null means evaluation mode.
Matrix forward(const Matrix& x, const ClassifierParams& params, const DropoutMasks* masks = nullptr);

// Mean of -log softmax(logits_r)[label_r] over `rows`.
double cross_entropy_loss(const Matrix& logits, std::span<const Label> labels, std::span<const std::size_t> rows);

// Gradient of cross_entropy_loss(forward(X[rows], params, masks)) per block.
// Dropout masks, if given, are shaped for the gathered rows.
std::vector<Matrix> gradients(const Matrix& x, const ClassifierParams& params, std::span<const Label> labels,
                              std::span<const std::size_t> rows, const DropoutMasks* masks = nullptr);

void adam_step(ClassifierParams& params, const std::vector<Matrix>& grads, AdamState& state,
               double learning_rate);

// Fraction of `rows` whose argmax logit (lowest index on ties) equals the label.
double evaluate(const ClassifierParams& params, const Matrix& x, std::span<const Label> labels,
                std::span<const std::size_t> rows);

std::size_t count_correct(const Matrix& logits, std::span<const Label> labels, std::span<const std::size_t> rows);

// Full-batch trainer over one node set. Owns parameters, Adam moments and the
// dropout stream; clients and the centralised baseline both use it.
class LocalTrainer {
 public:
  LocalTrainer(Matrix features, std::vector<Label> labels, std::vector<std::size_t> train_rows,
               ClassifierParams initial, const TrainConfig& cfg, std::uint64_t dropout_seed);

  void step();
  void run(std::size_t iterations) {
    for (std::size_t i = 0; i < iterations; ++i) step();
  }

  const ClassifierParams& params() const noexcept { return params_; }
  void set_params(ClassifierParams params);
  const AdamState& optimizer() const noexcept { return adam_; }
  const Matrix& features() const noexcept { return features_; }
  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::size_t train_count() const noexcept { return train_rows_.size(); }

  // Evaluation-mode loss on the training rows.
  double train_loss() const;
  std::size_t correct(std::span<const std::size_t> rows) const;

 private:
  Matrix features_;
  Matrix train_features_;
  std::vector<Label> labels_;
  std::vector<std::size_t> train_rows_;
  std::vector<Label> train_labels_;
  std::vector<std::size_t> train_positions_;
  ClassifierParams params_;
  AdamState adam_;
  double learning_rate_;
  double dropout_rate_;
  std::mt19937_64 rng_;
};

}  // namespace fedhgn
