#include "fedhgn/training.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fedhgn/error.hpp"

namespace fedhgn {

namespace {

void require_rows(std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error(ErrorKind::EmptyMask, "mask selects no nodes");
}

std::size_t label_index(Label l, std::size_t num_classes) {
  if (l < 0 || static_cast<std::size_t>(l) >= num_classes) {
    throw Error(ErrorKind::InvalidArgument, "label " + std::to_string(l) + " outside [0, " +
                                                std::to_string(num_classes) + ")");
  }
  return static_cast<std::size_t>(l);
}

// Row-wise softmax, max-subtracted.
Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = std::exp(in[c] - mx);
      z += o[c];
    }
    for (double& p : o) p /= z;
  }
  return out;
}

}  // namespace

AdamState AdamState::zeros_like(const ClassifierParams& params) {
  AdamState s;
  for (const auto& b : params.blocks) {
    s.first_moment.emplace_back(b.rows(), b.cols());
    s.second_moment.emplace_back(b.rows(), b.cols());
  }
  return s;
}

ClassifierParams init_params(std::size_t in_dim, std::size_t hidden_dim, std::size_t num_classes,
                             std::size_t num_blocks, std::uint64_t seed) {
  if (num_blocks < 1) throw Error(ErrorKind::InvalidArgument, "classifier needs at least one block");
  std::mt19937_64 rng(seed);
  ClassifierParams params;
  std::size_t fan_in = in_dim;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const std::size_t fan_out = b + 1 == num_blocks ? num_classes : hidden_dim;
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Matrix block(fan_in, fan_out);
    for (double& v : block.values()) v = dist(rng);
    params.blocks.push_back(std::move(block));
    fan_in = fan_out;
  }
  return params;
}

void check_chain(const ClassifierParams& params, std::size_t in_dim) {
  if (params.blocks.empty()) throw Error(ErrorKind::DimensionMismatch, "classifier has no blocks");
  std::size_t dim = in_dim;
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    if (params.blocks[b].rows() != dim) {
      throw Error(ErrorKind::DimensionMismatch, "block " + std::to_string(b) + " expects input dim " +
                                                    std::to_string(params.blocks[b].rows()) + ", got " +
                                                    std::to_string(dim));
    }
    dim = params.blocks[b].cols();
  }
}

DropoutMasks sample_dropout(std::size_t rows, const ClassifierParams& params, double rate, std::mt19937_64& rng) {
  if (rate < 0.0 || rate >= 1.0) throw Error(ErrorKind::InvalidArgument, "dropout rate must lie in [0, 1)");
  const double keep_scale = 1.0 / (1.0 - rate);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DropoutMasks masks;
  for (const auto& block : params.blocks) {
    Matrix m(rows, block.rows());
    for (double& v : m.values()) v = unit(rng) < rate ? 0.0 : keep_scale;
    masks.push_back(std::move(m));
  }
  return masks;
}

Matrix forward(const Matrix& x, const ClassifierParams& params, const DropoutMasks* masks) {
  check_chain(params, x.cols());
  if (masks != nullptr && masks->size() != params.blocks.size()) {
    throw Error(ErrorKind::DimensionMismatch, "need one dropout mask per block");
  }
  Matrix act = x;
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    if (masks != nullptr) act = hadamard(act, (*masks)[b]);
    act = matmul(act, params.blocks[b]);
  }
  return act;
}

double cross_entropy_loss(const Matrix& logits, std::span<const Label> labels, std::span<const std::size_t> rows) {
  require_rows(rows);
  double total = 0.0;
  for (std::size_t r : rows) {
    auto z = logits.row(r);
    const double mx = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - mx);
    const std::size_t y = label_index(labels[r], logits.cols());
    total += -(z[y] - mx - std::log(sum));
  }
  return total / static_cast<double>(rows.size());
}

std::vector<Matrix> gradients(const Matrix& x, const ClassifierParams& params, std::span<const Label> labels,
                              std::span<const std::size_t> rows, const DropoutMasks* masks) {
  require_rows(rows);
  check_chain(params, x.cols());
  const std::size_t nb = params.blocks.size();
  if (masks != nullptr && masks->size() != nb) {
    throw Error(ErrorKind::DimensionMismatch, "need one dropout mask per block");
  }

  // inputs[b] is the (masked) input fed to block b.
  std::vector<Matrix> inputs;
  inputs.reserve(nb);
  Matrix act = gather_rows(x, rows);
  for (std::size_t b = 0; b < nb; ++b) {
    if (masks != nullptr) act = hadamard(act, (*masks)[b]);
    inputs.push_back(act);
    act = matmul(act, params.blocks[b]);
  }

  Matrix delta = softmax_rows(act);
  const double inv_m = 1.0 / static_cast<double>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    delta(i, label_index(labels[rows[i]], delta.cols())) -= 1.0;
    for (double& v : delta.row(i)) v *= inv_m;
  }

  std::vector<Matrix> grads(nb);
  for (std::size_t b = nb; b-- > 0;) {
    grads[b] = matmul_transpose_a(inputs[b], delta);
    if (b == 0) break;
    delta = matmul_transpose_b(delta, params.blocks[b]);
    if (masks != nullptr) delta = hadamard(delta, (*masks)[b]);
  }
  return grads;
}

void adam_step(ClassifierParams& params, const std::vector<Matrix>& grads, AdamState& state,
               double learning_rate) {
  if (grads.size() != params.blocks.size() || state.first_moment.size() != params.blocks.size()) {
    throw Error(ErrorKind::ShapeMismatch, "gradient/moment block count differs from params");
  }
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    if (!grads[b].same_shape(params.blocks[b]) || !state.first_moment[b].same_shape(params.blocks[b]) ||
        !state.second_moment[b].same_shape(params.blocks[b])) {
      throw Error(ErrorKind::ShapeMismatch, "block " + std::to_string(b) + " shape differs");
    }
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(state.beta1, t);
  const double bias2 = 1.0 - std::pow(state.beta2, t);
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    auto p = params.blocks[b].values();
    auto g = grads[b].values();
    auto m = state.first_moment[b].values();
    auto v = state.second_moment[b].values();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      p[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
  }
}

std::size_t count_correct(const Matrix& logits, std::span<const Label> labels, std::span<const std::size_t> rows) {
  std::size_t correct = 0;
  for (std::size_t r : rows) {
    auto z = logits.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < z.size(); ++c) {
      if (z[c] > z[best]) best = c;
    }
    if (labels[r] >= 0 && static_cast<std::size_t>(labels[r]) == best) ++correct;
  }
  return correct;
}

double evaluate(const ClassifierParams& params, const Matrix& x, std::span<const Label> labels,
                std::span<const std::size_t> rows) {
  require_rows(rows);
  const Matrix logits = forward(gather_rows(x, rows), params);
  std::vector<Label> picked;
  picked.reserve(rows.size());
  for (std::size_t r : rows) picked.push_back(labels[r]);
  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), 0);
  return static_cast<double>(count_correct(logits, picked, all)) / static_cast<double>(rows.size());
}

LocalTrainer::LocalTrainer(Matrix features, std::vector<Label> labels, std::vector<std::size_t> train_rows,
                           ClassifierParams initial, const TrainConfig& cfg, std::uint64_t dropout_seed)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      train_rows_(std::move(train_rows)),
      params_(std::move(initial)),
      adam_(AdamState::zeros_like(params_)),
      learning_rate_(cfg.learning_rate),
      dropout_rate_(cfg.dropout_rate),
      rng_(dropout_seed) {
  check_chain(params_, features_.cols());
  if (labels_.size() != features_.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "labels and features disagree on node count");
  }
  train_features_ = gather_rows(features_, train_rows_);
  for (std::size_t r : train_rows_) train_labels_.push_back(labels_[r]);
  train_positions_.resize(train_rows_.size());
  std::iota(train_positions_.begin(), train_positions_.end(), 0);
}

void LocalTrainer::step() {
  if (train_rows_.empty()) return;
  if (dropout_rate_ > 0.0) {
    const auto masks = sample_dropout(train_rows_.size(), params_, dropout_rate_, rng_);
    adam_step(params_, gradients(train_features_, params_, train_labels_, train_positions_, &masks), adam_,
              learning_rate_);
  } else {
    adam_step(params_, gradients(train_features_, params_, train_labels_, train_positions_), adam_,
              learning_rate_);
  }
}

void LocalTrainer::set_params(ClassifierParams params) {
  if (params.blocks.size() != params_.blocks.size()) {
    throw Error(ErrorKind::ShapeMismatch, "replacement params have a different block count");
  }
  for (std::size_t b = 0; b < params.blocks.size(); ++b) {
    if (!params.blocks[b].same_shape(params_.blocks[b])) {
      throw Error(ErrorKind::ShapeMismatch, "replacement block " + std::to_string(b) + " has a different shape");
    }
  }
  params_ = std::move(params);
}

double LocalTrainer::train_loss() const {
  if (train_rows_.empty()) return 0.0;
  return cross_entropy_loss(forward(train_features_, params_), train_labels_, train_positions_);
}

std::size_t LocalTrainer::correct(std::span<const std::size_t> rows) const {
  if (rows.empty()) return 0;
  const Matrix logits = forward(gather_rows(features_, rows), params_);
  std::vector<Label> picked;
  for (std::size_t r : rows) picked.push_back(labels_[r]);
  std::vector<std::size_t> all(rows.size());
  std::iota(all.begin(), all.end(), 0);
  return count_correct(logits, picked, all);
}

}  // namespace fedhgn
