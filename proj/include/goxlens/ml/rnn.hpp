#pragma once

#include <cstdint>
#include <vector>

#include "goxlens/ml/lagged.hpp"
#include "goxlens/types.hpp"

namespace goxlens::ml {

enum class Cell { gru, lstm };

/// One recurrent layer followed by a linear head on the last hidden state.
/// Parameters live in one flat vector: input weights W (G*H x D), recurrent
/// weights U (G*H x H), bias b (G*H), head weights v (H), head bias c, with
/// G = 3 gates (z, r, n) for GRU and 4 (i, f, g, o) for LSTM.
class Rnn {
 public:
  Rnn(Cell cell, int inputs, int hidden);

  Cell cell() const { return cell_; }
  int inputs() const { return inputs_; }
  int hidden() const { return hidden_; }
  Eigen::Index parameter_count() const { return theta_.size(); }
  VecXd& parameters() { return theta_; }
  const VecXd& parameters() const { return theta_; }
  double& output_bias() { return theta_(theta_.size() - 1); }

  /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, zero head bias.
  void initialize(std::uint64_t seed);

  /// `sequence` is steps x inputs, oldest row first.
  double predict(const MatXd& sequence) const;

  /// Mean squared error over the batch; `grad` receives d loss / d theta.
  double loss_and_gradient(const std::vector<MatXd>& sequences, const VecXd& targets, VecXd& grad) const;

  /// d prediction / d sequence, same shape as the sequence.
  MatXd input_gradient(const MatXd& sequence) const;

 private:
  int gates() const { return cell_ == Cell::gru ? 3 : 4; }
  /// Forward + backward for one sequence; accumulates scale * d pred / d theta
  /// into grad (if non-null) and writes d pred / d x into dx (if non-null).
  double run(const MatXd& sequence, double scale, VecXd* grad, MatXd* dx) const;

  Cell cell_;
  int inputs_;
  int hidden_;
  VecXd theta_;
};

struct RnnParams {
  Cell cell = Cell::gru;
  int hidden = 16;
  int epochs = 20;
  int batch = 32;
  double learning_rate = 1e-2;
  int seq_len = 4;
  double clip_norm = 5.0;
};

struct RnnModel {
  Rnn net{Cell::gru, 1, 1};
  int seq_len = 4;
  VecXd x_mean, x_scale;
  double y_mean = 0, y_scale = 1;
  std::vector<double> loss_trace;  ///< initial train loss, then one per epoch
  VecXd importance;                ///< mean |d prediction / d standardized input| over test windows
  double test_loss = 0;            ///< MSE on test windows, original units
  double mean_predictor_loss = 0;  ///< MSE of the training mean on the same windows

  /// Predictions for dataset rows [seq_len - 1, rows), one per window ending there.
  VecXd predict(const MatXd& X) const;
};

/// Minimum number of training rows accepted by train_rnn.
inline constexpr Eigen::Index kMinRnnRows = 200;

RnnModel train_rnn(const LaggedDataset& ds, const RnnParams& params, std::uint64_t seed);

}  // namespace goxlens::ml
