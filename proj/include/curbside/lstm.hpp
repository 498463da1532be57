#pragma once
// Stacked LSTM binary classifier with from-scratch forward, backward
// (backpropagation through time), and RMSProp training under a triangular
// cyclic learning rate. Double precision throughout; all matrix arithmetic
// via Eigen; deterministic for a fixed seed.
//
// Gate equations per layer and step (sigma = logistic):
//   i_t = sigma(W_ii x_t + b_ii + W_hi h_{t-1} + b_hi)
//   f_t = sigma(W_if x_t + b_if + W_hf h_{t-1} + b_hf)
//   g_t = tanh (W_ig x_t + b_ig + W_hg h_{t-1} + b_hg)
//   o_t = sigma(W_io x_t + b_io + W_ho h_{t-1} + b_ho)
//   c_t = f_t . c_{t-1} + i_t . g_t
//   h_t = o_t . tanh(c_t)
// The four gates are stored stacked in that order: rows [0,h) of w_x/w_h
// belong to i, [h,2h) to f, [2h,3h) to g, [3h,4h) to o.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "curbside/features.hpp"
#include "curbside/types.hpp"

namespace curbside::ml {

struct LstmLayer {
  Eigen::MatrixXd w_x;  // 4h x input_dim
  Eigen::MatrixXd w_h;  // 4h x h
  Eigen::VectorXd b_x;  // 4h
  Eigen::VectorXd b_h;  // 4h
};

struct LstmModel {
  int input_dim = 0;
  int hidden_dim = 0;
  int n_layers = 0;
  double dropout_p = 0.0;  // applied between layers, training only
  std::vector<LstmLayer> layers;
  Eigen::MatrixXd head_w;  // 2 x h
  Eigen::Vector2d head_b;

  // Uniform(-1/sqrt(h), 1/sqrt(h)) weights, forget-gate bias 1, the rest 0.
  static LstmModel init(int input_dim, int hidden_dim, int n_layers,
                        double dropout_p, std::uint64_t seed);
  bool all_finite() const;
};

struct LstmLayerCache {
  Eigen::MatrixXd x_in;  // T x F_l, input after dropout
  Eigen::MatrixXd drop;  // T x F_l dropout scales; empty when unused
  Eigen::MatrixXd i, f, g, o, c, tanh_c, h;  // T x hidden
};

struct LstmForwardResult {
  Eigen::Vector2d probs{0.5, 0.5};
  Eigen::Vector2d logits{0.0, 0.0};
  bool degenerate = false;  // valid_len == 0; probs forced uniform
  int valid_len = 0;
  std::vector<LstmLayerCache> layers;
};

// Runs the stack over the valid steps only; the head reads the hidden state
// at the last valid step, so padding can never influence the output.
// dropout_seed selects the dropout masks when training is true.
LstmForwardResult lstm_forward(const LstmModel& model,
                               const FeatureSequence& seq, bool training,
                               std::uint64_t dropout_seed = 0);

struct LstmGradients {
  std::vector<LstmLayer> layers;
  Eigen::MatrixXd head_w;
  Eigen::Vector2d head_b;

  static LstmGradients zeros_like(const LstmModel& model);
  void accumulate(const LstmGradients& other);
  void scale(double s);
  double squared_norm() const;
  bool all_finite() const;
};

double cross_entropy(const Eigen::Vector2d& probs, Side label);

// Full BPTT from the cross-entropy loss at the head. Degenerate forwards
// yield all-zero gradients.
LstmGradients lstm_backward(const LstmModel& model,
                            const LstmForwardResult& forward, Side label);

struct TrainConfig {
  double base_lr = 5e-4;
  double max_lr_mult = 10.0;  // peak = base_lr * max_lr_mult
  int cycle_len = 50;         // epochs per triangular cycle
  double rms_decay = 0.99;
  double rms_eps = 1e-8;
  int max_epochs = 650;
  int patience = 200;  // early stop on monitored loss
  int batch_size = 16;
  double grad_clip = 5.0;  // global gradient norm; <= 0 disables
  std::uint64_t seed = 1;

  void validate() const;
};

// Triangular schedule: base at epoch 0, peak mid-cycle, back to base.
double cyclic_learning_rate(const TrainConfig& cfg, int epoch);

struct EpochStats {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN when there is no validation set
};

struct TrainResult {
  std::vector<EpochStats> history;
  int best_epoch = -1;
  double best_monitor = 0.0;
  bool monitored_validation = false;
  bool early_stopped = false;
};

// RMSProp training with early stopping on validation loss (training loss
// when the validation set is empty); the model is left at the best
// checkpoint. Throws on divergence (non-finite loss or gradients).
TrainResult train_lstm(LstmModel& model,
                       const std::vector<FeatureSequence>& train_x,
                       const std::vector<Side>& train_y,
                       const std::vector<FeatureSequence>& val_x,
                       const std::vector<Side>& val_y, const TrainConfig& cfg);

// Prediction for one sequence; degenerate sequences tie and resolve Left.
Side lstm_predict(const LstmModel& model, const FeatureSequence& seq);

}  // namespace curbside::ml
