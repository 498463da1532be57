#include "curbside/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "curbside/rng.hpp"

namespace curbside::ml {

namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& x) {
  return 1.0 / (1.0 + (-x).exp());
}

int label_index(Side s) { return s == Side::Left ? 0 : 1; }

}  // namespace

LstmModel LstmModel::init(int input_dim, int hidden_dim, int n_layers,
                          double dropout_p, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1 || n_layers < 1) {
    throw std::invalid_argument("LstmModel::init: dimensions must be >= 1");
  }
  if (dropout_p < 0.0 || dropout_p >= 1.0) {
    throw std::invalid_argument("LstmModel::init: dropout_p must be in [0, 1)");
  }
  LstmModel m;
  m.input_dim = input_dim;
  m.hidden_dim = hidden_dim;
  m.n_layers = n_layers;
  m.dropout_p = dropout_p;

  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
  for (int l = 0; l < n_layers; ++l) {
    auto rng = make_rng(seed, "lstm/init/layer", static_cast<std::uint64_t>(l));
    std::uniform_real_distribution<double> u(-bound, bound);
    const int f_in = l == 0 ? input_dim : hidden_dim;
    LstmLayer layer;
    layer.w_x = Eigen::MatrixXd::NullaryExpr(4 * hidden_dim, f_in,
                                             [&]() { return u(rng); });
    layer.w_h = Eigen::MatrixXd::NullaryExpr(4 * hidden_dim, hidden_dim,
                                             [&]() { return u(rng); });
    layer.b_x = Eigen::VectorXd::Zero(4 * hidden_dim);
    layer.b_h = Eigen::VectorXd::Zero(4 * hidden_dim);
    // Forget gate opens at init so gradients flow through early epochs.
    layer.b_x.segment(hidden_dim, hidden_dim).setOnes();
    m.layers.push_back(std::move(layer));
  }
  auto rng = make_rng(seed, "lstm/init/head");
  const double head_bound = std::sqrt(6.0 / static_cast<double>(hidden_dim + 2));
  std::uniform_real_distribution<double> u(-head_bound, head_bound);
  m.head_w = Eigen::MatrixXd::NullaryExpr(2, hidden_dim, [&]() { return u(rng); });
  m.head_b.setZero();
  return m;
}

bool LstmModel::all_finite() const {
  for (const LstmLayer& l : layers) {
    if (!l.w_x.allFinite() || !l.w_h.allFinite() || !l.b_x.allFinite() ||
        !l.b_h.allFinite()) {
      return false;
    }
  }
  return head_w.allFinite() && head_b.allFinite();
}

LstmForwardResult lstm_forward(const LstmModel& model,
                               const FeatureSequence& seq, bool training,
                               std::uint64_t dropout_seed) {
  if (seq.steps.cols() != model.input_dim) {
    throw std::invalid_argument("lstm_forward: feature dimension mismatch");
  }
  LstmForwardResult res;
  res.valid_len = seq.valid_len;
  if (seq.valid_len == 0) {
    res.degenerate = true;
    res.probs = {0.5, 0.5};
    res.logits = {0.0, 0.0};
    return res;
  }
  const int T = seq.valid_len;
  const int h = model.hidden_dim;
  const bool use_dropout = training && model.dropout_p > 0.0;
  std::mt19937_64 drop_rng(dropout_seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double keep = 1.0 - model.dropout_p;

  res.layers.resize(model.n_layers);
  Eigen::MatrixXd cur = seq.steps.topRows(T);
  for (int l = 0; l < model.n_layers; ++l) {
    const LstmLayer& L = model.layers[l];
    LstmLayerCache& C = res.layers[l];
    if (l > 0 && use_dropout) {
      C.drop = Eigen::MatrixXd::NullaryExpr(
          cur.rows(), cur.cols(),
          [&]() { return unit(drop_rng) < keep ? 1.0 / keep : 0.0; });
      cur = cur.cwiseProduct(C.drop);
    }
    C.x_in = std::move(cur);
    C.i.resize(T, h);
    C.f.resize(T, h);
    C.g.resize(T, h);
    C.o.resize(T, h);
    C.c.resize(T, h);
    C.tanh_c.resize(T, h);
    C.h.resize(T, h);

    Eigen::VectorXd h_prev = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd c_prev = Eigen::VectorXd::Zero(h);
    Eigen::VectorXd z(4 * h);
    for (int t = 0; t < T; ++t) {
      z.noalias() = L.w_x * C.x_in.row(t).transpose();
      z.noalias() += L.w_h * h_prev;
      z += L.b_x + L.b_h;
      const Eigen::ArrayXd i = sigmoid(z.head(h).array());
      const Eigen::ArrayXd f = sigmoid(z.segment(h, h).array());
      const Eigen::ArrayXd g = z.segment(2 * h, h).array().tanh();
      const Eigen::ArrayXd o = sigmoid(z.tail(h).array());
      const Eigen::ArrayXd c = f * c_prev.array() + i * g;
      const Eigen::ArrayXd tc = c.tanh();
      const Eigen::ArrayXd hv = o * tc;
      C.i.row(t) = i.transpose();
      C.f.row(t) = f.transpose();
      C.g.row(t) = g.transpose();
      C.o.row(t) = o.transpose();
      C.c.row(t) = c.transpose();
      C.tanh_c.row(t) = tc.transpose();
      C.h.row(t) = hv.transpose();
      h_prev = hv.matrix();
      c_prev = c.matrix();
    }
    cur = C.h;
  }

  const Eigen::VectorXd h_last =
      res.layers.back().h.row(T - 1).transpose();
  res.logits = model.head_w * h_last + model.head_b;
  const double m = res.logits.maxCoeff();
  const Eigen::Vector2d e = (res.logits.array() - m).exp();
  res.probs = e / e.sum();
  return res;
}

LstmGradients LstmGradients::zeros_like(const LstmModel& model) {
  LstmGradients g;
  for (const LstmLayer& l : model.layers) {
    LstmLayer zl;
    zl.w_x = Eigen::MatrixXd::Zero(l.w_x.rows(), l.w_x.cols());
    zl.w_h = Eigen::MatrixXd::Zero(l.w_h.rows(), l.w_h.cols());
    zl.b_x = Eigen::VectorXd::Zero(l.b_x.size());
    zl.b_h = Eigen::VectorXd::Zero(l.b_h.size());
    g.layers.push_back(std::move(zl));
  }
  g.head_w = Eigen::MatrixXd::Zero(model.head_w.rows(), model.head_w.cols());
  g.head_b.setZero();
  return g;
}

void LstmGradients::accumulate(const LstmGradients& other) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    layers[l].w_x += other.layers[l].w_x;
    layers[l].w_h += other.layers[l].w_h;
    layers[l].b_x += other.layers[l].b_x;
    layers[l].b_h += other.layers[l].b_h;
  }
  head_w += other.head_w;
  head_b += other.head_b;
}

void LstmGradients::scale(double s) {
  for (LstmLayer& l : layers) {
    l.w_x *= s;
    l.w_h *= s;
    l.b_x *= s;
    l.b_h *= s;
  }
  head_w *= s;
  head_b *= s;
}

double LstmGradients::squared_norm() const {
  double sum = 0.0;
  for (const LstmLayer& l : layers) {
    sum += l.w_x.squaredNorm() + l.w_h.squaredNorm() + l.b_x.squaredNorm() +
           l.b_h.squaredNorm();
  }
  return sum + head_w.squaredNorm() + head_b.squaredNorm();
}

bool LstmGradients::all_finite() const {
  for (const LstmLayer& l : layers) {
    if (!l.w_x.allFinite() || !l.w_h.allFinite() || !l.b_x.allFinite() ||
        !l.b_h.allFinite()) {
      return false;
    }
  }
  return head_w.allFinite() && head_b.allFinite();
}

double cross_entropy(const Eigen::Vector2d& probs, Side label) {
  const double p = std::max(probs(label_index(label)), 1e-300);
  return -std::log(p);
}

LstmGradients lstm_backward(const LstmModel& model,
                            const LstmForwardResult& forward, Side label) {
  LstmGradients grads = LstmGradients::zeros_like(model);
  if (forward.degenerate) return grads;

  const int T = forward.valid_len;
  const int h = model.hidden_dim;

  Eigen::Vector2d dlogits = forward.probs;
  dlogits(label_index(label)) -= 1.0;
  const Eigen::VectorXd h_last =
      forward.layers.back().h.row(T - 1).transpose();
  grads.head_w = dlogits * h_last.transpose();
  grads.head_b = dlogits;

  // Gradient flowing into each layer's hidden outputs from above.
  Eigen::MatrixXd dh_above = Eigen::MatrixXd::Zero(T, h);
  dh_above.row(T - 1) = (model.head_w.transpose() * dlogits).transpose();

  for (int l = model.n_layers - 1; l >= 0; --l) {
    const LstmLayer& L = model.layers[l];
    const LstmLayerCache& C = forward.layers[l];
    LstmLayer& G = grads.layers[l];
    const bool need_dx = l > 0;
    Eigen::MatrixXd dx_in;
    if (need_dx) dx_in.setZero(T, C.x_in.cols());

    Eigen::ArrayXd dh_next = Eigen::ArrayXd::Zero(h);
    Eigen::ArrayXd dc_next = Eigen::ArrayXd::Zero(h);
    Eigen::VectorXd dz(4 * h);
    for (int t = T - 1; t >= 0; --t) {
      const Eigen::ArrayXd i = C.i.row(t).transpose().array();
      const Eigen::ArrayXd f = C.f.row(t).transpose().array();
      const Eigen::ArrayXd g = C.g.row(t).transpose().array();
      const Eigen::ArrayXd o = C.o.row(t).transpose().array();
      const Eigen::ArrayXd tc = C.tanh_c.row(t).transpose().array();
      const Eigen::ArrayXd c_prev =
          t > 0 ? Eigen::ArrayXd(C.c.row(t - 1).transpose().array())
                : Eigen::ArrayXd(Eigen::ArrayXd::Zero(h));

      const Eigen::ArrayXd dh =
          dh_above.row(t).transpose().array() + dh_next;
      const Eigen::ArrayXd dc = dh * o * (1.0 - tc.square()) + dc_next;
      dz.head(h) = (dc * g * i * (1.0 - i)).matrix();             // i gate
      dz.segment(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();  // f gate
      dz.segment(2 * h, h) = (dc * i * (1.0 - g.square())).matrix();  // g
      dz.tail(h) = (dh * tc * o * (1.0 - o)).matrix();            // o gate

      G.w_x.noalias() += dz * C.x_in.row(t);
      if (t > 0) G.w_h.noalias() += dz * C.h.row(t - 1);
      G.b_x += dz;
      G.b_h += dz;
      if (need_dx) dx_in.row(t) = (L.w_x.transpose() * dz).transpose();
      dh_next = (L.w_h.transpose() * dz).array();
      dc_next = dc * f;
    }
    if (need_dx) {
      dh_above = C.drop.size() > 0 ? dx_in.cwiseProduct(C.drop) : dx_in;
    }
  }
  return grads;
}

void TrainConfig::validate() const {
  if (!(base_lr > 0.0)) throw std::invalid_argument("base_lr must be > 0");
  if (max_lr_mult < 1.0) {
    throw std::invalid_argument("max_lr_mult must be >= 1");
  }
  if (cycle_len < 1) throw std::invalid_argument("cycle_len must be >= 1");
  if (!(rms_decay > 0.0 && rms_decay < 1.0)) {
    throw std::invalid_argument("rms_decay must lie in (0, 1)");
  }
  if (!(rms_eps > 0.0)) throw std::invalid_argument("rms_eps must be > 0");
  if (max_epochs < 1) throw std::invalid_argument("max_epochs must be >= 1");
  if (patience < 0 || patience > max_epochs) {
    throw std::invalid_argument("patience must lie in [0, max_epochs]");
  }
  if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
}

double cyclic_learning_rate(const TrainConfig& cfg, int epoch) {
  const double half = static_cast<double>(cfg.cycle_len) / 2.0;
  const int pos = epoch % cfg.cycle_len;
  const double frac =
      half > 0.0 ? 1.0 - std::abs(static_cast<double>(pos) - half) / half : 0.0;
  return cfg.base_lr * (1.0 + (cfg.max_lr_mult - 1.0) * frac);
}

namespace {

struct RmsState {
  LstmGradients v;  // second-moment accumulators, same shapes as gradients

  explicit RmsState(const LstmModel& model)
      : v(LstmGradients::zeros_like(model)) {}
};

void rms_update(LstmModel& model, RmsState& state, const LstmGradients& g,
                double lr, const TrainConfig& cfg) {
  auto update = [&](auto& theta, auto& v, const auto& grad) {
    v.array() = cfg.rms_decay * v.array() +
                (1.0 - cfg.rms_decay) * grad.array().square();
    theta.array() -= lr * grad.array() / (v.array().sqrt() + cfg.rms_eps);
  };
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    update(model.layers[l].w_x, state.v.layers[l].w_x, g.layers[l].w_x);
    update(model.layers[l].w_h, state.v.layers[l].w_h, g.layers[l].w_h);
    update(model.layers[l].b_x, state.v.layers[l].b_x, g.layers[l].b_x);
    update(model.layers[l].b_h, state.v.layers[l].b_h, g.layers[l].b_h);
  }
  update(model.head_w, state.v.head_w, g.head_w);
  update(model.head_b, state.v.head_b, g.head_b);
}

double mean_loss(const LstmModel& model,
                 const std::vector<FeatureSequence>& xs,
                 const std::vector<Side>& ys) {
  double sum = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sum += cross_entropy(lstm_forward(model, xs[i], false).probs, ys[i]);
  }
  return sum / static_cast<double>(xs.size());
}

}  // namespace

TrainResult train_lstm(LstmModel& model,
                       const std::vector<FeatureSequence>& train_x,
                       const std::vector<Side>& train_y,
                       const std::vector<FeatureSequence>& val_x,
                       const std::vector<Side>& val_y,
                       const TrainConfig& cfg) {
  cfg.validate();
  if (train_x.empty() || train_x.size() != train_y.size()) {
    throw std::invalid_argument("train_lstm: bad training set");
  }
  if (val_x.size() != val_y.size()) {
    throw std::invalid_argument("train_lstm: bad validation set");
  }

  TrainResult result;
  result.monitored_validation = !val_x.empty();
  double best = std::numeric_limits<double>::infinity();
  LstmModel best_model = model;
  RmsState rms(model);

  std::vector<std::size_t> order(train_x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    const double lr = cyclic_learning_rate(cfg, epoch);
    auto shuffle_rng =
        make_rng(cfg.seed, "train/order", static_cast<std::uint64_t>(epoch));
    std::shuffle(order.begin(), order.end(), shuffle_rng);

    double epoch_loss_sum = 0.0;
    std::size_t epoch_loss_count = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end =
          std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      LstmGradients batch_grad = LstmGradients::zeros_like(model);
      std::size_t used = 0;
      for (std::size_t bi = start; bi < end; ++bi) {
        const std::size_t idx = order[bi];
        const std::uint64_t drop_seed = derive_seed(
            cfg.seed, "train/dropout",
            static_cast<std::uint64_t>(epoch) * 0x100000ULL + idx);
        const LstmForwardResult fwd =
            lstm_forward(model, train_x[idx], true, drop_seed);
        if (fwd.degenerate) continue;
        const double loss = cross_entropy(fwd.probs, train_y[idx]);
        if (!std::isfinite(loss)) {
          throw std::runtime_error(
              "train_lstm: loss diverged (non-finite) at epoch " +
              std::to_string(epoch));
        }
        epoch_loss_sum += loss;
        ++epoch_loss_count;
        batch_grad.accumulate(lstm_backward(model, fwd, train_y[idx]));
        ++used;
      }
      if (used == 0) continue;
      batch_grad.scale(1.0 / static_cast<double>(used));
      if (!batch_grad.all_finite()) {
        throw std::runtime_error(
            "train_lstm: gradients diverged (non-finite) at epoch " +
            std::to_string(epoch));
      }
      if (cfg.grad_clip > 0.0) {
        const double norm = std::sqrt(batch_grad.squared_norm());
        if (norm > cfg.grad_clip) batch_grad.scale(cfg.grad_clip / norm);
      }
      rms_update(model, rms, batch_grad, lr, cfg);
      if (!model.all_finite()) {
        throw std::runtime_error(
            "train_lstm: parameters diverged (non-finite) at epoch " +
            std::to_string(epoch));
      }
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.train_loss = epoch_loss_count > 0
                           ? epoch_loss_sum / static_cast<double>(epoch_loss_count)
                           : std::numeric_limits<double>::quiet_NaN();
    stats.val_loss = result.monitored_validation
                         ? mean_loss(model, val_x, val_y)
                         : std::numeric_limits<double>::quiet_NaN();
    result.history.push_back(stats);

    const double monitor =
        result.monitored_validation ? stats.val_loss : stats.train_loss;
    if (std::isfinite(monitor) && monitor < best) {
      best = monitor;
      best_model = model;
      result.best_epoch = epoch;
    } else if (result.best_epoch >= 0 &&
               epoch - result.best_epoch > cfg.patience) {
      result.early_stopped = true;
      break;
    }
  }

  result.best_monitor = best;
  if (result.best_epoch >= 0) model = std::move(best_model);
  return result;
}

Side lstm_predict(const LstmModel& model, const FeatureSequence& seq) {
  const LstmForwardResult fwd = lstm_forward(model, seq, false);
  return fwd.probs(1) > fwd.probs(0) ? Side::Right : Side::Left;
}

}  // namespace curbside::ml
