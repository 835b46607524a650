#include "ome/learner/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ome::learner {

namespace {

// Batched forward/backward workspace over the classifier's flat parameters.
struct Batch {
  std::vector<Matrix> acts;  // acts[0] = inputs, acts[l+1] = layer l outputs
  std::vector<Matrix> deltas;

  void resize(const Classifier& m, std::size_t rows) {
    acts.resize(m.layers().size() + 1);
    deltas.resize(m.layers().size());
    acts[0] = Matrix(rows, m.input_dim());
    for (std::size_t l = 0; l < m.layers().size(); ++l) {
      acts[l + 1] = Matrix(rows, m.layers()[l].out);
      deltas[l] = Matrix(rows, m.layers()[l].out);
    }
  }
};

void forward_batch(const Classifier& m, const Matrix& x,
                   std::span<const std::int32_t> rows, Batch& ws) {
  const std::size_t n = rows.size();
  ws.resize(m, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto src = x.row(rows[i]);
    std::copy(src.begin(), src.end(), ws.acts[0].row(i).begin());
  }
  const auto& params = m.params();
  const auto layers = m.layers();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    const double* w = params.data() + layer.w_off;
    const double* b = params.data() + layer.b_off;
    const bool is_output = l + 1 == layers.size();
    const Matrix& in = ws.acts[l];
    Matrix& out = ws.acts[l + 1];
    for (std::size_t i = 0; i < n; ++i) {
      const double* a = in.row(i).data();
      double* o = out.row(i).data();
      for (std::size_t u = 0; u < layer.out; ++u) {
        const double* wu = w + u * layer.in;
        double z = b[u];
        for (std::size_t k = 0; k < layer.in; ++k) z += wu[k] * a[k];
        o[u] = is_output ? z : apply_activation(m.activation(), z);
      }
    }
  }
}

// Per-sample d(loss)/d(logit). For cross-entropy with f = sigmoid(z):
// dl(f,1)/dz = f - 1 and dl(f,0)/dz = f; the surrogate row mixes the two.
double loss_dz(BaseLossKind kind, const LossCoeffs& c, double f) {
  switch (kind) {
    case BaseLossKind::BinaryCrossEntropy:
      return c.on_pos * (f - 1.0) + c.on_neg * f;
    case BaseLossKind::Squared: {
      const double s = f * (1.0 - f);
      return c.on_pos * 2.0 * (f - 1.0) * s + c.on_neg * 2.0 * f * s;
    }
  }
  return 0.0;
}

double loss_value(BaseLossKind kind, const LossCoeffs& c, double f) {
  return c.on_pos * base_loss(kind, f, 1) + c.on_neg * base_loss(kind, f, 0);
}

// Accumulates the mean objective over the batch and fills `grad` (sized to
// the parameter count) with its gradient.
double backward_batch(const Classifier& m, std::span<const std::uint8_t> targets,
                      std::span<const std::int32_t> rows,
                      std::span<const double> row_weights, const LossSpec& spec,
                      Batch& ws, std::vector<double>& grad) {
  const std::size_t n = rows.size();
  const auto layers = m.layers();
  const auto& params = m.params();
  const std::size_t last = layers.size() - 1;
  const double inv_n = 1.0 / static_cast<double>(n);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint8_t y = targets[rows[i]];
    const double w = row_weights.empty() ? 1.0 : row_weights[i];
    const LossCoeffs c = loss_coeffs(spec.surrogate, y);
    const double f = sigmoid(ws.acts[last + 1](i, 0));
    total += w * loss_value(spec.base, c, f);
    ws.deltas[last](i, 0) = w * inv_n * loss_dz(spec.base, c, f);
  }

  for (std::size_t l = layers.size(); l-- > 0;) {
    const auto& layer = layers[l];
    const double* w = params.data() + layer.w_off;
    double* gw = grad.data() + layer.w_off;
    double* gb = grad.data() + layer.b_off;
    const Matrix& a_in = ws.acts[l];
    const Matrix& delta = ws.deltas[l];

    for (std::size_t i = 0; i < n; ++i) {
      const double* a = a_in.row(i).data();
      const double* d = delta.row(i).data();
      for (std::size_t u = 0; u < layer.out; ++u) {
        const double du = d[u];
        if (du == 0.0) continue;
        double* gwu = gw + u * layer.in;
        for (std::size_t k = 0; k < layer.in; ++k) gwu[k] += du * a[k];
        gb[u] += du;
      }
    }

    if (l > 0) {
      Matrix& prev_delta = ws.deltas[l - 1];
      const Matrix& a_prev = ws.acts[l];  // activations of layer l-1's output
      for (std::size_t i = 0; i < n; ++i) {
        const double* d = delta.row(i).data();
        double* pd = prev_delta.row(i).data();
        const double* a = a_prev.row(i).data();
        std::fill(pd, pd + layer.in, 0.0);
        for (std::size_t u = 0; u < layer.out; ++u) {
          const double du = d[u];
          if (du == 0.0) continue;
          const double* wu = w + u * layer.in;
          for (std::size_t k = 0; k < layer.in; ++k) pd[k] += du * wu[k];
        }
        for (std::size_t k = 0; k < layer.in; ++k) {
          pd[k] *= activation_derivative(m.activation(), a[k]);
        }
      }
    }
  }
  return total * inv_n;
}

struct AdamState {
  std::vector<double> m, v;
  std::size_t step = 0;
};

void apply_update(std::vector<double>& params, std::vector<double>& grad,
                  const TrainConfig& cfg, AdamState& adam) {
  if (cfg.grad_clip > 0.0) {
    double sq = 0.0;
    for (double g : grad) sq += g * g;
    const double norm = std::sqrt(sq);
    if (norm > cfg.grad_clip) {
      const double scale = cfg.grad_clip / norm;
      for (double& g : grad) g *= scale;
    }
  }
  if (cfg.optimizer == Optimizer::Sgd) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      params[i] -= cfg.learning_rate * grad[i];
    }
    return;
  }
  constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  adam.step += 1;
  const double bc1 = 1.0 - std::pow(b1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(b2, static_cast<double>(adam.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    adam.m[i] = b1 * adam.m[i] + (1.0 - b1) * grad[i];
    adam.v[i] = b2 * adam.v[i] + (1.0 - b2) * grad[i] * grad[i];
    const double mh = adam.m[i] / bc1;
    const double vh = adam.v[i] / bc2;
    params[i] -= cfg.learning_rate * mh / (std::sqrt(vh) + eps);
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (epochs < 1) throw ConfigError("epoch count must be >= 1");
}

std::size_t TrainConfig::resolve_batch(std::size_t n_rows) const {
  if (batch_size > 0) return batch_size;
  const double raw = kStepsBase * std::sqrt(static_cast<double>(kStepsRef) /
                                            static_cast<double>(n_rows));
  const double steps = std::clamp<double>(raw, kStepsBase, kStepsMax);
  const auto b = static_cast<std::size_t>(
      static_cast<double>(n_rows) * static_cast<double>(epochs) / steps);
  return std::clamp<std::size_t>(b, 1, kMaxBatch);
}

TrainResult train(const Matrix& x, std::span<const std::uint8_t> targets,
                  const RowSet& rows, const LossSpec& spec,
                  const TrainConfig& cfg) {
  cfg.validate();
  spec.validate(rows.size());
  if (rows.empty()) throw TrainingError("no rows to train on");

  Classifier model(x.cols(), cfg.hidden, cfg.activation, cfg.seed);
  std::vector<double> grad(model.params().size(), 0.0);
  AdamState adam;
  adam.m.assign(grad.size(), 0.0);
  adam.v.assign(grad.size(), 0.0);

  Rng shuffle_rng(derive_seed(cfg.seed, 0x51u));  // shuffle stream, distinct from init
  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), 0);

  Batch ws;
  RowSet batch_rows;
  std::vector<double> batch_weights;
  std::vector<double> epoch_loss;

  const std::size_t batch_size = cfg.resolve_batch(rows.size());
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t stop = std::min(order.size(), start + batch_size);
      batch_rows.clear();
      batch_weights.clear();
      for (std::size_t p = start; p < stop; ++p) {
        batch_rows.push_back(rows[order[p]]);
        if (!spec.weights.empty()) batch_weights.push_back(spec.weights[order[p]]);
      }
      forward_batch(model, x, batch_rows, ws);
      std::fill(grad.begin(), grad.end(), 0.0);
      const double batch_loss =
          backward_batch(model, targets, batch_rows, batch_weights, spec, ws, grad);
      if (!std::isfinite(batch_loss)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(batch_index));
      }
      apply_update(model.params(), grad, cfg, adam);
      loss_sum += batch_loss * static_cast<double>(batch_rows.size());
      seen += batch_rows.size();
      ++batch_index;
    }
    epoch_loss.push_back(loss_sum / static_cast<double>(seen));
  }
  return {std::move(model), std::move(epoch_loss)};
}

Classifier fit_propensity(const Dataset& ds, const RowSet& rows,
                          const TrainConfig& cfg) {
  bool saw[2] = {false, false};
  for (auto r : rows) saw[ds.t[r]] = true;
  if (!saw[0] || !saw[1]) {
    throw DataError("propensity fit requires rows from both treatment arms");
  }
  LossSpec spec;  // plain cross-entropy, no weights
  return train(ds.x, ds.t, rows, spec, cfg).model;
}

double objective_value(const Classifier& m, const Matrix& x,
                       std::span<const std::uint8_t> targets, const RowSet& rows,
                       const LossSpec& spec) {
  spec.validate(rows.size());
  double total = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double f = m.predict(x.row(rows[i]));
    const LossCoeffs c = loss_coeffs(spec.surrogate, targets[rows[i]]);
    const double w = spec.weights.empty() ? 1.0 : spec.weights[i];
    total += w * loss_value(spec.base, c, f);
  }
  return total / static_cast<double>(rows.size());
}

std::vector<double> objective_gradient(const Classifier& m, const Matrix& x,
                                       std::span<const std::uint8_t> targets,
                                       const RowSet& rows, const LossSpec& spec) {
  spec.validate(rows.size());
  Batch ws;
  forward_batch(m, x, rows, ws);
  std::vector<double> grad(m.params().size(), 0.0);
  backward_batch(m, targets, rows, spec.weights, spec, ws, grad);
  return grad;
}

}  // namespace ome::learner
