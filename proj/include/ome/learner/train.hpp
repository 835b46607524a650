#pragma once

#include "ome/core/dataset.hpp"
#include "ome/learner/loss.hpp"
#include "ome/learner/mlp.hpp"

namespace ome::learner {

enum class Optimizer { Adam, Sgd };

struct TrainConfig {
  double learning_rate = 5e-4;
  std::size_t epochs = 10;
  // 0 = auto: pick the batch so every fit gets a comparable optimizer-step
  // budget regardless of row count (capped at kMaxBatch). Fold-level fits
  // inside cross-fitting then converge like full-data fits.
  std::size_t batch_size = 0;
  Optimizer optimizer = Optimizer::Adam;
  double grad_clip = 5.0;  // global-norm bound on parameter gradients; <= 0 disables
  std::vector<std::size_t> hidden = {40, 30, 10};
  Activation activation = Activation::ReLU;
  RngSeed seed = 0;

  void validate() const;
  TrainConfig with_seed(RngSeed s) const {
    TrainConfig c = *this;
    c.seed = s;
    return c;
  }

  // Auto-batch schedule: small fits get more optimizer steps, mirroring how
  // training length is tuned down as data grows. steps(rows) =
  // clamp(kStepsBase * sqrt(kStepsRef / rows), kStepsBase, kStepsMax).
  static constexpr std::size_t kStepsBase = 900;
  static constexpr std::size_t kStepsRef = 60000;
  static constexpr std::size_t kStepsMax = 4000;
  static constexpr std::size_t kMaxBatch = 1024;
  std::size_t resolve_batch(std::size_t n_rows) const;
};

struct TrainResult {
  Classifier model;
  std::vector<double> epoch_loss;  // mean objective per epoch
};

// Minimizes (1/n) sum_i w_i * loss(f(x_i), y_i) over the given rows by
// mini-batch gradient descent. Deterministic given (data, spec, cfg).
// Throws TrainingError with (epoch, batch) if the loss leaves the finite
// range.
TrainResult train(const Matrix& x, std::span<const std::uint8_t> targets,
                  const RowSet& rows, const LossSpec& spec,
                  const TrainConfig& cfg);

// Regress T ~ X with plain cross-entropy: the propensity model.
// Throws DataError when the rows cover a single arm.
Classifier fit_propensity(const Dataset& ds, const RowSet& rows,
                          const TrainConfig& cfg);

// Full-batch objective and its analytic gradient at the classifier's
// current parameters; the pair a finite-difference check differentiates.
double objective_value(const Classifier& m, const Matrix& x,
                       std::span<const std::uint8_t> targets, const RowSet& rows,
                       const LossSpec& spec);
std::vector<double> objective_gradient(const Classifier& m, const Matrix& x,
                                       std::span<const std::uint8_t> targets,
                                       const RowSet& rows, const LossSpec& spec);

}  // namespace ome::learner
