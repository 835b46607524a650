#pragma once

#include <cmath>
#include <iosfwd>
#include <span>
#include <vector>

#include "ome/core/matrix.hpp"
#include "ome/core/rng.hpp"

namespace ome::learner {

// Hidden-unit nonlinearities. The rectifier is leaky (slope kLeakySlope on
// the negative side) so low-dimensional inputs cannot strand every hidden
// unit in the flat region and collapse the model to a constant.
enum class Activation { ReLU, Tanh };

inline constexpr double kLeakySlope = 0.01;

inline double apply_activation(Activation act, double z) {
  if (act == Activation::ReLU) return z > 0.0 ? z : kLeakySlope * z;
  return std::tanh(z);
}

// Derivative expressed through the stored activation value (the rectifier
// preserves sign, tanh' = 1 - a^2).
inline double activation_derivative(Activation act, double a) {
  if (act == Activation::ReLU) return a > 0.0 ? 1.0 : kLeakySlope;
  return 1.0 - a * a;
}

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t w_off = 0;  // weights, row-major [out x in]
  std::size_t b_off = 0;  // biases, [out]
};

// Feed-forward probabilistic classifier: nonlinear hidden layers, linear
// scalar output unit, logistic link at prediction time. Parameters live in
// one flat vector so the optimizer and checkpoint format stay trivial.
class Classifier {
 public:
  Classifier() = default;
  // Uniform(-1/sqrt(fan_in), +1/sqrt(fan_in)) init for weights and biases,
  // drawn deterministically from the seed.
  Classifier(std::size_t input_dim, std::span<const std::size_t> hidden,
             Activation act, RngSeed init_seed);

  std::size_t input_dim() const { return input_dim_; }
  Activation activation() const { return act_; }
  std::span<const LayerShape> layers() const { return layers_; }
  const std::vector<std::size_t>& hidden() const { return hidden_; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  // Pre-sigmoid output for a single row.
  double logit(std::span<const double> x) const;
  // Probability in (0, 1). Throws DataError on dimension mismatch.
  double predict(std::span<const double> x) const;
  void predict_rows(const Matrix& x, std::span<const std::int32_t> rows,
                    std::vector<double>& out) const;

  void save(std::ostream& out) const;
  static Classifier load(std::istream& in);

 private:
  std::size_t input_dim_ = 0;
  std::vector<std::size_t> hidden_;
  Activation act_ = Activation::ReLU;
  std::vector<LayerShape> layers_;
  std::vector<double> params_;
};

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

}  // namespace ome::learner
