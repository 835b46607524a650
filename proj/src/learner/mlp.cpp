#include "ome/learner/mlp.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>

#include "ome/core/errors.hpp"

namespace ome::learner {

Classifier::Classifier(std::size_t input_dim, std::span<const std::size_t> hidden,
                       Activation act, RngSeed init_seed)
    : input_dim_(input_dim), hidden_(hidden.begin(), hidden.end()), act_(act) {
  if (input_dim < 1) throw ConfigError("classifier input dimension must be >= 1");
  std::size_t off = 0;
  std::size_t in = input_dim;
  auto add_layer = [&](std::size_t out) {
    LayerShape shape{in, out, off, off + in * out};
    off += in * out + out;
    layers_.push_back(shape);
    in = out;
  };
  for (auto h : hidden_) {
    if (h < 1) throw ConfigError("hidden layer width must be >= 1");
    add_layer(h);
  }
  add_layer(1);

  params_.resize(off);
  Rng rng(init_seed);
  for (const auto& layer : layers_) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(layer.in));
    for (std::size_t i = 0; i < layer.in * layer.out; ++i) {
      params_[layer.w_off + i] = rng.uniform(-bound, bound);
    }
    for (std::size_t i = 0; i < layer.out; ++i) {
      params_[layer.b_off + i] = rng.uniform(-bound, bound);
    }
  }
}

double Classifier::logit(std::span<const double> x) const {
  if (x.size() != input_dim_) {
    throw DataError("classifier expects " + std::to_string(input_dim_) +
                    " inputs, got " + std::to_string(x.size()));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    next.assign(layer.out, 0.0);
    const double* w = params_.data() + layer.w_off;
    const double* b = params_.data() + layer.b_off;
    for (std::size_t o = 0; o < layer.out; ++o) {
      double z = b[o];
      const double* wo = w + o * layer.in;
      for (std::size_t k = 0; k < layer.in; ++k) z += wo[k] * cur[k];
      next[o] = l + 1 < layers_.size() ? apply_activation(act_, z) : z;
    }
    cur.swap(next);
  }
  return cur[0];
}

double Classifier::predict(std::span<const double> x) const {
  return sigmoid(logit(x));
}

void Classifier::predict_rows(const Matrix& x, std::span<const std::int32_t> rows,
                              std::vector<double>& out) const {
  out.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out[i] = predict(x.row(rows[i]));
  }
}

void Classifier::save(std::ostream& out) const {
  out << "ome-classifier v1\n";
  out << "input " << input_dim_ << "\n";
  out << "hidden";
  for (auto h : hidden_) out << ' ' << h;
  out << "\n";
  out << "activation " << (act_ == Activation::ReLU ? "relu" : "tanh") << "\n";
  out << "params " << params_.size() << "\n";
  char buf[64];
  for (double p : params_) {
    std::snprintf(buf, sizeof(buf), "%.17g", p);
    out << buf << "\n";
  }
}

Classifier Classifier::load(std::istream& in) {
  std::string magic, version;
  in >> magic >> version;
  if (magic != "ome-classifier" || version != "v1") {
    throw DataError("not a classifier checkpoint");
  }
  std::string key;
  std::size_t input = 0;
  in >> key >> input;
  if (key != "input") throw DataError("classifier checkpoint: expected 'input'");
  in >> key;
  if (key != "hidden") throw DataError("classifier checkpoint: expected 'hidden'");
  std::vector<std::size_t> hidden;
  while (in.peek() != '\n' && in >> std::ws) {
    std::size_t h;
    if (!(in >> h)) break;
    hidden.push_back(h);
    while (in.peek() == ' ') in.get();
    if (in.peek() == '\n') break;
  }
  std::string act_name;
  in >> key >> act_name;
  if (key != "activation") throw DataError("classifier checkpoint: expected 'activation'");
  std::size_t count = 0;
  in >> key >> count;
  if (key != "params") throw DataError("classifier checkpoint: expected 'params'");

  Classifier m(input, hidden,
               act_name == "tanh" ? Activation::Tanh : Activation::ReLU, 0);
  if (m.params_.size() != count) {
    throw DataError("classifier checkpoint: parameter count mismatch");
  }
  for (auto& p : m.params_) {
    if (!(in >> p)) throw DataError("classifier checkpoint: truncated parameters");
  }
  return m;
}

}  // namespace ome::learner
