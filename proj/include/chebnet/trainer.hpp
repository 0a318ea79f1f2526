#pragma once

// Full-batch RMSProp fine-tuning of RePU networks on sampled 1D data.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chebnet/error.hpp"
#include "chebnet/repu_net.hpp"

namespace chebnet {

struct TrainConfig {
  double gamma = 0.99;
  double eta = 1e-5;
  double epsilon = 1e-8;
  double initial_v = 0.0;  // 1.0 reproduces TensorFlow 1's RMSPropOptimizer
  std::size_t iterations = 2000;
  bool full_batch = true;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidInput("train: gamma must lie in (0, 1)");
    if (!(eta > 0.0)) throw InvalidInput("train: eta must be positive");
    if (!(epsilon > 0.0)) throw InvalidInput("train: epsilon must be positive");
    if (!(initial_v >= 0.0)) throw InvalidInput("train: initial_v must be non-negative");
    if (!full_batch) throw InvalidInput("train: only full-batch training is supported");
  }
};

struct Dataset {
  std::vector<Eigen::VectorXd> inputs;
  std::vector<double> targets;

  std::size_t size() const { return inputs.size(); }
};

/// `points` equispaced samples of f on [-1, 1], endpoints included.
inline Dataset uniform_dataset(const std::function<double(double)>& f, std::size_t points = 200) {
  if (points < 2) throw InvalidInput("uniform_dataset: need at least two points");
  Dataset d;
  for (std::size_t i = 0; i < points; ++i) {
    const double x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
    Eigen::VectorXd in(1);
    in(0) = x;
    d.inputs.push_back(std::move(in));
    d.targets.push_back(f(x));
  }
  return d;
}

inline void check_dataset(const RepuNetwork& net, const Dataset& data) {
  if (data.inputs.empty()) throw InvalidInput("dataset is empty");
  if (data.inputs.size() != data.targets.size()) throw InvalidInput("dataset inputs and targets differ in length");
  if (net.output_dim() != 1) throw InvalidInput("training needs a scalar-output network");
}

/// (1/M) sum_i (net(x_i) - y_i)^2
inline double loss_mse(const RepuNetwork& net, const Dataset& data) {
  check_dataset(net, data);
  double sum = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = net.forward(data.inputs[i])(0) - data.targets[i];
    sum += r * r;
  }
  return sum / static_cast<double>(data.size());
}

/// Loss and its gradient with respect to every A_k, b_k.
inline std::pair<double, std::vector<Layer>> loss_and_gradient(const RepuNetwork& net, const Dataset& data) {
  check_dataset(net, data);
  std::vector<Layer> grad;
  for (const auto& L : net.layers())
    grad.push_back({Eigen::MatrixXd::Zero(L.A.rows(), L.A.cols()), Eigen::VectorXd::Zero(L.b.size())});
  const double M = static_cast<double>(data.size());
  double sum = 0.0;
  Eigen::VectorXd up(1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double r = net.forward(data.inputs[i])(0) - data.targets[i];
    sum += r * r;
    up(0) = 2.0 * r / M;
    const Gradients g = backward(net, data.inputs[i], up);
    for (std::size_t k = 0; k < grad.size(); ++k) {
      grad[k].A += g.layers[k].A;
      grad[k].b += g.layers[k].b;
    }
  }
  return {sum / M, std::move(grad)};
}

struct RmsPropState {
  std::vector<Layer> v;  // running mean of squared gradients, filled with cfg.initial_v on first use
};

/// v <- gamma v + (1 - gamma) g^2;  theta <- theta - eta g / sqrt(v + epsilon)
inline void rmsprop_step(std::vector<Layer>& params, const std::vector<Layer>& grads, RmsPropState& state,
                         const TrainConfig& cfg) {
  if (grads.size() != params.size()) throw InvalidInput("rmsprop_step: gradient/parameter layer count mismatch");
  if (state.v.empty())
    for (const auto& p : params)
      state.v.push_back({Eigen::MatrixXd::Constant(p.A.rows(), p.A.cols(), cfg.initial_v),
                         Eigen::VectorXd::Constant(p.b.size(), cfg.initial_v)});
  auto update = [&](auto& theta, const auto& g, auto& v) {
    if (theta.size() != g.size()) throw InvalidInput("rmsprop_step: gradient shape mismatch");
    v = cfg.gamma * v.array() + (1.0 - cfg.gamma) * g.array().square();
    theta.array() -= cfg.eta * g.array() / (v.array() + cfg.epsilon).sqrt();
  };
  for (std::size_t k = 0; k < params.size(); ++k) {
    update(params[k].A, grads[k].A, state.v[k].A);
    update(params[k].b, grads[k].b, state.v[k].b);
  }
}

struct TrainTrace {
  std::vector<double> losses;  // loss before each update
  double initial_loss = 0.0;
  double final_loss = 0.0;     // loss of the returned network
  bool diverged = false;
  std::size_t diverged_at = 0;  // iteration that produced the non-finite value
  std::uint64_t fingerprint = 0;
};

struct TrainResult {
  RepuNetwork network;
  TrainTrace trace;
};

inline std::uint64_t parameter_fingerprint(const RepuNetwork& net) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](double v) {
    const auto* p = reinterpret_cast<const unsigned char*>(&v);
    for (std::size_t i = 0; i < sizeof(double); ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& L : net.layers()) {
    for (Eigen::Index i = 0; i < L.A.size(); ++i) mix(L.A.data()[i]);
    for (Eigen::Index i = 0; i < L.b.size(); ++i) mix(L.b(i));
  }
  return h;
}

inline bool all_finite(const std::vector<Layer>& layers) {
  for (const auto& L : layers)
    if (!L.A.allFinite() || !L.b.allFinite()) return false;
  return true;
}

/// Trains a copy of `net`. A non-finite loss or parameter stops training with
/// the divergence flag set; the last finite network is returned.
inline TrainResult train(const RepuNetwork& net, const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  check_dataset(net, data);
  RepuNetwork current = net;
  TrainTrace trace;
  RmsPropState state;
  trace.initial_loss = loss_mse(current, data);
  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    auto [loss, grad] = loss_and_gradient(current, data);
    if (!std::isfinite(loss) || !all_finite(grad)) {
      trace.diverged = true;
      trace.diverged_at = it;
      break;
    }
    trace.losses.push_back(loss);
    std::vector<Layer> params = current.layers();
    rmsprop_step(params, grad, state, cfg);
    RepuNetwork next(current.s(), current.input_dim(), std::move(params));
    if (!all_finite(next.layers()) || !std::isfinite(loss_mse(next, data))) {
      trace.diverged = true;
      trace.diverged_at = it;
      break;
    }
    current = std::move(next);
  }
  trace.final_loss = loss_mse(current, data);
  trace.fingerprint = parameter_fingerprint(current);
  return {std::move(current), std::move(trace)};
}

/// f1(x) = exp(-x^2); f2(x) = exp(-1/x^2) with f2(0) = 0.
inline std::function<double(double)> test_function(const std::string& name) {
  if (name == "f1") return [](double x) { return std::exp(-x * x); };
  if (name == "f2") return [](double x) { return x == 0.0 ? 0.0 : std::exp(-1.0 / (x * x)); };
  throw InvalidInput("unknown test function '" + name + "' (expected f1 or f2)");
}

}  // namespace chebnet
