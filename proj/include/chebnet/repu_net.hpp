#pragma once

// Feed-forward RePU networks Phi = ((A_1,b_1),...,(A_L,b_L)) with
// x_k = sigma_s(A_k x_{k-1} + b_k) for k < L and an affine output layer.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chebnet/error.hpp"

namespace chebnet {

/// sigma_s(x) = x^s for x >= 0, else 0.
inline double repu(int s, double x) {
  if (s < 0) throw InvalidInput("repu: power must be >= 0");
  if (x < 0.0) return 0.0;
  double r = 1.0;
  for (int i = 0; i < s; ++i) r *= x;
  return r;
}

/// s * sigma_{s-1}(x); zero at x = 0 for s >= 2.
inline double repu_derivative(int s, double x) {
  if (s == 0) throw InvalidInput("repu_derivative: sigma_0 is not differentiable");
  if (s == 1) return x > 0.0 ? 1.0 : 0.0;
  return static_cast<double>(s) * repu(s - 1, x);
}

struct Layer {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
};

struct ComplexityReport {
  std::size_t hidden_layers = 0;
  std::size_t activation_count = 0;
  std::size_t nonzero_weights = 0;

  friend bool operator==(const ComplexityReport&, const ComplexityReport&) = default;
};

class RepuNetwork {
 public:
  RepuNetwork(int s, std::size_t input_dim, std::vector<Layer> layers)
      : s_(s), input_dim_(input_dim), layers_(std::move(layers)) {
    if (s_ < 2) throw InvalidInput("network activation power must be >= 2");
    if (input_dim_ == 0) throw InvalidInput("network input dimension must be >= 1");
    if (layers_.empty()) throw InvalidInput("network needs at least one layer");
    Eigen::Index cols = static_cast<Eigen::Index>(input_dim_);
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      const auto& L = layers_[k];
      if (L.A.cols() != cols)
        throw InvalidInput("layer " + std::to_string(k + 1) + " expects " + std::to_string(L.A.cols()) +
                           " inputs but receives " + std::to_string(cols));
      if (L.b.size() != L.A.rows()) throw InvalidInput("layer " + std::to_string(k + 1) + " bias length mismatch");
      if (L.A.rows() == 0) throw InvalidInput("layer " + std::to_string(k + 1) + " has no units");
      cols = L.A.rows();
    }
  }

  int s() const { return s_; }
  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return static_cast<std::size_t>(layers_.back().A.rows()); }
  std::size_t depth() const { return layers_.size(); }
  std::size_t hidden_layers() const { return layers_.size() - 1; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  Eigen::VectorXd forward(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != input_dim_)
      throw InvalidInput("forward: input has dimension " + std::to_string(x.size()) + ", network expects " +
                         std::to_string(input_dim_));
    Eigen::VectorXd a = x;
    for (std::size_t k = 0; k + 1 < layers_.size(); ++k) {
      Eigen::VectorXd z = layers_[k].A * a + layers_[k].b;
      a = z.unaryExpr([this](double v) { return repu(s_, v); });
    }
    return layers_.back().A * a + layers_.back().b;
  }

  /// Convenience for scalar-in, scalar-out networks.
  double operator()(double x) const {
    if (input_dim_ != 1 || output_dim() != 1) throw InvalidInput("scalar call needs a 1-in/1-out network");
    Eigen::VectorXd in(1);
    in(0) = x;
    return forward(in)(0);
  }

 private:
  int s_;
  std::size_t input_dim_;
  std::vector<Layer> layers_;
};

struct Gradients {
  std::vector<Layer> layers;  // dLoss/dA_k, dLoss/db_k
  Eigen::VectorXd input;      // dLoss/dx
};

/// Reverse-mode gradients of <upstream, forward(net, x)>.
inline Gradients backward(const RepuNetwork& net, const Eigen::VectorXd& x, const Eigen::VectorXd& upstream) {
  if (static_cast<std::size_t>(x.size()) != net.input_dim()) throw InvalidInput("backward: input dimension mismatch");
  if (static_cast<std::size_t>(upstream.size()) != net.output_dim())
    throw InvalidInput("backward: upstream gradient dimension mismatch");
  const auto& layers = net.layers();
  const std::size_t L = layers.size();
  std::vector<Eigen::VectorXd> acts(L);  // input to layer k
  std::vector<Eigen::VectorXd> pre(L);
  acts[0] = x;
  for (std::size_t k = 0; k + 1 < L; ++k) {
    pre[k] = layers[k].A * acts[k] + layers[k].b;
    acts[k + 1] = pre[k].unaryExpr([&](double v) { return repu(net.s(), v); });
  }
  Gradients g;
  g.layers.resize(L);
  Eigen::VectorXd delta = upstream;  // dLoss/d(pre-activation of layer k)
  for (std::size_t k = L; k-- > 0;) {
    g.layers[k].A = delta * acts[k].transpose();
    g.layers[k].b = delta;
    Eigen::VectorXd up = layers[k].A.transpose() * delta;
    if (k > 0) {
      const Eigen::VectorXd dact = pre[k - 1].unaryExpr([&](double v) { return repu_derivative(net.s(), v); });
      delta = up.cwiseProduct(dact);
    } else {
      g.input = std::move(up);
    }
  }
  return g;
}

inline ComplexityReport complexity(const RepuNetwork& net) {
  ComplexityReport r;
  r.hidden_layers = net.hidden_layers();
  for (std::size_t k = 0; k < net.layers().size(); ++k) {
    const auto& L = net.layers()[k];
    if (k + 1 < net.layers().size()) r.activation_count += static_cast<std::size_t>(L.A.rows());
    r.nonzero_weights += static_cast<std::size_t>((L.A.array() != 0.0).count());
    r.nonzero_weights += static_cast<std::size_t>((L.b.array() != 0.0).count());
  }
  return r;
}

/// phi2 o phi1, fusing phi1's output affine map into phi2's first layer.
inline RepuNetwork concat(const RepuNetwork& phi1, const RepuNetwork& phi2) {
  if (phi1.s() != phi2.s()) throw InvalidInput("concat: activation powers differ");
  if (phi1.output_dim() != phi2.input_dim())
    throw InvalidInput("concat: output dimension " + std::to_string(phi1.output_dim()) +
                       " does not match input dimension " + std::to_string(phi2.input_dim()));
  std::vector<Layer> layers(phi1.layers().begin(), phi1.layers().end() - 1);
  const Layer& last = phi1.layers().back();
  const Layer& first = phi2.layers().front();
  layers.push_back({first.A * last.A, first.A * last.b + first.b});
  layers.insert(layers.end(), phi2.layers().begin() + 1, phi2.layers().end());
  return RepuNetwork(phi1.s(), phi1.input_dim(), std::move(layers));
}

/// Shared input, block-diagonal hidden layers, outputs stacked in order.
inline RepuNetwork parallelize(const std::vector<RepuNetwork>& nets) {
  if (nets.empty()) throw InvalidInput("parallelize: need at least one network");
  const auto& ref = nets.front();
  for (const auto& n : nets) {
    if (n.s() != ref.s()) throw InvalidInput("parallelize: activation powers differ");
    if (n.input_dim() != ref.input_dim()) throw InvalidInput("parallelize: input dimensions differ");
    if (n.depth() != ref.depth())
      throw InvalidInput("parallelize: depths differ (" + std::to_string(n.hidden_layers()) + " vs " +
                         std::to_string(ref.hidden_layers()) + " hidden layers); pad with identity_carry first");
  }
  std::vector<Layer> layers;
  for (std::size_t k = 0; k < ref.depth(); ++k) {
    Eigen::Index rows = 0, cols = 0;
    for (const auto& n : nets) {
      rows += n.layers()[k].A.rows();
      cols += n.layers()[k].A.cols();
    }
    if (k == 0) cols = static_cast<Eigen::Index>(ref.input_dim());
    Layer L{Eigen::MatrixXd::Zero(rows, cols), Eigen::VectorXd::Zero(rows)};
    Eigen::Index r = 0, c = 0;
    for (const auto& n : nets) {
      const auto& src = n.layers()[k];
      if (k == 0)
        L.A.middleRows(r, src.A.rows()) = src.A;
      else
        L.A.block(r, c, src.A.rows(), src.A.cols()) = src.A;
      L.b.segment(r, src.b.size()) = src.b;
      r += src.A.rows();
      c += src.A.cols();
    }
    layers.push_back(std::move(L));
  }
  return RepuNetwork(ref.s(), ref.input_dim(), std::move(layers));
}

/// Embeds a network on `axes.size()` inputs into one reading coordinates `axes` of a `dim`-vector.
inline RepuNetwork select_inputs(const RepuNetwork& net, std::size_t dim, const std::vector<std::size_t>& axes) {
  if (axes.size() != net.input_dim()) throw InvalidInput("select_inputs: axis count must equal network input dimension");
  std::vector<Layer> layers = net.layers();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(layers[0].A.rows(), static_cast<Eigen::Index>(dim));
  for (std::size_t j = 0; j < axes.size(); ++j) {
    if (axes[j] >= dim) throw InvalidInput("select_inputs: axis out of range");
    A.col(static_cast<Eigen::Index>(axes[j])) += layers[0].A.col(static_cast<Eigen::Index>(j));
  }
  layers[0].A = std::move(A);
  return RepuNetwork(net.s(), dim, std::move(layers));
}

// ---------------------------------------------------------------------------
// Gadget constants and ridge identities

/// beta_1 = 1/4 [1,1,-1,-1], beta_2 = [1,1], omega_1 = [1,-1,1,-1], omega_2 = [1,-1], gamma_1 = [1,-1,-1,1]
///   x  = beta_1^T sigma_2(omega_1 x + gamma_1)
///   x^2 = beta_2^T sigma_2(omega_2 x)
///   xy = beta_1^T sigma_2(omega_1 x + gamma_1 y)
struct ReQUConstants {
  static Eigen::Vector4d beta1() { return Eigen::Vector4d(0.25, 0.25, -0.25, -0.25); }
  static Eigen::Vector2d beta2() { return Eigen::Vector2d(1.0, 1.0); }
  static Eigen::Vector4d omega1() { return Eigen::Vector4d(1.0, -1.0, 1.0, -1.0); }
  static Eigen::Vector2d omega2() { return Eigen::Vector2d(1.0, -1.0); }
  static Eigen::Vector4d gamma1() { return Eigen::Vector4d(1.0, -1.0, -1.0, 1.0); }
};

/// A polynomial q(w) of degree <= s written as
///   q(w) = constant + sum_i weights_i (w + shifts_i)^s,
/// with (w + c)^s = sigma_s(w + c) + (-1)^s sigma_s(-w - c).
struct RidgeExpansion {
  std::vector<double> shifts;
  std::vector<double> weights;
  double constant = 0.0;
};

/// s equispaced shifts in [-1,1]; solves the s x s system matching the
/// coefficients of w^1..w^s, the w^0 remainder goes to `constant`.
inline RidgeExpansion ridge_expansion(int s, const std::vector<double>& q) {
  if (s < 2) throw InvalidInput("ridge_expansion: power must be >= 2");
  if (q.size() > static_cast<std::size_t>(s) + 1) throw InvalidInput("ridge_expansion: degree exceeds activation power");
  RidgeExpansion r;
  r.shifts.resize(static_cast<std::size_t>(s));
  for (int i = 0; i < s; ++i) r.shifts[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (s - 1);
  Eigen::MatrixXd M(s, s);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(s);
  double binom = 1.0;  // C(s, j)
  for (int j = 1; j <= s; ++j) {
    binom = binom * (s - j + 1) / j;
    for (int i = 0; i < s; ++i) M(j - 1, i) = binom * std::pow(r.shifts[static_cast<std::size_t>(i)], s - j);
    if (static_cast<std::size_t>(j) < q.size()) rhs(j - 1) = q[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd w = M.fullPivLu().solve(rhs);
  r.weights.assign(w.data(), w.data() + w.size());
  r.constant = q.empty() ? 0.0 : q[0];
  for (int i = 0; i < s; ++i) r.constant -= w(i) * std::pow(r.shifts[static_cast<std::size_t>(i)], s);
  return r;
}

/// x -> x over `depth` hidden layers on each of `dim` coordinates. s = 2 uses
/// the (beta_1, omega_1, gamma_1) gadget; s > 2 the one-layer ridge identity.
inline RepuNetwork identity_carry(std::size_t depth, int s, std::size_t dim = 1) {
  if (depth == 0) throw InvalidInput("identity_carry: depth must be >= 1");
  if (s < 2) throw InvalidInput("identity_carry: power must be >= 2");
  Eigen::VectorXd in_w, in_b, out_w;  // one coordinate: pre = in_w x + in_b, x = out_w^T act + out_b
  double out_b = 0.0;
  if (s == 2) {
    in_w = ReQUConstants::omega1();
    in_b = ReQUConstants::gamma1();
    out_w = ReQUConstants::beta1();
  } else {
    const RidgeExpansion r = ridge_expansion(s, {0.0, 1.0});
    const auto n = static_cast<Eigen::Index>(2 * r.shifts.size());
    in_w.resize(n);
    in_b.resize(n);
    out_w.resize(n);
    const double sign = (s % 2 == 0) ? 1.0 : -1.0;
    for (std::size_t i = 0; i < r.shifts.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(2 * i);
      in_w(k) = 1.0;
      in_b(k) = r.shifts[i];
      out_w(k) = r.weights[i];
      in_w(k + 1) = -1.0;
      in_b(k + 1) = -r.shifts[i];
      out_w(k + 1) = sign * r.weights[i];
    }
    out_b = r.constant;
  }
  const auto d = static_cast<Eigen::Index>(dim);
  auto block = [&](const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(m.rows() * d, m.cols() * d);
    for (Eigen::Index i = 0; i < d; ++i) out.block(i * m.rows(), i * m.cols(), m.rows(), m.cols()) = m;
    return out;
  };
  auto tile = [&](const Eigen::VectorXd& v) { return Eigen::VectorXd(v.replicate(d, 1)); };
  std::vector<Layer> layers;
  layers.push_back({block(in_w), tile(in_b)});
  const Eigen::MatrixXd hop = in_w * out_w.transpose();
  const Eigen::VectorXd hop_b = in_w * out_b + in_b;
  for (std::size_t k = 1; k < depth; ++k) layers.push_back({block(hop), tile(hop_b)});
  layers.push_back({block(out_w.transpose()), Eigen::VectorXd::Constant(d, out_b)});
  return RepuNetwork(s, dim, std::move(layers));
}

/// Removes hidden units that cannot influence the output: units with an all-zero
/// outgoing column, and units whose pre-activation is identically zero.
inline RepuNetwork normalize(const RepuNetwork& net) {
  std::vector<Layer> layers = net.layers();
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k + 1 < layers.size(); ++k) {
      Layer& cur = layers[k];
      Layer& nxt = layers[k + 1];
      std::vector<Eigen::Index> keep;
      for (Eigen::Index u = 0; u < cur.A.rows(); ++u) {
        const bool silent = cur.A.row(u).isZero(0.0) && cur.b(u) == 0.0;
        const bool unused = nxt.A.col(u).isZero(0.0);
        if (!silent && !unused) keep.push_back(u);
      }
      if (keep.size() == static_cast<std::size_t>(cur.A.rows())) continue;
      if (keep.empty()) keep.push_back(0);  // a layer needs one unit; keep a placeholder
      if (keep.size() == static_cast<std::size_t>(cur.A.rows())) continue;
      const auto n = static_cast<Eigen::Index>(keep.size());
      Eigen::MatrixXd A(n, cur.A.cols()), An(nxt.A.rows(), n);
      Eigen::VectorXd b(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        A.row(i) = cur.A.row(keep[static_cast<std::size_t>(i)]);
        b(i) = cur.b(keep[static_cast<std::size_t>(i)]);
        An.col(i) = nxt.A.col(keep[static_cast<std::size_t>(i)]);
      }
      cur.A = std::move(A);
      cur.b = std::move(b);
      nxt.A = std::move(An);
      changed = true;
    }
  }
  return RepuNetwork(net.s(), net.input_dim(), std::move(layers));
}

}  // namespace chebnet
