#pragma once

// Layer-by-layer network assembly. A Value is an affine combination of the
// units of one stage (stage 0 = network inputs, stage k = hidden layer k)
// together with a bound on its magnitude over the approximation domain.
// Gadgets read Values of the current stage and emit Values of the next one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "chebnet/error.hpp"
#include "chebnet/repu_net.hpp"

namespace chebnet {

struct Value {
  std::vector<std::pair<std::size_t, double>> terms;  // (unit index, coefficient), sorted by unit
  double constant = 0.0;
  double bound = 0.0;  // |value| <= bound on the domain
  std::size_t stage = 0;

  bool is_constant() const { return terms.empty(); }

  static Value constant_value(double c) {
    Value v;
    v.constant = c;
    v.bound = std::abs(c);
    return v;
  }
};

inline Value operator*(double c, const Value& v) {
  Value out = v;
  for (auto& t : out.terms) t.second *= c;
  out.constant *= c;
  out.bound *= std::abs(c);
  return out;
}

inline Value operator+(const Value& a, const Value& b) {
  if (!a.is_constant() && !b.is_constant() && a.stage != b.stage)
    throw InvalidInput("cannot add values from stages " + std::to_string(a.stage) + " and " + std::to_string(b.stage));
  Value out;
  out.stage = a.is_constant() ? b.stage : a.stage;
  out.constant = a.constant + b.constant;
  out.bound = a.bound + b.bound;
  // zero coefficients are kept on purpose: the unit pattern of a value must
  // not depend on the numeric coefficients that happen to vanish
  std::size_t i = 0, j = 0;
  while (i < a.terms.size() || j < b.terms.size()) {
    if (j == b.terms.size() || (i < a.terms.size() && a.terms[i].first < b.terms[j].first))
      out.terms.push_back(a.terms[i++]);
    else if (i == a.terms.size() || b.terms[j].first < a.terms[i].first)
      out.terms.push_back(b.terms[j++]);
    else {
      out.terms.emplace_back(a.terms[i].first, a.terms[i].second + b.terms[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

inline Value operator+(const Value& a, double c) { return a + Value::constant_value(c); }
inline Value operator-(const Value& a, double c) { return a + Value::constant_value(-c); }

class NetworkBuilder {
 public:
  NetworkBuilder(int s, std::size_t input_dim) : s_(s), input_dim_(input_dim), unit_bounds_(input_dim, 1.0) {
    if (s_ < 2) throw InvalidInput("NetworkBuilder: power must be >= 2");
    if (input_dim_ == 0) throw InvalidInput("NetworkBuilder: input dimension must be >= 1");
  }

  int s() const { return s_; }
  std::size_t stage() const { return layers_.size(); }

  Value input(std::size_t i, double bound = 1.0) {
    if (stage() != 0) throw InvalidInput("inputs are only addressable before the first layer");
    if (i >= input_dim_) throw InvalidInput("input index out of range");
    unit_bounds_[i] = bound;
    Value v;
    v.terms.emplace_back(i, 1.0);
    v.bound = bound;
    return v;
  }

  /// Adds sigma_s(pre) to the layer under construction; the result lives at stage()+1.
  Value add_unit(const Value& pre) {
    check_current(pre);
    const std::size_t index = pending_.size();
    pending_.push_back(pre);
    Value v;
    v.terms.emplace_back(index, 1.0);
    v.stage = stage() + 1;
    v.bound = std::pow(std::max(pre.bound, 0.0), s_);
    pending_bounds_.push_back(v.bound);
    return v;
  }

  std::size_t pending_units() const { return pending_.size(); }

  void next_layer() {
    if (pending_.empty()) throw InvalidInput("next_layer: the new layer has no units");
    const std::size_t cols = width(stage());
    Layer L{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(pending_.size()), static_cast<Eigen::Index>(cols)),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pending_.size()))};
    for (std::size_t u = 0; u < pending_.size(); ++u) {
      for (const auto& [col, c] : pending_[u].terms) L.A(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(col)) += c;
      L.b(static_cast<Eigen::Index>(u)) = pending_[u].constant;
    }
    layers_.push_back(std::move(L));
    pending_.clear();
    unit_bounds_ = std::move(pending_bounds_);
    pending_bounds_.clear();
    carry_memo_.clear();
    basis_memo_.clear();
  }

  RepuNetwork finish(const std::vector<Value>& outputs) {
    if (!pending_.empty()) throw InvalidInput("finish: a layer is still under construction");
    if (outputs.empty()) throw InvalidInput("finish: need at least one output");
    const std::size_t cols = width(stage());
    Layer L{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(outputs.size()), static_cast<Eigen::Index>(cols)),
            Eigen::VectorXd::Zero(static_cast<Eigen::Index>(outputs.size()))};
    for (std::size_t r = 0; r < outputs.size(); ++r) {
      check_current(outputs[r]);
      for (const auto& [col, c] : outputs[r].terms) L.A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) += c;
      L.b(static_cast<Eigen::Index>(r)) = outputs[r].constant;
    }
    std::vector<Layer> layers = layers_;
    layers.push_back(std::move(L));
    return RepuNetwork(s_, input_dim_, std::move(layers));
  }

  // -------------------------------------------------------------------------
  // Gadgets. Each reads values of the current stage and returns a value of
  // the next stage; constants pass through without consuming units.

  /// v at the next stage. Values sharing a unit pattern up to scaling share one
  /// gadget; its scale never exceeds the pattern's own triangle bound.
  Value carry(const Value& v) {
    if (v.is_constant()) return v;
    check_current(v);
    double scale = 0.0;  // signed coefficient of largest magnitude
    for (const auto& t : v.terms)
      if (std::abs(t.second) > std::abs(scale)) scale = t.second;
    Value pattern;
    pattern.stage = v.stage;
    for (const auto& t : v.terms) pattern.terms.emplace_back(t.first, scale == 0.0 ? 1.0 : t.second / scale);
    double triangle = 0.0;
    for (const auto& t : pattern.terms) triangle += std::abs(t.second) * unit_bounds_[t.first];
    pattern.bound = scale == 0.0 ? triangle : std::min(triangle, (v.bound + std::abs(v.constant)) / std::abs(scale));
    auto it = carry_memo_.find(pattern.terms);
    if (it == carry_memo_.end()) it = carry_memo_.emplace(pattern.terms, carry_raw(pattern)).first;
    Value out = scale * it->second + v.constant;
    out.bound = v.bound;
    return out;
  }

  /// v^2 via sigma_2(v) + sigma_2(-v).
  Value square(const Value& v, double bound = -1.0) {
    require_s2("square");
    if (v.is_constant()) return Value::constant_value(v.constant * v.constant);
    Value out = add_unit(v) + add_unit(-1.0 * v);
    out.bound = bound >= 0.0 ? bound : v.bound * v.bound;
    return out;
  }

  /// a * b via ((ma + nb)^2 - (ma - nb)^2) / (4mn), with m, n scaling each factor to unit size.
  Value product(const Value& a, const Value& b, double bound = -1.0) {
    require_s2("product");
    if (a.is_constant()) return a.constant * carry(b);
    if (b.is_constant()) return b.constant * carry(a);
    const double m = unit_scale(a.bound), n = unit_scale(b.bound);
    const Value plus = m * a + n * b;
    const Value minus = m * a + (-n) * b;
    const Value sum = add_unit(plus) + add_unit(-1.0 * plus) + (-1.0) * (add_unit(minus) + add_unit(-1.0 * minus));
    Value out = (1.0 / (4.0 * m * n)) * sum;
    out.bound = bound >= 0.0 ? bound : a.bound * b.bound;
    return out;
  }

  /// v^s via sigma_s(v) + (-1)^s sigma_s(-v).
  Value power_s(const Value& v, double bound = -1.0) {
    if (v.is_constant()) return Value::constant_value(std::pow(v.constant, s_));
    const double sign = (s_ % 2 == 0) ? 1.0 : -1.0;
    Value out = add_unit(v) + sign * add_unit(-1.0 * v);
    out.bound = bound >= 0.0 ? bound : std::pow(v.bound, s_);
    return out;
  }

  /// sum_j q_j v^j for deg q <= s, from the 2s shifted ridge units of v (shared per v).
  Value poly(const Value& v, const std::vector<double>& q, double bound = -1.0) {
    if (q.size() > static_cast<std::size_t>(s_) + 1) throw InvalidInput("poly: degree exceeds activation power");
    if (v.is_constant()) {
      double acc = 0.0;
      for (std::size_t j = q.size(); j-- > 0;) acc = acc * v.constant + q[j];
      return Value::constant_value(acc);
    }
    check_current(v);
    const double mu = unit_scale(v.bound);
    const auto key = std::make_tuple(v.terms, v.constant);
    auto it = basis_memo_.find(key);
    if (it == basis_memo_.end()) {
      std::vector<Value> units;
      const Value u = mu * v;
      for (double shift : ridge_shifts()) {
        units.push_back(add_unit(u + shift));
        units.push_back(add_unit(-1.0 * u - shift));
      }
      it = basis_memo_.emplace(key, std::move(units)).first;
    }
    // q(v) = qt(mu v) with qt_j = q_j / mu^j
    std::vector<double> qt(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) qt[j] = q[j] / std::pow(mu, static_cast<double>(j));
    const RidgeExpansion r = ridge_expansion(s_, qt);
    const double sign = (s_ % 2 == 0) ? 1.0 : -1.0;
    Value out = Value::constant_value(r.constant);
    for (std::size_t i = 0; i < r.weights.size(); ++i)
      out = out + r.weights[i] * (it->second[2 * i] + sign * it->second[2 * i + 1]);
    if (bound >= 0.0) {
      out.bound = bound;
    } else {
      double b = 0.0;
      for (std::size_t j = 0; j < q.size(); ++j) b += std::abs(q[j]) * std::pow(v.bound, static_cast<double>(j));
      out.bound = b;
    }
    return out;
  }

  /// sum_t z^t y_t for t < s. Each z^t y (t >= 1) is the lambda-linear part of
  /// (u + lambda w)^{t+1} with u, w the unit-scaled z, y, sampled at t+2 nodes.
  Value variable_sum(const Value& z, const std::vector<Value>& ys, double bound = -1.0) {
    if (ys.size() > static_cast<std::size_t>(s_)) throw InvalidInput("variable_sum: too many coefficients");
    Value out = Value::constant_value(0.0);
    double b = 0.0;
    for (std::size_t t = 0; t < ys.size(); ++t) {
      const Value& y = ys[t];
      b += y.bound * std::pow(z.bound, static_cast<double>(t));
      if (t == 0) {
        out = out + carry(y);
        continue;
      }
      if (y.is_constant()) {
        std::vector<double> e(t + 1, 0.0);
        e[t] = y.constant;
        out = out + poly(z, e);
        continue;
      }
      if (z.is_constant()) {
        out = out + std::pow(z.constant, static_cast<double>(t)) * carry(y);
        continue;
      }
      const double mz = unit_scale(z.bound), my = unit_scale(y.bound);
      const Value u = mz * z, w = my * y;
      const std::size_t nodes = t + 2;
      Eigen::MatrixXd V(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(nodes));
      std::vector<double> lambda(nodes);
      for (std::size_t i = 0; i < nodes; ++i) lambda[i] = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(nodes - 1);
      for (std::size_t m = 0; m < nodes; ++m)
        for (std::size_t i = 0; i < nodes; ++i)
          V(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = std::pow(lambda[i], static_cast<double>(m));
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nodes));
      rhs(1) = 1.0;
      const Eigen::VectorXd c = V.fullPivLu().solve(rhs);
      const double factor = 1.0 / (static_cast<double>(t + 1) * std::pow(mz, static_cast<double>(t)) * my);
      for (std::size_t i = 0; i < nodes; ++i) {
        Value g = u + lambda[i] * w;
        g.bound = 1.0 + std::abs(lambda[i]);
        Value p;
        if (t + 1 == static_cast<std::size_t>(s_)) {
          p = power_s(g);
        } else {
          std::vector<double> e(t + 2, 0.0);
          e[t + 1] = 1.0;
          p = poly(g, e);
        }
        out = out + (factor * c(static_cast<Eigen::Index>(i))) * p;
      }
    }
    out.bound = bound >= 0.0 ? bound : b;
    return out;
  }

 private:
  static double unit_scale(double bound) { return bound > 0.0 ? 1.0 / bound : 1.0; }

  std::vector<double> ridge_shifts() const { return ridge_expansion(s_, {}).shifts; }

  void require_s2(const char* what) const {
    if (s_ != 2) throw InvalidInput(std::string(what) + " gadget needs s = 2");
  }

  void check_current(const Value& v) const {
    if (!v.is_constant() && v.stage != stage())
      throw InvalidInput("value from stage " + std::to_string(v.stage) + " used at stage " + std::to_string(stage()));
  }

  std::size_t width(std::size_t st) const {
    return st == 0 ? input_dim_ : static_cast<std::size_t>(layers_[st - 1].A.rows());
  }

  Value carry_raw(const Value& v) {
    if (s_ != 2) return poly(v, {0.0, 1.0}, v.bound);
    // Scaled identity gadget: v = ((mv + 1)^2 - (mv - 1)^2) / (4m)
    const double m = unit_scale(v.bound);
    const Value u = m * v;
    const Value sum =
        add_unit(u + 1.0) + add_unit(-1.0 * u - 1.0) + (-1.0) * (add_unit(u - 1.0) + add_unit(-1.0 * u + 1.0));
    Value out = (1.0 / (4.0 * m)) * sum;
    out.bound = v.bound;
    return out;
  }

  int s_;
  std::size_t input_dim_;
  std::vector<Layer> layers_;
  std::vector<Value> pending_;
  std::vector<double> unit_bounds_;     // |unit| bounds at the current stage
  std::vector<double> pending_bounds_;  // same for the layer under construction
  std::map<std::vector<std::pair<std::size_t, double>>, Value> carry_memo_;
  std::map<std::tuple<std::vector<std::pair<std::size_t, double>>, double>, std::vector<Value>> basis_memo_;
};

}  // namespace chebnet
