#pragma once

// Exact RePU realizations of polynomial expansions.
//
// 1D, s = 2: the hierarchical coefficients are merged pairwise, one level per
// hidden layer: at level l the pair (r, q) becomes r + q T_{2^l}(x), while the
// same layer advances the squaring chain T_{2^{l+1}} = 2 T_{2^l}^2 - 1 (or
// x^{2^{l+1}} = (x^{2^l})^2 for power series).
//
// General s: groups of s values are merged as sum_d v_d T_d(z) with
// z = T_{s^l}(x), and the chain advances with z <- T_s(z).
//
// Multivariate: p(x_1, x') = sum_i B_i(x') H_i(x_1). The B_i are built
// recursively and run in parallel with a carried copy of x_1; a second stage
// merges them with the 1D algorithm, using the B_i as variable coefficients.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chebnet/builder.hpp"
#include "chebnet/cheb_core.hpp"
#include "chebnet/error.hpp"
#include "chebnet/multi_index.hpp"
#include "chebnet/repu_net.hpp"

namespace chebnet {

struct ConstructionReceipt {
  RepuNetwork network;
  std::size_t predicted_depth = 0;        // proven bound on hidden layers
  std::size_t predicted_activations = 0;  // upper bound implied by the construction
  std::size_t predicted_nonzeros = 0;
  std::uint64_t fingerprint = 0;  // FNV-1a of the source coefficients

  ComplexityReport measured() const { return complexity(network); }
  bool within_bounds() const {
    const auto m = measured();
    return m.hidden_layers <= predicted_depth && m.activation_count <= predicted_activations &&
           m.nonzero_weights <= predicted_nonzeros;
  }
};

/// FNV-1a over a tag and the raw bytes of the coefficients.
inline std::uint64_t fingerprint(const std::string& tag, std::span<const double> values) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const unsigned char* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  mix(reinterpret_cast<const unsigned char*>(tag.data()), tag.size());
  for (double v : values) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof(double));
    mix(bytes, sizeof(double));
  }
  return h;
}

namespace detail {

enum class Chain { Chebyshev, Power };

// r + q T at the next stage; absent entries are std::nullopt.
inline std::optional<Value> combine(NetworkBuilder& nb, const std::optional<Value>& r, const std::optional<Value>& q,
                                    const Value& T) {
  if (!r) return std::nullopt;
  if (!q) return nb.carry(*r);
  const double bound = r->bound + q->bound;
  Value out;
  if (q->is_constant())
    out = nb.carry(*r + q->constant * T);
  else if (r->is_constant())
    out = *r + nb.product(*q, T, q->bound);
  else
    out = nb.carry(*r) + nb.product(*q, T, q->bound);
  out.bound = bound;
  return out;
}

// Consumes hierarchical (or power-series) coefficients as level-0 values and
// returns the merged value; one hidden layer per level.
inline Value assemble_s2(NetworkBuilder& nb, std::vector<std::optional<Value>> vals, Value T, Chain chain) {
  const std::size_t n = vals.size() - 1;
  const int m = floor_log2(n);
  for (int level = 0; level <= m; ++level) {
    std::vector<std::optional<Value>> next((vals.size() + 1) / 2);
    for (std::size_t i = 0; i < next.size(); ++i)
      next[i] = combine(nb, vals[2 * i], 2 * i + 1 < vals.size() ? vals[2 * i + 1] : std::nullopt, T);
    if (level < m) {
      Value sq = nb.square(T, 1.0);
      T = chain == Chain::Chebyshev ? 2.0 * sq - 1.0 : sq;
      T.bound = 1.0;
    }
    nb.next_layer();
    vals = std::move(next);
  }
  return *vals.front();
}

// At most 8 units per merged pair (carry + product), 4 for the carried input
// and 2 per chain step. Constant level-0 pairs only reuse the carried input.
inline std::size_t s2_activation_bound(std::size_t n, bool variable_coefficients) {
  if (n == 0) return 0;
  const auto m = static_cast<std::size_t>(floor_log2(n));
  std::size_t total = 4 + 2 * m;
  for (std::size_t level = variable_coefficients ? 0 : 1; level <= m; ++level) {
    const std::size_t span = std::size_t{1} << (level + 1);
    total += 8 * ((n + span) / span);
  }
  return total;
}

inline ConstructionReceipt build_s2_1d(const std::vector<double>& coeffs, Chain chain, const std::string& tag) {
  const std::size_t n = coeffs.size() - 1;
  NetworkBuilder nb(2, 1);
  const Value x = nb.input(0);
  Value out;
  if (n == 0) {
    out = Value::constant_value(coeffs[0]);
  } else if (n == 2) {
    // single layer: c0 + c1 x + c2 T_2(x) (or c2 x^2)
    const Value sq = nb.square(x, 1.0);
    const Value second = chain == Chain::Chebyshev ? 2.0 * sq - 1.0 : sq;
    out = Value::constant_value(coeffs[0]) + coeffs[1] * nb.carry(x) + coeffs[2] * second;
    nb.next_layer();
  } else {
    std::vector<std::optional<Value>> vals;
    for (double c : coeffs) vals.emplace_back(Value::constant_value(c));
    out = assemble_s2(nb, std::move(vals), x, chain);
  }
  ConstructionReceipt r{nb.finish({out})};
  r.predicted_depth = n == 0 ? 0 : static_cast<std::size_t>(floor_log2(n)) + 1;
  r.predicted_activations = s2_activation_bound(n, false);
  // every unit reads at most 10 values of the previous stage plus a bias
  r.predicted_nonzeros = 11 * (r.predicted_activations + 1);
  r.fingerprint = fingerprint(tag, coeffs);
  return r;
}

}  // namespace detail

/// ChebNet for sum_j c_j T_j(x), s = 2.
inline ConstructionReceipt build_chebnet_1d(const ChebExpansion& e) {
  const auto h = chebyshev_to_hierarchical(e, 2);
  auto r = detail::build_s2_1d(h.vector(), detail::Chain::Chebyshev, "chebyshev");
  r.fingerprint = fingerprint("chebyshev", e.coeffs());
  return r;
}

/// PowerNet for sum_j a_j x^j, s = 2; same layout as the ChebNet of equal length.
inline ConstructionReceipt build_powernet_1d(const MonomialExpansion& e) {
  return detail::build_s2_1d(e.vector(), detail::Chain::Power, "monomial");
}

namespace detail {

// Monomial coefficients of T_0..T_s (row d holds T_d).
inline std::vector<std::vector<double>> cheb_monomial_table(int s) {
  const auto M = chebyshev_to_monomial_matrix(static_cast<std::size_t>(s)).entries;
  std::vector<std::vector<double>> table(static_cast<std::size_t>(s) + 1);
  for (int d = 0; d <= s; ++d)
    for (int t = 0; t <= d; ++t) table[static_cast<std::size_t>(d)].push_back(M(t, d));
  return table;
}

inline std::size_t general_activation_bound(std::size_t n, int s) {
  if (n == 0) return 0;
  const auto su = static_cast<std::size_t>(s);
  if (n <= su) return 2 * su;
  const int K = hierarchical_level(n, s);
  std::size_t per_group = 2 * su;  // carry of y_0
  for (std::size_t t = 1; t < su; ++t) per_group += (t + 2) * 2 * su;
  std::size_t total = 2 * su * static_cast<std::size_t>(K + 1);  // layer-1 basis of x and the chain
  std::size_t span = su;
  for (int level = 1; level <= K; ++level) {
    span *= su;
    total += per_group * ((n + span) / span);
  }
  return total;
}

}  // namespace detail

/// ChebNet with sigma_s units for any s >= 2.
inline ConstructionReceipt build_chebnet_1d_general(const ChebExpansion& e, int s) {
  if (s < 2) throw InvalidInput("build_chebnet_1d_general: s must be >= 2");
  const std::size_t n = e.degree();
  const auto su = static_cast<std::size_t>(s);
  NetworkBuilder nb(s, 1);
  const Value x = nb.input(0);
  Value out;
  if (n == 0) {
    out = Value::constant_value(e[0]);
  } else if (n <= su) {
    const auto mono = chebyshev_to_monomial(e);
    double bound = 0.0;
    for (double c : e.coeffs()) bound += std::abs(c);
    out = nb.poly(x, mono.vector(), bound);
    nb.next_layer();
  } else {
    const auto h = chebyshev_to_hierarchical(e, s);
    const auto table = detail::cheb_monomial_table(s);
    const int K = hierarchical_level(n, s);
    // level 0: groups sum_d c_{si+d} T_d(x), all read from one ridge basis of x
    std::vector<std::optional<Value>> vals;
    for (std::size_t start = 0; start <= n; start += su) {
      std::vector<double> q(su, 0.0);
      double bound = 0.0;
      for (std::size_t d = 0; d < su && start + d <= n; ++d) {
        for (std::size_t t = 0; t <= d; ++t) q[t] += h[start + d] * table[d][t];
        bound += std::abs(h[start + d]);
      }
      vals.emplace_back(nb.poly(x, q, bound));
    }
    Value z = nb.poly(x, table[su], 1.0);
    nb.next_layer();
    for (int level = 1; level <= K; ++level) {
      std::vector<std::optional<Value>> next;
      for (std::size_t start = 0; start < vals.size(); start += su) {
        std::vector<Value> ys;
        double bound = 0.0;
        for (std::size_t d = 0; d < su && start + d < vals.size(); ++d) {
          const Value& v = *vals[start + d];
          bound += v.bound;
          for (std::size_t t = 0; t <= d; ++t) {
            if (ys.size() <= t) ys.push_back(Value::constant_value(0.0));
            ys[t] = ys[t] + table[d][t] * v;
          }
        }
        next.emplace_back(nb.variable_sum(z, ys, bound));
      }
      if (level < K) z = nb.poly(z, table[su], 1.0);
      nb.next_layer();
      vals = std::move(next);
    }
    out = *vals.front();
  }
  ConstructionReceipt r{nb.finish({out})};
  r.predicted_depth = n == 0 ? 0 : static_cast<std::size_t>(ceil_log(n, s)) + 1;
  r.predicted_activations = detail::general_activation_bound(n, s);
  const std::size_t max_width = r.predicted_activations;
  r.predicted_nonzeros = (r.predicted_activations + 1) * (max_width + 2);
  r.fingerprint = fingerprint("chebyshev-s" + std::to_string(s), e.coeffs());
  return r;
}

// ---------------------------------------------------------------------------
// Multivariate

/// Applies the s = 2 hierarchical transform along every axis, fiber by fiber.
/// Downward closure makes each fiber a prefix 0..m, so the zero-padding
/// property keeps every coefficient inside the index set.
inline std::map<MultiIndex, double> hierarchical_coefficients(const MultiChebExpansion& e) {
  std::map<MultiIndex, double> c;
  for (const auto& k : e.index_set().indices()) c[k] = e.coeff(k);
  for (std::size_t axis = 0; axis < e.dim(); ++axis) {
    std::map<MultiIndex, std::vector<double>> fibers;
    for (const auto& [k, v] : c) {
      MultiIndex key = k;
      key[axis] = 0;
      auto& fiber = fibers[key];
      if (fiber.size() <= k[axis]) fiber.resize(k[axis] + 1, 0.0);
      fiber[k[axis]] = v;
    }
    for (const auto& [key, fiber] : fibers) {
      const auto h = chebyshev_to_hierarchical(ChebExpansion(fiber), 2);
      MultiIndex k = key;
      for (std::size_t j = 0; j < h.size(); ++j) {
        k[axis] = j;
        c[k] = h[j];
      }
    }
  }
  return c;
}

namespace detail {

struct SubNet {
  std::optional<RepuNetwork> net;  // empty when the polynomial is a constant
  double constant = 0.0;
  double bound = 0.0;
  std::size_t activation_bound = 0;
};

inline RepuNetwork pad_to_depth(const RepuNetwork& net, std::size_t hidden) {
  if (net.hidden_layers() >= hidden) return net;
  return concat(net, identity_carry(hidden - net.hidden_layers(), net.s(), net.output_dim()));
}

// coeffs: hierarchical coefficients over the remaining axes (index j <-> axes[j]).
inline SubNet build_multi(const std::map<MultiIndex, double>& coeffs, const std::vector<std::size_t>& axes,
                          std::size_t dim) {
  SubNet result;
  for (const auto& [k, v] : coeffs) result.bound += std::abs(v);
  const bool constant = std::all_of(coeffs.begin(), coeffs.end(), [](const auto& kv) {
    return std::all_of(kv.first.begin(), kv.first.end(), [](std::size_t i) { return i == 0; });
  });
  if (constant) {
    result.constant = coeffs.empty() ? 0.0 : coeffs.begin()->second;
    return result;
  }

  std::size_t N1 = 0;
  for (const auto& [k, v] : coeffs) N1 = std::max(N1, k[0]);
  const std::vector<std::size_t> rest(axes.begin() + 1, axes.end());
  std::vector<std::map<MultiIndex, double>> B(N1 + 1);
  for (const auto& [k, v] : coeffs) B[k[0]][MultiIndex(k.begin() + 1, k.end())] = v;
  if (N1 == 0) return build_multi(B[0], rest, dim);

  std::vector<SubNet> parts;
  for (const auto& b : B) parts.push_back(rest.empty() ? SubNet{} : build_multi(b, rest, dim));
  if (rest.empty())
    for (std::size_t i = 0; i <= N1; ++i) {
      parts[i].constant = B[i].empty() ? 0.0 : B[i].begin()->second;
      parts[i].bound = std::abs(parts[i].constant);
    }

  std::size_t depth = 0, sub_activations = 0, variable = 0;
  for (const auto& p : parts)
    if (p.net) {
      depth = std::max(depth, p.net->hidden_layers());
      sub_activations += p.activation_bound;
      ++variable;
    }

  if (variable == 0) {
    // every B_i is constant: a plain 1D network in x_{axes[0]}
    NetworkBuilder nb(2, dim);
    const Value x = nb.input(axes[0]);
    std::vector<std::optional<Value>> vals;
    for (const auto& p : parts) vals.emplace_back(Value::constant_value(p.constant));
    const Value out = assemble_s2(nb, std::move(vals), x, Chain::Chebyshev);
    result.net = nb.finish({out});
    result.activation_bound = s2_activation_bound(N1, false);
    return result;
  }

  // Phi_1: (x_{axes[0]}, nonconstant B_i) at equal depth
  std::vector<RepuNetwork> members;
  if (depth == 0) depth = 1;
  members.push_back(select_inputs(identity_carry(depth, 2), dim, {axes[0]}));
  for (const auto& p : parts)
    if (p.net) members.push_back(pad_to_depth(*p.net, depth));
  const RepuNetwork phi1 = parallelize(members);

  // Phi_2: 1D merge with the B_i as level-0 values
  NetworkBuilder nb(2, 1 + variable);
  const Value x = nb.input(0, 1.0);
  std::vector<std::optional<Value>> vals;
  std::size_t slot = 1;
  for (const auto& p : parts) {
    if (p.net)
      vals.emplace_back(nb.input(slot++, p.bound));
    else
      vals.emplace_back(Value::constant_value(p.constant));
  }
  const Value out = assemble_s2(nb, std::move(vals), x, Chain::Chebyshev);
  result.net = concat(phi1, nb.finish({out}));
  result.activation_bound = sub_activations + 4 * depth * (1 + variable) + s2_activation_bound(N1, true);
  return result;
}

inline std::size_t depth_bound_downward_closed(const IndexSet& set) {
  std::size_t bound = 0;
  for (std::size_t i = 0; i < set.dim(); ++i) {
    const std::size_t Ni = set.max_degree(i);
    if (Ni > 0) bound += static_cast<std::size_t>(floor_log2(Ni)) + 1;
  }
  return bound;
}

inline ConstructionReceipt build_multivariate(const MultiChebExpansion& e, std::size_t depth_bound) {
  if (!validate_downward_closed(e.index_set()))
    throw InvalidInput("index set is not downward closed");
  const auto h = hierarchical_coefficients(e);
  std::vector<std::size_t> axes(e.dim());
  for (std::size_t i = 0; i < axes.size(); ++i) axes[i] = i;
  SubNet sub = build_multi(h, axes, e.dim());
  RepuNetwork net = sub.net ? *sub.net : [&] {
    NetworkBuilder nb(2, e.dim());
    return nb.finish({Value::constant_value(sub.constant)});
  }();
  std::vector<double> flat;
  for (const auto& [k, v] : e.coeffs()) {
    for (std::size_t i : k) flat.push_back(static_cast<double>(i));
    flat.push_back(v);
  }
  ConstructionReceipt r{std::move(net)};
  r.predicted_depth = depth_bound;
  r.predicted_activations = sub.activation_bound;
  // dense bound: every unit may read every unit (or input) of the previous layer
  const std::size_t width = std::max(sub.activation_bound, e.dim());
  r.predicted_nonzeros = (sub.activation_bound + 1) * (width + 1);
  r.fingerprint = fingerprint("multi-" + to_string(e.index_set().kind()), flat);
  return r;
}

}  // namespace detail

/// Index sets where {k : (i, k') in set} need not be boxes; requires downward closure.
inline ConstructionReceipt build_chebnet_downward_closed(const MultiChebExpansion& e) {
  return detail::build_multivariate(e, detail::depth_bound_downward_closed(e.index_set()));
}

/// Total-degree set of degree n: at most d floor(log2 n) + d hidden layers.
inline ConstructionReceipt build_chebnet_total_degree(const MultiChebExpansion& e) {
  if (e.index_set().kind() != IndexSetKind::TotalDegree) throw InvalidInput("expansion is not over a total-degree set");
  const std::size_t n = e.index_set().degree();
  const std::size_t bound = n == 0 ? 0 : e.dim() * (static_cast<std::size_t>(floor_log2(n)) + 1);
  return detail::build_multivariate(e, bound);
}

/// Tensor set of degree N: at most d floor(log2 N) + d hidden layers.
inline ConstructionReceipt build_chebnet_tensor(const MultiChebExpansion& e) {
  if (e.index_set().kind() != IndexSetKind::Tensor) throw InvalidInput("expansion is not over a tensor-product set");
  const std::size_t N = e.index_set().degree();
  const std::size_t bound = N == 0 ? 0 : e.dim() * (static_cast<std::size_t>(floor_log2(N)) + 1);
  return detail::build_multivariate(e, bound);
}

}  // namespace chebnet
