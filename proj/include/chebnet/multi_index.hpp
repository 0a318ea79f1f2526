#pragma once

// Multi-index sets and multivariate Chebyshev expansions stored sparsely by
// multi-index.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chebnet/cheb_core.hpp"
#include "chebnet/error.hpp"

namespace chebnet {

using MultiIndex = std::vector<std::size_t>;

enum class IndexSetKind { Tensor, TotalDegree, HyperbolicCross, Custom };

inline std::string to_string(IndexSetKind kind) {
  switch (kind) {
    case IndexSetKind::Tensor: return "tensor";
    case IndexSetKind::TotalDegree: return "total_degree";
    case IndexSetKind::HyperbolicCross: return "hyperbolic_cross";
    case IndexSetKind::Custom: return "custom";
  }
  return "custom";
}

inline IndexSetKind index_set_kind_from_string(const std::string& name) {
  if (name == "tensor") return IndexSetKind::Tensor;
  if (name == "total_degree") return IndexSetKind::TotalDegree;
  if (name == "hyperbolic_cross") return IndexSetKind::HyperbolicCross;
  if (name == "custom") return IndexSetKind::Custom;
  throw InvalidInput("unknown index set kind '" + name + "'");
}

/// Finite set of d-dimensional multi-indices, kept sorted and unique.
/// Downward closure is checked separately (validate_downward_closed) so that
/// invalid custom sets can be represented and reported.
class IndexSet {
 public:
  IndexSet(std::size_t dim, std::vector<MultiIndex> indices, IndexSetKind kind = IndexSetKind::Custom,
           std::size_t degree = 0)
      : dim_(dim), kind_(kind), degree_(degree) {
    if (dim_ == 0) throw InvalidInput("index set dimension must be >= 1");
    for (const auto& k : indices)
      if (k.size() != dim_) throw InvalidInput("multi-index length does not match index set dimension");
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (indices.empty()) throw InvalidInput("index set must not be empty");
    indices_ = std::move(indices);
  }

  /// {k : max_i k_i <= N}
  static IndexSet tensor(std::size_t N, std::size_t d) {
    return generate(d, IndexSetKind::Tensor, N, [N](const MultiIndex& k) {
      return std::all_of(k.begin(), k.end(), [N](std::size_t v) { return v <= N; });
    }, N);
  }

  /// {k : |k|_1 <= n}
  static IndexSet total_degree(std::size_t n, std::size_t d) {
    return generate(d, IndexSetKind::TotalDegree, n, [n](const MultiIndex& k) {
      return std::accumulate(k.begin(), k.end(), std::size_t{0}) <= n;
    }, n);
  }

  /// {k : prod_i max(1, k_i) <= n}
  static IndexSet hyperbolic_cross(std::size_t n, std::size_t d) {
    if (n == 0) throw InvalidInput("hyperbolic cross needs n >= 1");
    return generate(d, IndexSetKind::HyperbolicCross, n, [n](const MultiIndex& k) {
      std::size_t p = 1;
      for (std::size_t v : k) {
        p *= std::max<std::size_t>(1, v);
        if (p > n) return false;
      }
      return true;
    }, n);
  }

  std::size_t dim() const { return dim_; }
  IndexSetKind kind() const { return kind_; }
  std::size_t degree() const { return degree_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<MultiIndex>& indices() const { return indices_; }

  bool contains(const MultiIndex& k) const { return std::binary_search(indices_.begin(), indices_.end(), k); }

  /// Largest degree that appears in coordinate `axis`.
  std::size_t max_degree(std::size_t axis) const {
    std::size_t m = 0;
    for (const auto& k : indices_) m = std::max(m, k.at(axis));
    return m;
  }

 private:
  // Odometer walk over a downward-closed predicate: once k fails with all
  // lower coordinates at zero, nothing further along that axis can pass.
  template <class Pred>
  static IndexSet generate(std::size_t d, IndexSetKind kind, std::size_t bound, Pred keep, std::size_t degree) {
    if (d == 0) throw InvalidInput("index set dimension must be >= 1");
    std::vector<MultiIndex> out;
    MultiIndex k(d, 0);
    out.push_back(k);
    while (true) {
      std::size_t axis = 0;
      for (; axis < d; ++axis) {
        ++k[axis];
        if (k[axis] <= bound && keep(k)) break;
        k[axis] = 0;
      }
      if (axis == d) break;
      out.push_back(k);
    }
    return IndexSet(d, std::move(out), kind, degree);
  }

  std::size_t dim_;
  IndexSetKind kind_;
  std::size_t degree_;
  std::vector<MultiIndex> indices_;
};

/// True iff every componentwise-smaller index of every member is also a member.
/// Checking the immediate predecessors k - e_i suffices.
inline bool validate_downward_closed(const IndexSet& set) {
  for (const auto& k : set.indices()) {
    MultiIndex prev = k;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] == 0) continue;
      --prev[i];
      if (!set.contains(prev)) return false;
      ++prev[i];
    }
  }
  return true;
}

/// p(x) = sum_{k in set} c_k prod_i T_{k_i}(x_i); absent keys are zero.
class MultiChebExpansion {
 public:
  MultiChebExpansion(IndexSet set, std::map<MultiIndex, double> coeffs)
      : set_(std::move(set)), coeffs_(std::move(coeffs)) {
    for (const auto& [k, c] : coeffs_)
      if (!set_.contains(k)) throw InvalidInput("coefficient key lies outside the index set");
  }

  const IndexSet& index_set() const { return set_; }
  const std::map<MultiIndex, double>& coeffs() const { return coeffs_; }
  std::size_t dim() const { return set_.dim(); }

  double coeff(const MultiIndex& k) const {
    auto it = coeffs_.find(k);
    return it == coeffs_.end() ? 0.0 : it->second;
  }

  double operator()(std::span<const double> x) const {
    if (x.size() != dim()) throw InvalidInput("evaluation point has wrong dimension");
    std::vector<std::vector<double>> T(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      const std::size_t deg = set_.max_degree(i);
      T[i].resize(deg + 1);
      T[i][0] = 1.0;
      if (deg >= 1) T[i][1] = x[i];
      for (std::size_t n = 2; n <= deg; ++n) T[i][n] = 2.0 * x[i] * T[i][n - 1] - T[i][n - 2];
    }
    double sum = 0.0;
    for (const auto& [k, c] : coeffs_) {
      double term = c;
      for (std::size_t i = 0; i < k.size(); ++i) term *= T[i][k[i]];
      sum += term;
    }
    return sum;
  }

 private:
  IndexSet set_;
  std::map<MultiIndex, double> coeffs_;
};

}  // namespace chebnet
