#pragma once

// Spectral condition numbers of the basis-change matrices, and the four
// coefficient vectors (Legendre, monomial, Chebyshev, hierarchical) of a function.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "chebnet/cheb_core.hpp"
#include "chebnet/error.hpp"

namespace chebnet {

/// sigma_max / sigma_min; +inf when sigma_min < 1e-300 sigma_max.
inline double condition_number(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw InvalidInput("condition_number: matrix must be square and non-empty");
  if (!M.allFinite()) throw NumericalFailure("condition_number: matrix has non-finite entries");
  Eigen::VectorXd sv;
  if (M.rows() <= 200)
    sv = Eigen::JacobiSVD<Eigen::MatrixXd>(M).singularValues();
  else
    sv = Eigen::BDCSVD<Eigen::MatrixXd>(M).singularValues();
  const double smax = sv(0), smin = sv(sv.size() - 1);
  if (smax == 0.0 || smin < 1e-300 * smax) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

/// Which matrix stands for H_N: the parent transform S_k (order s^{k+1}) or
/// its leading (N+1)x(N+1) block.
enum class HierarchicalBlock { Parent, Leading };

struct CondRow {
  int s = 2;
  std::size_t N = 0;
  double kappa_B = std::numeric_limits<double>::quiet_NaN();  // NaN beyond the exact-arithmetic range
  double kappa_H = 0.0;
};

inline constexpr std::size_t kDeskConditioningCap = 500;

/// kappa(B_N) for N <= 64 (exact rational entries); NaN above.
inline double kappa_legendre_monomial(std::size_t N) {
  if (N > 64) return std::numeric_limits<double>::quiet_NaN();
  return condition_number(legendre_to_monomial_matrix(N).entries);
}

/// Condition numbers for every (s, N); parent transforms are shared between
/// the degrees that map to the same level.
inline std::vector<CondRow> cond_table_general_s(const std::vector<int>& s_values, const std::vector<std::size_t>& Ns,
                                                 HierarchicalBlock block = HierarchicalBlock::Parent,
                                                 bool allow_long = false) {
  for (int s : s_values)
    if (s < 2) throw InvalidInput("cond: s must be >= 2");
  for (std::size_t N : Ns) {
    if (N == 0) throw InvalidInput("cond: N must be >= 1");
    if (N > kDeskConditioningCap && !allow_long)
      throw InvalidInput("cond: N = " + std::to_string(N) + " exceeds " + std::to_string(kDeskConditioningCap) +
                         "; pass the long-run option to allow it");
  }
  std::map<std::size_t, double> kappa_B;
  std::map<std::pair<int, int>, double> parent_kappa;
  std::vector<CondRow> rows;
  for (int s : s_values)
    for (std::size_t N : Ns) {
      CondRow row;
      row.s = s;
      row.N = N;
      auto itB = kappa_B.find(N);
      if (itB == kappa_B.end()) itB = kappa_B.emplace(N, kappa_legendre_monomial(N)).first;
      row.kappa_B = itB->second;
      if (block == HierarchicalBlock::Parent) {
        const int k = hierarchical_level(N, s);
        auto it = parent_kappa.find({s, k});
        if (it == parent_kappa.end())
          it = parent_kappa.emplace(std::make_pair(s, k), condition_number(parent_transform(s, N).entries)).first;
        row.kappa_H = it->second;
      } else {
        row.kappa_H = condition_number(leading_block(s, N).entries);
      }
      rows.push_back(row);
    }
  return rows;
}

inline std::vector<CondRow> cond_table_s2(const std::vector<std::size_t>& Ns,
                                          HierarchicalBlock block = HierarchicalBlock::Parent) {
  return cond_table_general_s({2}, Ns, block);
}

struct CoefficientReport {
  std::vector<double> legendre;
  std::vector<double> monomial;
  std::vector<double> chebyshev;
  std::vector<double> hierarchical;
};

template <class F>
CoefficientReport coefficient_magnitudes(F&& f, int N) {
  CoefficientReport r;
  const LegendreExpansion a = legendre_project(f, N);
  r.legendre = a.vector();
  r.monomial = legendre_to_monomial(a).vector();
  const ChebExpansion c = chebyshev_interpolate(f, N);
  r.chebyshev = c.vector();
  r.hierarchical = chebyshev_to_hierarchical(c, 2).vector();
  return r;
}

}  // namespace chebnet
