#pragma once

// Univariate polynomial expansions (Chebyshev, Legendre, monomial, and the
// hierarchical Chebyshev basis), their evaluation, basis conversions, and the
// Chebyshev -> hierarchical transform matrices.
//
// The hierarchical basis with section s indexes j by its base-s digits
// j = d_0 + d_1 s + ... + d_k s^k and sets
//     H_j(x) = T_{d_0}(x) * T_{d_1}(T_s(x)) * ... * T_{d_k}(T_{s^k}(x)),
// which for s = 2 reduces to H_n = T_{2^m} H_{n - 2^m}, m = floor(log2 n).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/multiprecision/cpp_int.hpp>

#include "chebnet/error.hpp"
#include "chebnet/quadrature.hpp"

namespace chebnet {

namespace detail {

template <class Tag>
class CoefficientVector {
 public:
  explicit CoefficientVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) throw InvalidInput("expansion needs at least one coefficient");
  }

  std::span<const double> coeffs() const { return coeffs_; }
  const std::vector<double>& vector() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  std::size_t size() const { return coeffs_.size(); }
  double operator[](std::size_t j) const { return coeffs_[j]; }

  friend bool operator==(const CoefficientVector&, const CoefficientVector&) = default;

 private:
  std::vector<double> coeffs_;
};

}  // namespace detail

/// p(x) = sum_j c_j T_j(x)
using ChebExpansion = detail::CoefficientVector<struct ChebyshevBasisTag>;
/// p(x) = sum_j a_j L_j(x)
using LegendreExpansion = detail::CoefficientVector<struct LegendreBasisTag>;
/// p(x) = sum_j a_j x^j
using MonomialExpansion = detail::CoefficientVector<struct MonomialBasisTag>;

/// p(x) = sum_j c~_j H_j(x) for the hierarchical basis of the given section.
class HierarchicalChebExpansion {
 public:
  HierarchicalChebExpansion(std::vector<double> coeffs, int section)
      : coeffs_(std::move(coeffs)), section_(section) {
    if (coeffs_.empty()) throw InvalidInput("hierarchical expansion needs at least one coefficient");
    if (section_ < 2) throw InvalidInput("hierarchical section must be >= 2");
  }

  std::span<const double> coeffs() const { return coeffs_; }
  const std::vector<double>& vector() const { return coeffs_; }
  std::size_t degree() const { return coeffs_.size() - 1; }
  std::size_t size() const { return coeffs_.size(); }
  int section() const { return section_; }
  double operator[](std::size_t j) const { return coeffs_[j]; }

 private:
  std::vector<double> coeffs_;
  int section_;
};

// ---------------------------------------------------------------------------
// Small integer helpers

/// s^e with an overflow guard; transform orders beyond `limit` are rejected.
inline std::size_t checked_pow(std::size_t s, std::size_t e,
                               std::size_t limit = std::size_t{1} << 40) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > limit / s) throw InvalidInput("transform order " + std::to_string(s) + "^" +
                                          std::to_string(e) + " is too large");
    r *= s;
  }
  return r;
}

/// Smallest k >= 0 with s^{k+1} > n (for s = 2 and n >= 1 this is floor(log2 n)).
inline int hierarchical_level(std::size_t n, int s) {
  if (s < 2) throw InvalidInput("section must be >= 2");
  int k = 0;
  std::size_t span = static_cast<std::size_t>(s);
  while (span <= n) {
    span *= static_cast<std::size_t>(s);
    ++k;
  }
  return k;
}

inline int floor_log2(std::size_t n) {
  if (n == 0) throw InvalidInput("floor_log2(0) is undefined");
  int m = 0;
  while ((n >> 1) != 0) {
    n >>= 1;
    ++m;
  }
  return m;
}

/// ceil(log_s n) for n >= 1.
inline int ceil_log(std::size_t n, int s) {
  if (n == 0) throw InvalidInput("ceil_log(0) is undefined");
  int k = 0;
  std::size_t p = 1;
  while (p < n) {
    p *= static_cast<std::size_t>(s);
    ++k;
  }
  return k;
}

// ---------------------------------------------------------------------------
// Evaluation

/// T_n(x) by the three-term recurrence (valid on all of R).
inline double chebyshev_t(std::size_t n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0, cur = x;
  for (std::size_t k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Clenshaw recurrence for sum_j c_j T_j(x).
inline double eval_chebyshev(std::span<const double> c, double x) {
  if (c.empty()) throw InvalidInput("eval_chebyshev: empty coefficient vector");
  double b1 = 0.0, b2 = 0.0;
  for (std::size_t j = c.size() - 1; j >= 1; --j) {
    const double b0 = c[j] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + x * b1 - b2;
}

inline double eval_chebyshev(const ChebExpansion& e, double x) { return eval_chebyshev(e.coeffs(), x); }

inline double eval_legendre(std::span<const double> a, double x) {
  if (a.empty()) throw InvalidInput("eval_legendre: empty coefficient vector");
  double sum = a[0];
  double prev = 1.0, cur = x;
  for (std::size_t j = 1; j < a.size(); ++j) {
    sum += a[j] * cur;
    const double jj = static_cast<double>(j);
    const double next = ((2.0 * jj + 1.0) * x * cur - jj * prev) / (jj + 1.0);
    prev = cur;
    cur = next;
  }
  return sum;
}

inline double eval_legendre(const LegendreExpansion& e, double x) { return eval_legendre(e.coeffs(), x); }

/// Horner evaluation of sum_j a_j x^j.
inline double eval_monomial(std::span<const double> a, double x) {
  if (a.empty()) throw InvalidInput("eval_monomial: empty coefficient vector");
  double acc = 0.0;
  for (std::size_t j = a.size(); j-- > 0;) acc = acc * x + a[j];
  return acc;
}

inline double eval_monomial(const MonomialExpansion& e, double x) { return eval_monomial(e.coeffs(), x); }

/// H_j(x) values for j = 0..count-1 of the given section.
inline std::vector<double> hierarchical_basis(std::size_t count, int s, double x) {
  if (s < 2) throw InvalidInput("hierarchical_basis: section must be >= 2");
  std::vector<double> out(count, 1.0);
  if (count == 0) return out;
  // table[t][d] = T_d(T_{s^t}(x)) for d < s
  std::vector<std::vector<double>> table;
  double z = x;
  std::size_t span = 1;
  while (span < count) {
    std::vector<double> row(static_cast<std::size_t>(s));
    for (int d = 0; d < s; ++d) row[static_cast<std::size_t>(d)] = chebyshev_t(static_cast<std::size_t>(d), z);
    table.push_back(std::move(row));
    z = chebyshev_t(static_cast<std::size_t>(s), z);
    if (span > std::numeric_limits<std::size_t>::max() / static_cast<std::size_t>(s)) break;
    span *= static_cast<std::size_t>(s);
  }
  for (std::size_t j = 0; j < count; ++j) {
    double v = 1.0;
    std::size_t rest = j;
    for (std::size_t t = 0; rest != 0; ++t) {
      v *= table[t][rest % static_cast<std::size_t>(s)];
      rest /= static_cast<std::size_t>(s);
    }
    out[j] = v;
  }
  return out;
}

inline double eval_hierarchical(const HierarchicalChebExpansion& h, double x) {
  const auto basis = hierarchical_basis(h.size(), h.section(), x);
  double sum = 0.0;
  for (std::size_t j = 0; j < h.size(); ++j) sum += h[j] * basis[j];
  return sum;
}

// ---------------------------------------------------------------------------
// Approximation

/// Degree-N interpolant at the Chebyshev-Gauss-Lobatto points cos(k pi / N),
/// computed as a direct discrete cosine sum. N = 0 returns the Chebyshev mean
/// (1/pi) int f(x) (1-x^2)^{-1/2} dx, evaluated with a 64-point Gauss-Chebyshev rule.
template <class F>
ChebExpansion chebyshev_interpolate(F&& f, int N) {
  if (N < 0) throw InvalidInput("chebyshev_interpolate: degree must be >= 0");
  auto sample = [&](double x) {
    const double v = static_cast<double>(f(x));
    if (!std::isfinite(v))
      throw NumericalFailure("chebyshev_interpolate: non-finite sample at x = " + std::to_string(x));
    return v;
  };
  if (N == 0) {
    constexpr int kMeanNodes = 64;
    double sum = 0.0;
    for (int k = 0; k < kMeanNodes; ++k)
      sum += sample(std::cos(std::numbers::pi * (k + 0.5) / kMeanNodes));
    return ChebExpansion({sum / kMeanNodes});
  }
  const auto n = static_cast<std::size_t>(N);
  std::vector<double> values(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    // sin form keeps the nodes exactly symmetric about 0
    const double theta = std::numbers::pi * (static_cast<double>(n) - 2.0 * static_cast<double>(k)) /
                         (2.0 * static_cast<double>(n));
    values[k] = sample(std::sin(theta));
  }
  std::vector<double> c(n + 1, 0.0);
  for (std::size_t j = 0; j <= n; ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const std::size_t phase = (j * k) % (2 * n);
      double term = values[k] * std::cos(std::numbers::pi * static_cast<double>(phase) / static_cast<double>(n));
      if (k == 0 || k == n) term *= 0.5;
      sum += term;
    }
    c[j] = 2.0 * sum / static_cast<double>(n);
  }
  c[0] *= 0.5;
  c[n] *= 0.5;
  return ChebExpansion(std::move(c));
}

/// Legendre projection a_j = (2j+1)/2 int f L_j using 2N+2 Gauss-Legendre nodes.
template <class F>
LegendreExpansion legendre_project(F&& f, int N) {
  if (N < 0) throw InvalidInput("legendre_project: degree must be >= 0");
  const auto n = static_cast<std::size_t>(N);
  const QuadratureRule rule = gauss_legendre(2 * n + 2);
  std::vector<double> a(n + 1, 0.0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x = rule.nodes[i];
    const double fx = static_cast<double>(f(x));
    if (!std::isfinite(fx))
      throw NumericalFailure("legendre_project: non-finite sample at x = " + std::to_string(x));
    const double wf = rule.weights[i] * fx;
    double prev = 1.0, cur = x;
    a[0] += wf;
    for (std::size_t j = 1; j <= n; ++j) {
      a[j] += wf * cur;
      const double jj = static_cast<double>(j);
      const double next = ((2.0 * jj + 1.0) * x * cur - jj * prev) / (jj + 1.0);
      prev = cur;
      cur = next;
    }
  }
  for (std::size_t j = 0; j <= n; ++j) a[j] *= (2.0 * static_cast<double>(j) + 1.0) / 2.0;
  return LegendreExpansion(std::move(a));
}

// ---------------------------------------------------------------------------
// Basis conversion matrices

enum class TransformKind { HierarchicalS2, HierarchicalGeneral, LegendreToMonomial, HierarchicalBlock, ChebyshevToMonomial };

struct TransformMatrix {
  Eigen::MatrixXd entries;
  TransformKind kind;
  int section = 2;
  int level = 0;
};

namespace detail {

inline constexpr std::size_t kExactConversionLimit = 64;

// Rational with power-of-two denominator -> double (numerator rounded once).
inline double rational_to_double(const boost::multiprecision::cpp_rational& r) {
  using boost::multiprecision::cpp_int;
  const cpp_int num = boost::multiprecision::numerator(r);
  cpp_int den = boost::multiprecision::denominator(r);
  int shift = 0;
  while (den > 1 && (den & 1) == 0) {
    den >>= 1;
    ++shift;
  }
  if (den == 1) return std::ldexp(num.convert_to<double>(), -shift);
  return static_cast<double>(r.convert_to<long double>());
}

}  // namespace detail

/// B_N: column j holds the monomial coefficients of L_j. Built with exact
/// rational arithmetic for N <= 64 and double recurrence beyond that.
inline TransformMatrix legendre_to_monomial_matrix(std::size_t N) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N + 1), static_cast<Eigen::Index>(N + 1));
  if (N <= detail::kExactConversionLimit) {
    using boost::multiprecision::cpp_rational;
    std::vector<std::vector<cpp_rational>> P;
    P.push_back({cpp_rational(1)});
    if (N >= 1) P.push_back({cpp_rational(0), cpp_rational(1)});
    for (std::size_t n = 1; n < N; ++n) {
      std::vector<cpp_rational> next(n + 2, cpp_rational(0));
      const cpp_rational a(static_cast<long long>(2 * n + 1), static_cast<long long>(n + 1));
      const cpp_rational b(static_cast<long long>(n), static_cast<long long>(n + 1));
      for (std::size_t i = 0; i <= n; ++i) next[i + 1] += a * P[n][i];
      for (std::size_t i = 0; i + 1 <= n; ++i) next[i] -= b * P[n - 1][i];
      P.push_back(std::move(next));
    }
    for (std::size_t j = 0; j <= N; ++j)
      for (std::size_t i = 0; i < P[j].size(); ++i)
        B(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = detail::rational_to_double(P[j][i]);
  } else {
    B(0, 0) = 1.0;
    B(1, 1) = 1.0;
    for (Eigen::Index n = 1; n < static_cast<Eigen::Index>(N); ++n) {
      const double nn = static_cast<double>(n);
      for (Eigen::Index i = 0; i <= n; ++i) B(i + 1, n + 1) += (2.0 * nn + 1.0) / (nn + 1.0) * B(i, n);
      for (Eigen::Index i = 0; i < n; ++i) B(i, n + 1) -= nn / (nn + 1.0) * B(i, n - 1);
    }
  }
  return {std::move(B), TransformKind::LegendreToMonomial, 0, static_cast<int>(N)};
}

inline MonomialExpansion legendre_to_monomial(const LegendreExpansion& e) {
  const TransformMatrix B = legendre_to_monomial_matrix(e.degree());
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(e.coeffs().data(), static_cast<Eigen::Index>(e.size()));
  const Eigen::VectorXd out = B.entries * a;
  return MonomialExpansion(std::vector<double>(out.data(), out.data() + out.size()));
}

/// Column j holds the monomial coefficients of T_j (exact integers for N <= 64).
inline TransformMatrix chebyshev_to_monomial_matrix(std::size_t N) {
  using boost::multiprecision::cpp_int;
  const auto n1 = static_cast<Eigen::Index>(N + 1);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n1, n1);
  std::vector<std::vector<cpp_int>> P;
  P.push_back({cpp_int(1)});
  if (N >= 1) P.push_back({cpp_int(0), cpp_int(1)});
  for (std::size_t n = 1; n < N; ++n) {
    std::vector<cpp_int> next(n + 2, cpp_int(0));
    for (std::size_t i = 0; i <= n; ++i) next[i + 1] += 2 * P[n][i];
    for (std::size_t i = 0; i + 1 <= n; ++i) next[i] -= P[n - 1][i];
    P.push_back(std::move(next));
  }
  for (std::size_t j = 0; j <= N; ++j)
    for (std::size_t i = 0; i < P[j].size(); ++i)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = P[j][i].convert_to<double>();
  return {std::move(M), TransformKind::ChebyshevToMonomial, 0, static_cast<int>(N)};
}

inline MonomialExpansion chebyshev_to_monomial(const ChebExpansion& e) {
  const TransformMatrix M = chebyshev_to_monomial_matrix(e.degree());
  const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(e.coeffs().data(), static_cast<Eigen::Index>(e.size()));
  const Eigen::VectorXd out = M.entries * c;
  return MonomialExpansion(std::vector<double>(out.data(), out.data() + out.size()));
}

namespace detail {

inline constexpr std::size_t kMaxTransformOrder = std::size_t{1} << 14;

inline void round_integer_entries(Eigen::MatrixXd& M, const char* what) {
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      const double r = std::round(M(i, j));
      if (std::abs(M(i, j) - r) > 1e-9)
        throw NumericalFailure(std::string(what) + ": entry drifted from an integer");
      M(i, j) = r;
    }
}

// delta^-_r = 1 for even r, delta^+_r = 1 for odd r.
inline bool is_even(std::size_t r) { return r % 2 == 0; }

// Block map: Chebyshev coefficients b (length s^{k+1}) -> the s
// Chebyshev coefficient blocks of the sub-polynomials P~_l, stacked.
inline std::vector<double> split_blocks(std::span<const double> b, std::size_t s, std::size_t sk) {
  std::vector<double> out(s * sk, 0.0);
  for (std::size_t l = 0; l < s; ++l) {
    double* block = out.data() + l * sk;
    block[0] = b[l * sk];
    const double factor = (l == 0) ? 1.0 : 2.0;
    for (std::size_t j = 1; j < sk; ++j) {
      double acc = 0.0;
      for (std::size_t r = l; r < s; ++r) {
        if (is_even(r - l))
          acc += b[r * sk + j];
        else
          acc -= b[(r + 1) * sk - j];
      }
      block[j] = factor * acc;
    }
  }
  return out;
}

inline std::vector<double> apply_transform(std::span<const double> b, std::size_t s, int k) {
  if (k == 0) return std::vector<double>(b.begin(), b.end());
  const std::size_t sk = checked_pow(s, static_cast<std::size_t>(k));
  std::vector<double> blocks = split_blocks(b, s, sk);
  std::vector<double> out(s * sk);
  for (std::size_t l = 0; l < s; ++l) {
    const auto sub = apply_transform(std::span<const double>(blocks.data() + l * sk, sk), s, k - 1);
    std::copy(sub.begin(), sub.end(), out.begin() + static_cast<std::ptrdiff_t>(l * sk));
  }
  return out;
}

}  // namespace detail

/// S_m of order 2^{m+1} from S_j = (I_2 (x) S_{j-1}) [[I, A_j], [0, 2I]], S_0 = I_2.
inline TransformMatrix build_S_matrix(int m) {
  if (m < 0) throw InvalidInput("build_S_matrix: level must be >= 0");
  checked_pow(2, static_cast<std::size_t>(m) + 1, detail::kMaxTransformOrder);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(2, 2);
  for (int j = 1; j <= m; ++j) {
    const Eigen::Index half = Eigen::Index{1} << j;  // 2^j
    const Eigen::Index n = 2 * half;
    Eigen::MatrixXd step = Eigen::MatrixXd::Identity(n, n);
    // A_j = [0; -J_{2^j - 1}; 0] occupies rows 1..2^j-1 of the upper-right block
    for (Eigen::Index i = 0; i < half - 1; ++i) step(1 + i, half + 1 + (half - 2 - i)) = -1.0;
    for (Eigen::Index i = half + 1; i < n; ++i) step(i, i) = 2.0;
    Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(n, n);
    kron.topLeftCorner(half, half) = S;
    kron.bottomRightCorner(half, half) = S;
    S = kron * step;
  }
  detail::round_integer_entries(S, "build_S_matrix");
  return {std::move(S), TransformKind::HierarchicalS2, 2, m};
}

/// S_k^{(s)} of order s^{k+1}, assembled from the per-block coefficient maps:
/// S_k = (I_s (x) S_{k-1}) R^{(k)}, S_0 = I_s.
inline TransformMatrix build_S_matrix_general(int s, int k) {
  if (s < 2) throw InvalidInput("build_S_matrix_general: section must be >= 2");
  if (k < 0) throw InvalidInput("build_S_matrix_general: level must be >= 0");
  const auto su = static_cast<std::size_t>(s);
  checked_pow(su, static_cast<std::size_t>(k) + 1, detail::kMaxTransformOrder);
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(s, s);
  for (int level = 1; level <= k; ++level) {
    const std::size_t sk = checked_pow(su, static_cast<std::size_t>(level));
    const std::size_t n = sk * su;
    Eigen::MatrixXd next(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t l = 0; l < su; ++l) {
      std::vector<Eigen::Triplet<double>> triplets;
      triplets.emplace_back(0, static_cast<int>(l * sk), 1.0);
      const double factor = (l == 0) ? 1.0 : 2.0;
      for (std::size_t j = 1; j < sk; ++j)
        for (std::size_t r = l; r < su; ++r) {
          if (detail::is_even(r - l))
            triplets.emplace_back(static_cast<int>(j), static_cast<int>(r * sk + j), factor);
          else
            triplets.emplace_back(static_cast<int>(j), static_cast<int>((r + 1) * sk - j), -factor);
        }
      Eigen::SparseMatrix<double> R(static_cast<Eigen::Index>(sk), static_cast<Eigen::Index>(n));
      R.setFromTriplets(triplets.begin(), triplets.end());
      next.middleRows(static_cast<Eigen::Index>(l * sk), static_cast<Eigen::Index>(sk)) = S * R;
    }
    S = std::move(next);
  }
  detail::round_integer_entries(S, "build_S_matrix_general");
  return {std::move(S), TransformKind::HierarchicalGeneral, s, k};
}

/// Parent transform S_k^{(s)} for degree N: k minimal with s^{k+1} > N.
inline TransformMatrix parent_transform(int s, std::size_t N) {
  return s == 2 ? build_S_matrix(hierarchical_level(N, 2)) : build_S_matrix_general(s, hierarchical_level(N, s));
}

/// H_N: leading (N+1)x(N+1) block of the parent transform.
inline TransformMatrix leading_block(int s, std::size_t N) {
  TransformMatrix parent = parent_transform(s, N);
  const auto n1 = static_cast<Eigen::Index>(N + 1);
  Eigen::MatrixXd H = parent.entries.topLeftCorner(n1, n1);
  return {std::move(H), TransformKind::HierarchicalBlock, s, parent.level};
}

/// Zero-pads to s^{k+1}, applies the transform, truncates back to the input length.
inline HierarchicalChebExpansion chebyshev_to_hierarchical(const ChebExpansion& e, int s) {
  if (s < 2) throw InvalidInput("chebyshev_to_hierarchical: section must be >= 2");
  const std::size_t n = e.degree();
  if (n == 0) return HierarchicalChebExpansion(e.vector(), s);
  const int k = hierarchical_level(n, s);
  const std::size_t order = checked_pow(static_cast<std::size_t>(s), static_cast<std::size_t>(k) + 1);
  std::vector<double> padded(order, 0.0);
  std::copy(e.coeffs().begin(), e.coeffs().end(), padded.begin());
  std::vector<double> out = detail::apply_transform(padded, static_cast<std::size_t>(s), k);
  for (std::size_t j = n + 1; j < order; ++j)
    if (out[j] != 0.0) throw NumericalFailure("chebyshev_to_hierarchical: padding produced a nonzero tail");
  out.resize(n + 1);
  return HierarchicalChebExpansion(std::move(out), s);
}

// ---------------------------------------------------------------------------
// T_{rs+k} expansion identity

struct ChebProductTerm {
  double coeff;
  std::size_t a;
  std::size_t b;  // term is coeff * T_a(x) * T_b(x)
};

/// Both sides of
///   T_{rs+k} = 2 sum_{i=1}^{r} delta^-_{r-i} [T_{is} T_k - T_{(i-1)s} T_{s-k}]
///              + delta^+_r T_{s-k} + delta^-_r T_k.
struct ChebIdentityReport {
  std::size_t lhs_degree = 0;
  std::vector<ChebProductTerm> rhs;

  double lhs(double x) const { return chebyshev_t(lhs_degree, x); }
  double rhs_value(double x) const {
    double sum = 0.0;
    for (const auto& t : rhs) sum += t.coeff * chebyshev_t(t.a, x) * chebyshev_t(t.b, x);
    return sum;
  }
};

inline ChebIdentityReport cheb_expand_T(int r, int s, int k) {
  if (r < 1) throw InvalidInput("cheb_expand_T: r must be >= 1");
  if (s < 2) throw InvalidInput("cheb_expand_T: s must be >= 2");
  if (k < 1 || k > s - 1) throw InvalidInput("cheb_expand_T: k must lie in 1..s-1");
  const auto ru = static_cast<std::size_t>(r), su = static_cast<std::size_t>(s), ku = static_cast<std::size_t>(k);
  ChebIdentityReport report;
  report.lhs_degree = ru * su + ku;
  for (std::size_t i = 1; i <= ru; ++i) {
    if (!detail::is_even(ru - i)) continue;
    report.rhs.push_back({2.0, i * su, ku});
    report.rhs.push_back({-2.0, (i - 1) * su, su - ku});
  }
  if (detail::is_even(ru))
    report.rhs.push_back({1.0, ku, 0});
  else
    report.rhs.push_back({1.0, su - ku, 0});
  return report;
}

}  // namespace chebnet
