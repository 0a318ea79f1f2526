#pragma once

// JSON documents for networks and coefficient expansions.
//
//   network:   {"s": 2, "input_dim": 1, "layers": [{"A": [[...], ...], "b": [...]}, ...]}
//   expansion: {"basis": "chebyshev", "dim": 1,
//               "index_set": {"kind": "total_degree", "degree": 15, "indices": [[0], [1], ...]},
//               "coeffs": [...]}
//
// Doubles are written in shortest round-trip form, so save/load is bit-exact
// for finite values.

#include <cmath>
#include <cstddef>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chebnet/cheb_core.hpp"
#include "chebnet/error.hpp"
#include "chebnet/multi_index.hpp"
#include "chebnet/repu_net.hpp"

namespace chebnet {

using Json = nlohmann::json;

inline Json network_to_json(const RepuNetwork& net) {
  Json layers = Json::array();
  for (const auto& L : net.layers()) {
    Json A = Json::array();
    for (Eigen::Index i = 0; i < L.A.rows(); ++i) {
      Json row = Json::array();
      for (Eigen::Index j = 0; j < L.A.cols(); ++j) row.push_back(L.A(i, j));
      A.push_back(std::move(row));
    }
    Json b = Json::array();
    for (Eigen::Index i = 0; i < L.b.size(); ++i) b.push_back(L.b(i));
    layers.push_back({{"A", std::move(A)}, {"b", std::move(b)}});
  }
  return {{"s", net.s()}, {"input_dim", net.input_dim()}, {"layers", std::move(layers)}};
}

namespace detail {

inline double json_number(const Json& v, const std::string& where) {
  if (!v.is_number()) throw InvalidInput(where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw InvalidInput(where + ": non-finite number");
  return d;
}

inline const Json& json_field(const Json& obj, const std::string& key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw InvalidInput(where + ": missing field '" + key + "'");
  return obj.at(key);
}

}  // namespace detail

inline RepuNetwork network_from_json(const Json& doc) {
  const Json& s = detail::json_field(doc, "s", "network");
  const Json& dim = detail::json_field(doc, "input_dim", "network");
  const Json& layers_json = detail::json_field(doc, "layers", "network");
  if (!s.is_number_integer() || !dim.is_number_unsigned()) throw InvalidInput("network: 's' and 'input_dim' must be integers");
  if (!layers_json.is_array()) throw InvalidInput("network: 'layers' must be an array");
  std::vector<Layer> layers;
  for (std::size_t k = 0; k < layers_json.size(); ++k) {
    const std::string where = "network layer " + std::to_string(k + 1);
    const Json& A = detail::json_field(layers_json[k], "A", where);
    const Json& b = detail::json_field(layers_json[k], "b", where);
    if (!A.is_array() || !b.is_array() || A.empty()) throw InvalidInput(where + ": 'A' and 'b' must be non-empty arrays");
    const auto rows = static_cast<Eigen::Index>(A.size());
    const auto cols = static_cast<Eigen::Index>(A[0].is_array() ? A[0].size() : 0);
    Layer L{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(static_cast<Eigen::Index>(b.size()))};
    for (Eigen::Index i = 0; i < rows; ++i) {
      const Json& row = A[static_cast<std::size_t>(i)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InvalidInput(where + ": ragged 'A'");
      for (Eigen::Index j = 0; j < cols; ++j) L.A(i, j) = detail::json_number(row[static_cast<std::size_t>(j)], where);
    }
    for (std::size_t i = 0; i < b.size(); ++i) L.b(static_cast<Eigen::Index>(i)) = detail::json_number(b[i], where);
    layers.push_back(std::move(L));
  }
  return RepuNetwork(s.get<int>(), dim.get<std::size_t>(), std::move(layers));
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidInput("'" + path + "' is not valid JSON: " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << doc.dump(1) << '\n';
}

inline void save_network(const std::string& path, const RepuNetwork& net) { write_json_file(path, network_to_json(net)); }
inline RepuNetwork load_network(const std::string& path) { return network_from_json(read_json_file(path)); }

// ---------------------------------------------------------------------------
// Expansions

/// A coefficient vector tagged with its basis; 1D documents carry indices 0..N.
struct ExpansionDocument {
  std::string basis;  // "chebyshev" | "legendre" | "monomial"
  IndexSet index_set;
  std::vector<double> coeffs;  // aligned with index_set.indices()

  std::size_t dim() const { return index_set.dim(); }

  static ExpansionDocument univariate(std::string basis, const std::vector<double>& coeffs) {
    std::vector<MultiIndex> idx;
    for (std::size_t j = 0; j < coeffs.size(); ++j) idx.push_back({j});
    return {std::move(basis), IndexSet(1, std::move(idx), IndexSetKind::TotalDegree, coeffs.size() - 1), coeffs};
  }

  static ExpansionDocument multivariate(const MultiChebExpansion& e) {
    std::vector<double> c;
    for (const auto& k : e.index_set().indices()) c.push_back(e.coeff(k));
    return {"chebyshev", e.index_set(), std::move(c)};
  }

  std::vector<double> univariate_coeffs() const {
    if (dim() != 1) throw InvalidInput("expected a univariate expansion, got dimension " + std::to_string(dim()));
    std::vector<double> out(index_set.max_degree(0) + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i) out[index_set.indices()[i][0]] = coeffs[i];
    return out;
  }

  MultiChebExpansion to_multi() const {
    if (basis != "chebyshev") throw InvalidInput("multivariate expansions must use the chebyshev basis");
    std::map<MultiIndex, double> c;
    for (std::size_t i = 0; i < coeffs.size(); ++i) c[index_set.indices()[i]] = coeffs[i];
    return MultiChebExpansion(index_set, std::move(c));
  }
};

inline Json expansion_to_json(const ExpansionDocument& e) {
  Json indices = Json::array();
  for (const auto& k : e.index_set.indices()) indices.push_back(k);
  return {{"basis", e.basis},
          {"dim", e.dim()},
          {"index_set", {{"kind", to_string(e.index_set.kind())}, {"degree", e.index_set.degree()}, {"indices", indices}}},
          {"coeffs", e.coeffs}};
}

inline ExpansionDocument expansion_from_json(const Json& doc) {
  const Json& basis = detail::json_field(doc, "basis", "expansion");
  if (!basis.is_string()) throw InvalidInput("expansion: 'basis' must be a string");
  const std::string b = basis.get<std::string>();
  if (b != "chebyshev" && b != "legendre" && b != "monomial")
    throw InvalidInput("expansion: unknown basis '" + b + "'");
  const Json& dim = detail::json_field(doc, "dim", "expansion");
  if (!dim.is_number_unsigned() || dim.get<std::size_t>() == 0) throw InvalidInput("expansion: 'dim' must be a positive integer");
  const Json& coeffs_json = detail::json_field(doc, "coeffs", "expansion");
  if (!coeffs_json.is_array() || coeffs_json.empty()) throw InvalidInput("expansion: 'coeffs' must be a non-empty array");
  std::vector<double> coeffs;
  for (const auto& c : coeffs_json) coeffs.push_back(detail::json_number(c, "expansion coeffs"));
  const std::size_t d = dim.get<std::size_t>();

  IndexSetKind kind = IndexSetKind::TotalDegree;
  std::size_t degree = coeffs.size() - 1;
  std::vector<MultiIndex> indices;
  if (doc.contains("index_set")) {
    const Json& is = doc.at("index_set");
    if (is.contains("kind")) kind = index_set_kind_from_string(is.at("kind").get<std::string>());
    if (is.contains("degree")) degree = is.at("degree").get<std::size_t>();
    if (is.contains("indices")) {
      for (const auto& k : is.at("indices")) {
        if (!k.is_array()) throw InvalidInput("expansion: each index must be an array");
        indices.push_back(k.get<MultiIndex>());
      }
    }
  }
  if (indices.empty()) {
    if (d != 1) throw InvalidInput("expansion: multivariate documents must list 'index_set.indices'");
    for (std::size_t j = 0; j < coeffs.size(); ++j) indices.push_back({j});
  }
  if (indices.size() != coeffs.size())
    throw InvalidInput("expansion: " + std::to_string(coeffs.size()) + " coefficients for " +
                       std::to_string(indices.size()) + " indices");
  // keep coefficients aligned with the sorted index order
  std::map<MultiIndex, double> by_index;
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (!by_index.emplace(indices[i], coeffs[i]).second) throw InvalidInput("expansion: duplicate multi-index");
  IndexSet set(d, indices, kind, degree);
  std::vector<double> aligned;
  for (const auto& k : set.indices()) aligned.push_back(by_index.at(k));
  if (b != "chebyshev" && d != 1) throw InvalidInput("expansion: only chebyshev expansions may be multivariate");
  return {b, std::move(set), std::move(aligned)};
}

}  // namespace chebnet
