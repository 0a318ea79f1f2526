#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>

#include <unistd.h>

#include <gtest/gtest.h>

#include "chebnet/constructor.hpp"
#include "chebnet/expression.hpp"
#include "chebnet/serialization.hpp"
#include "test_support.hpp"

using namespace chebnet;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof(double)) == 0; }

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("chebnet_" + name + "_" + std::to_string(::getpid()) + ".json");
}

}  // namespace

TEST(NetworkJson, RoundTripIsBitExact) {
  std::mt19937_64 rng(80);
  const auto coeffs = chebnet::testing::random_vector(rng, 24);
  for (const RepuNetwork& net : {build_chebnet_1d(ChebExpansion(coeffs)).network,
                                 build_chebnet_1d_general(ChebExpansion(coeffs), 3).network}) {
    const auto path = temp_file("net");
    save_network(path.string(), net);
    const RepuNetwork back = load_network(path.string());
    std::filesystem::remove(path);
    EXPECT_EQ(back.s(), net.s());
    for (double x : chebnet::testing::sample_points(rng, 100)) EXPECT_TRUE(same_bits(back(x), net(x))) << x;
  }
}

TEST(NetworkJson, RejectsMalformedDocuments) {
  EXPECT_THROW(network_from_json(Json::parse(R"({"s":2})")), InvalidInput);
  EXPECT_THROW(network_from_json(Json::parse(R"({"s":2,"input_dim":1,"layers":[{"A":[[1,2],[3]],"b":[0,0]}]})")),
               InvalidInput);
  EXPECT_THROW(network_from_json(Json::parse(R"({"s":2,"input_dim":2,"layers":[{"A":[[1]],"b":[0]}]})")),
               InvalidInput);
  EXPECT_THROW(network_from_json(Json::parse(R"({"s":2,"input_dim":1,"layers":[{"A":[["a"]],"b":[0]}]})")),
               InvalidInput);
  EXPECT_THROW(load_network("/nonexistent/net.json"), InvalidInput);
}

TEST(ExpansionJson, UnivariateRoundTrip) {
  const ExpansionDocument doc = ExpansionDocument::univariate("legendre", {0.1, -2.0, 1.0 / 3.0});
  const ExpansionDocument back = expansion_from_json(Json::parse(expansion_to_json(doc).dump()));
  EXPECT_EQ(back.basis, "legendre");
  EXPECT_EQ(back.univariate_coeffs(), doc.coeffs);
  // bare coefficient lists are accepted for 1D
  const auto bare = expansion_from_json(Json::parse(R"({"basis":"chebyshev","dim":1,"coeffs":[1,2,3]})"));
  EXPECT_EQ(bare.univariate_coeffs(), (std::vector<double>{1, 2, 3}));
}

TEST(ExpansionJson, MultivariateRoundTripAndErrors) {
  const MultiChebExpansion e(IndexSet::total_degree(2, 2), {{{1, 1}, 0.5}, {{2, 0}, -1.25}});
  const auto back = expansion_from_json(Json::parse(expansion_to_json(ExpansionDocument::multivariate(e)).dump()));
  EXPECT_EQ(back.index_set.kind(), IndexSetKind::TotalDegree);
  const auto m = back.to_multi();
  EXPECT_EQ(m.coeff({1, 1}), 0.5);
  EXPECT_EQ(m.coeff({2, 0}), -1.25);
  EXPECT_THROW(expansion_from_json(Json::parse(R"({"basis":"hermite","dim":1,"coeffs":[1]})")), InvalidInput);
  EXPECT_THROW(expansion_from_json(Json::parse(R"({"basis":"chebyshev","dim":2,"coeffs":[1]})")), InvalidInput);
  EXPECT_THROW(
      expansion_from_json(Json::parse(R"({"basis":"chebyshev","dim":1,"index_set":{"indices":[[0],[1]]},"coeffs":[1]})")),
      InvalidInput);
}

TEST(Expression, Grammar) {
  EXPECT_DOUBLE_EQ(parse_expression("2^3^2")(0.0), 512.0);
  EXPECT_DOUBLE_EQ(parse_expression("-x^2")(3.0), -9.0);
  EXPECT_DOUBLE_EQ(parse_expression("1 + 2*x - x/4")(2.0), 4.5);
  EXPECT_DOUBLE_EQ(parse_expression("cos(pi*x)")(1.0), -1.0);
  EXPECT_DOUBLE_EQ(parse_expression("e")(0.0), std::exp(1.0));
  EXPECT_DOUBLE_EQ(parse_expression("1.5e-1*sin(x)")(0.5), 0.15 * std::sin(0.5));
  const auto f1 = resolve_function("f1");
  const auto g = resolve_function("exp(-x^2)");
  for (double x : {-0.9, -0.2, 0.0, 0.7}) EXPECT_EQ(f1(x), g(x));
}

TEST(Expression, Errors) {
  for (const char* bad : {"", "x +", "(x", "tan(x)", "2 3", "exp x", "y"}) EXPECT_THROW(parse_expression(bad), InvalidInput) << bad;
}
