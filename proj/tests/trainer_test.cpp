#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "chebnet/trainer.hpp"

using namespace chebnet;

namespace {

Layer layer(Eigen::MatrixXd A, Eigen::VectorXd b) { return {std::move(A), std::move(b)}; }

RepuNetwork random_net(std::mt19937_64& rng, std::vector<int> widths) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<Layer> layers;
  for (std::size_t k = 0; k + 1 < widths.size(); ++k) {
    Eigen::MatrixXd A(widths[k + 1], widths[k]);
    Eigen::VectorXd b(widths[k + 1]);
    for (Eigen::Index i = 0; i < A.size(); ++i) A.data()[i] = d(rng);
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = d(rng);
    layers.push_back(layer(A, b));
  }
  return RepuNetwork(2, static_cast<std::size_t>(widths[0]), layers);
}

RepuNetwork constant_net(double c) {
  return RepuNetwork(2, 1, {layer(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Constant(1, c))});
}

}  // namespace

TEST(Loss, TrivialCases) {
  const Dataset ones = uniform_dataset([](double) { return 1.0; });
  EXPECT_EQ(ones.size(), 200u);
  EXPECT_EQ(ones.inputs.front()(0), -1.0);
  EXPECT_EQ(ones.inputs.back()(0), 1.0);
  EXPECT_DOUBLE_EQ(loss_mse(constant_net(0.0), ones), 1.0);
  EXPECT_LE(loss_mse(constant_net(1.0), ones), 1e-20);
  EXPECT_THROW(loss_mse(constant_net(0.0), Dataset{}), InvalidInput);
}

TEST(Loss, MatchesDirectRecomputation) {
  std::mt19937_64 rng(70);
  const RepuNetwork net = random_net(rng, {1, 5, 4, 1});
  const Dataset data = uniform_dataset([](double x) { return std::sin(3 * x); }, 37);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < data.size(); ++i) {
    // hand-rolled forward pass
    Eigen::VectorXd h = data.inputs[i];
    for (std::size_t k = 0; k < net.depth(); ++k) {
      h = net.layers()[k].A * h + net.layers()[k].b;
      if (k + 1 < net.depth())
        for (Eigen::Index j = 0; j < h.size(); ++j) h(j) = h(j) > 0 ? h(j) * h(j) : 0.0;
    }
    const long double r = static_cast<long double>(h(0)) - data.targets[i];
    sum += r * r;
  }
  const double ref = static_cast<double>(sum / data.size());
  EXPECT_LE(std::abs(loss_mse(net, data) - ref) / ref, 1e-14);
  EXPECT_EQ(loss_and_gradient(net, data).first, loss_mse(net, data));
}

TEST(RmsProp, HandEvaluatedSteps) {
  TrainConfig cfg;
  std::vector<Layer> p = {layer(Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1))};
  const std::vector<Layer> g = {layer(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1))};
  RmsPropState st;
  rmsprop_step(p, g, st, cfg);
  // v = 0.01; step = 1e-5 / sqrt(0.01 + 1e-8)
  EXPECT_NEAR(p[0].A(0, 0), -9.999995e-5, 1e-15);
  EXPECT_EQ(p[0].b(0), 0.0);  // zero gradient leaves the parameter alone
  EXPECT_NEAR(st.v[0].A(0, 0), 0.01, 1e-17);
  const double before = p[0].A(0, 0);
  rmsprop_step(p, g, st, cfg);
  EXPECT_NEAR(st.v[0].A(0, 0), 0.0199, 1e-16);
  EXPECT_NEAR(p[0].A(0, 0) - before, -1e-5 / std::sqrt(0.0199 + 1e-8), 1e-18);
}

TEST(Train, DescentOnToyProblem) {
  // y = b fitted to targets 0.5: convex in b
  const Dataset data = uniform_dataset([](double) { return 0.5; }, 10);
  TrainConfig cfg;
  cfg.eta = 1e-2;
  cfg.iterations = 50;
  const auto r = train(constant_net(0.0), data, cfg);
  EXPECT_LT(r.trace.final_loss, r.trace.initial_loss);
  for (std::size_t i = 0; i + 1 < r.trace.losses.size(); ++i) EXPECT_LE(r.trace.losses[i + 1], r.trace.losses[i]);
}

TEST(Train, DeterministicAndNonMutating) {
  std::mt19937_64 rng(71);
  const RepuNetwork net = random_net(rng, {1, 6, 6, 1});
  const RepuNetwork copy = net;
  const Dataset data = uniform_dataset(test_function("f1"));
  TrainConfig cfg;
  cfg.iterations = 30;
  const auto a = train(net, data, cfg);
  const auto b = train(net, data, cfg);
  EXPECT_EQ(a.trace.losses, b.trace.losses);
  EXPECT_EQ(a.trace.fingerprint, b.trace.fingerprint);
  EXPECT_EQ(parameter_fingerprint(net), parameter_fingerprint(copy));
  EXPECT_NE(a.trace.fingerprint, parameter_fingerprint(net));
  EXPECT_EQ(a.trace.losses.size(), 30u);
  for (double l : a.trace.losses) EXPECT_GE(l, 0.0);
}

TEST(Train, ZeroIterations) {
  std::mt19937_64 rng(72);
  const RepuNetwork net = random_net(rng, {1, 3, 1});
  TrainConfig cfg;
  cfg.iterations = 0;
  const auto r = train(net, uniform_dataset(test_function("f1")), cfg);
  EXPECT_TRUE(r.trace.losses.empty());
  EXPECT_EQ(r.trace.initial_loss, r.trace.final_loss);
  EXPECT_EQ(r.trace.fingerprint, parameter_fingerprint(net));
  EXPECT_FALSE(r.trace.diverged);
}

TEST(Train, OverflowIsFlaggedNotThrown) {
  const RepuNetwork net(2, 1,
                        {layer(Eigen::MatrixXd::Constant(1, 1, 1e200), Eigen::VectorXd::Zero(1)),
                         layer(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Zero(1))});
  const auto r = train(net, uniform_dataset(test_function("f1")), TrainConfig{});
  EXPECT_TRUE(r.trace.diverged);
  EXPECT_EQ(r.trace.diverged_at, 0u);
  EXPECT_TRUE(r.trace.losses.empty());
}

TEST(Train, ConfigValidation) {
  TrainConfig cfg;
  cfg.gamma = 1.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = TrainConfig{};
  cfg.eta = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(TestFunctions, Values) {
  EXPECT_EQ(test_function("f1")(0.0), 1.0);
  EXPECT_EQ(test_function("f2")(0.0), 0.0);
  EXPECT_NEAR(test_function("f2")(1.0), 0.36787944117144233, 1e-16);
  EXPECT_THROW(test_function("f3"), InvalidInput);
}
