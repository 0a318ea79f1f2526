// Walks through the library: interpolate, build exact networks, compare
// conditioning of the two coefficient routes, then fine-tune briefly.

#include <cmath>
#include <cstdio>

#include "chebnet/chebnet.hpp"

using namespace chebnet;

namespace {

double max_error(const RepuNetwork& net, const std::function<double(double)>& ref) {
  double err = 0.0;
  Eigen::VectorXd x(1);
  for (int i = 0; i < 1000; ++i) {
    x(0) = -1.0 + 2.0 * i / 999.0;
    err = std::max(err, std::abs(net.forward(x)(0) - ref(x(0))));
  }
  return err;
}

void print_receipt(const char* name, const ConstructionReceipt& r) {
  const auto m = r.measured();
  std::printf("%-9s hidden=%zu (<= %zu)  activations=%zu (<= %zu)  nonzeros=%zu\n", name, m.hidden_layers,
              r.predicted_depth, m.activation_count, r.predicted_activations, m.nonzero_weights);
}

}  // namespace

int main() {
  const auto f = test_function("f2");
  const int N = 30;

  const ChebExpansion cheb = chebyshev_interpolate(f, N);
  const LegendreExpansion leg = legendre_project(f, N);
  const auto cheb_ref = [&](double x) { return eval_chebyshev(cheb, x); };

  const auto cn = build_chebnet_1d(cheb);
  const auto pn = build_powernet_1d(legendre_to_monomial(leg));
  const auto c3 = build_chebnet_1d_general(cheb, 3);
  print_receipt("ChebNet", cn);
  print_receipt("PowerNet", pn);
  print_receipt("ChebNet3", c3);
  std::printf("network vs expansion: %.2e (ChebNet), %.2e (s=3)\n", max_error(cn.network, cheb_ref),
              max_error(c3.network, cheb_ref));
  std::printf("network vs f:         %.2e\n\n", max_error(cn.network, f));

  const auto mags = coefficient_magnitudes(f, N);
  double mono = 0.0, hier = 0.0;
  for (double v : mags.monomial) mono = std::max(mono, std::abs(v));
  for (double v : mags.hierarchical) hier = std::max(hier, std::abs(v));
  std::printf("largest coefficient: monomial %.3e, hierarchical %.3e\n\n", mono, hier);

  std::printf("   N   kappa_B     kappa_H\n");
  for (const CondRow& row : cond_table_s2({10, 20, 30, 40}))
    std::printf("%4zu   %-10.4g  %.4g\n", row.N, row.kappa_B, row.kappa_H);

  TrainConfig cfg;
  cfg.iterations = 200;
  const Dataset data = uniform_dataset(f);
  const auto tc = train(cn.network, data, cfg).trace;
  const auto tp = train(pn.network, data, cfg).trace;
  std::printf("\n200 RMSProp steps, MSE before -> after\n");
  std::printf("ChebNet   %.3e -> %.3e\n", tc.initial_loss, tc.final_loss);
  std::printf("PowerNet  %.3e -> %.3e%s\n", tp.initial_loss, tp.final_loss, tp.diverged ? " (diverged)" : "");
  return 0;
}
