// chebnet: approximate functions by polynomials, compile them into RePU
// networks, measure basis conditioning and fine-tune the networks.
//
// Exit codes: 0 success, 1 invalid input, 2 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "chebnet/chebnet.hpp"

namespace {

using namespace chebnet;

std::string fmt(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Json json_number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& what) {
  std::vector<T> out;
  for (const auto& item : split(text, ',')) {
    std::size_t used = 0;
    try {
      if constexpr (std::is_same_v<T, double>) {
        out.push_back(std::stod(item, &used));
      } else {
        if (item.front() == '-') throw std::invalid_argument("negative");
        out.push_back(static_cast<T>(std::stoull(item, &used)));
      }
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw InvalidInput(what + ": cannot parse '" + item + "'");
  }
  return out;
}

std::vector<double> grid(std::size_t points) {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i)
    xs[i] = points == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(points - 1);
  return xs;
}

// ---------------------------------------------------------------------------
// Run bookkeeping

struct Run {
  std::string command;
  std::string output;  // --output; empty means stdout
  std::string manifest;
  bool json = false;
  bool long_run = false;
  std::uint64_t seed = 0;
  Json parameters = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  // Documents go to --output when given, otherwise to stdout with the summary on stderr.
  std::ostream& summary() { return output.empty() ? std::cerr : std::cout; }

  void emit(const std::string& path, const std::string& content) {
    if (path.empty()) {
      std::cout << content;
      return;
    }
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write '" + path + "'");
    out << content;
    outputs.push_back(path);
  }

  void write_manifest() const {
    if (outputs.empty()) return;
    const std::string path = !manifest.empty() ? manifest : (output.empty() ? outputs.front() : output) + ".manifest.json";
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    Json doc = {{"command", command},  {"parameters", parameters}, {"inputs", inputs},
                {"outputs", outputs},  {"tool_version", kVersion}, {"wall_clock_seconds", seconds}};
    write_json_file(path, doc);
  }
};

// ---------------------------------------------------------------------------
// Commands

struct ApproxArgs {
  std::string function;
  std::string basis = "chebyshev";
  int N = -1;
};

void cmd_approx(Run& run, const ApproxArgs& a) {
  if (a.N < 0) throw InvalidInput("approx: degree -N must be >= 0");
  if (a.basis != "chebyshev" && a.basis != "legendre") throw InvalidInput("approx: basis must be chebyshev or legendre");
  const auto f = resolve_function(a.function);
  run.parameters = {{"function", a.function}, {"basis", a.basis}, {"N", a.N}};

  std::vector<double> coeffs;
  std::function<double(double)> p;
  if (a.basis == "chebyshev") {
    const ChebExpansion e = chebyshev_interpolate(f, a.N);
    coeffs = e.vector();
    p = [e](double x) { return eval_chebyshev(e, x); };
  } else {
    const LegendreExpansion e = legendre_project(f, a.N);
    coeffs = e.vector();
    p = [e](double x) { return eval_legendre(e, x); };
  }
  double residual = 0.0;
  for (double x : grid(1000)) residual = std::max(residual, std::abs(f(x) - p(x)));

  run.emit(run.output, expansion_to_json(ExpansionDocument::univariate(a.basis, coeffs)).dump(1) + "\n");
  if (run.json)
    run.summary() << Json{{"coefficients", coeffs.size()}, {"max_abs_residual", residual}}.dump() << "\n";
  else
    run.summary() << "coefficients      " << coeffs.size() << "\nmax_abs_residual  " << fmt(residual) << "\n";
}

struct ConstructArgs {
  std::string expansion;
  std::string kind = "chebnet";
  int s = 2;
  bool via_monomial = false;
};

void cmd_construct(Run& run, const ConstructArgs& a) {
  run.inputs.push_back(a.expansion);
  run.parameters = {{"expansion", a.expansion}, {"kind", a.kind}, {"s", a.s}, {"via_monomial", a.via_monomial}};
  const ExpansionDocument doc = expansion_from_json(read_json_file(a.expansion));
  if (a.s < 2) throw InvalidInput("construct: --s must be >= 2");

  std::optional<ConstructionReceipt> receipt;
  std::vector<std::vector<double>> points;
  std::vector<double> reference;

  if (doc.dim() == 1) {
    for (double x : grid(1000)) points.push_back({x});
    const auto c = doc.univariate_coeffs();
    if (a.kind == "chebnet") {
      if (doc.basis != "chebyshev") throw InvalidInput("construct: chebnet needs a chebyshev expansion, got " + doc.basis);
      const ChebExpansion e(c);
      receipt = a.s == 2 ? build_chebnet_1d(e) : build_chebnet_1d_general(e, a.s);
    } else if (a.kind == "powernet") {
      if (a.s != 2) throw InvalidInput("construct: powernet is only available for s = 2");
      if (doc.basis != "monomial" && !a.via_monomial)
        throw InvalidInput("construct: powernet needs a monomial expansion; pass --via-monomial to convert from " + doc.basis);
      MonomialExpansion m = doc.basis == "monomial"   ? MonomialExpansion(c)
                            : doc.basis == "legendre" ? legendre_to_monomial(LegendreExpansion(c))
                                                      : chebyshev_to_monomial(ChebExpansion(c));
      receipt = build_powernet_1d(m);
    } else {
      throw InvalidInput("construct: --kind must be chebnet or powernet");
    }
    for (const auto& pt : points) {
      const double x = pt[0];
      reference.push_back(doc.basis == "chebyshev"  ? eval_chebyshev(c, x)
                          : doc.basis == "legendre" ? eval_legendre(c, x)
                                                    : eval_monomial(c, x));
    }
  } else {
    if (a.kind != "chebnet") throw InvalidInput("construct: multivariate expansions support only chebnet");
    if (a.s != 2) throw InvalidInput("construct: multivariate networks are built for s = 2");
    const MultiChebExpansion e = doc.to_multi();
    switch (e.index_set().kind()) {
      case IndexSetKind::Tensor: receipt = build_chebnet_tensor(e); break;
      case IndexSetKind::TotalDegree: receipt = build_chebnet_total_degree(e); break;
      default: receipt = build_chebnet_downward_closed(e); break;
    }
    std::mt19937_64 rng(run.seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> x(doc.dim());
      for (auto& v : x) v = d(rng);
      reference.push_back(e(x));
      points.push_back(std::move(x));
    }
  }

  double err = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(points[i].data(), static_cast<Eigen::Index>(points[i].size()));
    err = std::max(err, std::abs(receipt->network.forward(x)(0) - reference[i]));
  }
  if (!std::isfinite(err)) throw NumericalFailure("construct: network output is not finite");

  run.emit(run.output, network_to_json(receipt->network).dump(1) + "\n");
  const auto m = receipt->measured();
  if (run.json) {
    run.summary() << Json{{"kind", a.kind},
                          {"s", a.s},
                          {"hidden_layers", m.hidden_layers},
                          {"predicted_depth", receipt->predicted_depth},
                          {"activations", m.activation_count},
                          {"predicted_activations", receipt->predicted_activations},
                          {"nonzero_weights", m.nonzero_weights},
                          {"predicted_nonzeros", receipt->predicted_nonzeros},
                          {"within_bounds", receipt->within_bounds()},
                          {"max_abs_error", err}}
                         .dump()
                  << "\n";
  } else {
    auto& o = run.summary();
    o << "kind              " << a.kind << " (s = " << a.s << ")\n";
    o << "hidden_layers     " << m.hidden_layers << " (bound " << receipt->predicted_depth << ")\n";
    o << "activations       " << m.activation_count << " (bound " << receipt->predicted_activations << ")\n";
    o << "nonzero_weights   " << m.nonzero_weights << " (bound " << receipt->predicted_nonzeros << ")\n";
    o << "max_abs_error     " << fmt(err) << "\n";
  }
}

struct CondArgs {
  std::string s = "2";
  std::string N = "10,20,30,40";
  bool leading_block = false;
};

void cmd_cond(Run& run, const CondArgs& a) {
  const auto s_values = parse_list<int>(a.s, "--s");
  const auto Ns = parse_list<std::size_t>(a.N, "--N");
  run.parameters = {{"s", s_values}, {"N", Ns}, {"leading_block", a.leading_block}, {"long", run.long_run}};
  const auto rows = cond_table_general_s(s_values, Ns,
                                         a.leading_block ? HierarchicalBlock::Leading : HierarchicalBlock::Parent,
                                         run.long_run);
  std::string out;
  if (run.json) {
    Json arr = Json::array();
    for (const auto& r : rows)
      arr.push_back({{"s", r.s}, {"N", r.N}, {"kappa_B", json_number(r.kappa_B)}, {"kappa_H", json_number(r.kappa_H)}});
    out = Json{{"rows", arr}}.dump(1) + "\n";
  } else {
    out = "s,N,kappa_B,kappa_H\n";
    for (const auto& r : rows)
      out += std::to_string(r.s) + "," + std::to_string(r.N) + "," + fmt(r.kappa_B, 4) + "," + fmt(r.kappa_H, 4) + "\n";
  }
  run.emit(run.output, out);
}

struct TrainArgs {
  std::string network;
  std::string function;
  std::size_t points = 200;
  TrainConfig cfg;
  std::string trace;
};

void cmd_train(Run& run, const TrainArgs& a) {
  run.inputs.push_back(a.network);
  run.parameters = {{"network", a.network}, {"function", a.function}, {"points", a.points},
                    {"gamma", a.cfg.gamma},  {"eta", a.cfg.eta},          {"epsilon", a.cfg.epsilon},
                    {"initial_v", a.cfg.initial_v}, {"iterations", a.cfg.iterations}};
  const RepuNetwork net = load_network(a.network);
  if (net.input_dim() != 1) throw InvalidInput("train: only univariate networks can be trained from a function");
  const Dataset data = uniform_dataset(resolve_function(a.function), a.points);
  const TrainResult r = train(net, data, a.cfg);

  std::string trace_path = a.trace;
  if (trace_path.empty() && !run.output.empty())
    trace_path = std::filesystem::path(run.output).replace_extension(".trace.csv").string();
  if (!trace_path.empty()) {
    std::string csv = "iteration,loss\n";
    for (std::size_t i = 0; i < r.trace.losses.size(); ++i) csv += std::to_string(i) + "," + fmt(r.trace.losses[i]) + "\n";
    run.emit(trace_path, csv);
  }
  run.emit(run.output, network_to_json(r.network).dump(1) + "\n");

  const double ratio = r.trace.initial_loss > 0.0 ? r.trace.final_loss / r.trace.initial_loss : 1.0;
  if (run.json) {
    run.summary() << Json{{"initial_loss", r.trace.initial_loss},
                          {"final_loss", r.trace.final_loss},
                          {"ratio", json_number(ratio)},
                          {"iterations_run", r.trace.losses.size()},
                          {"diverged", r.trace.diverged},
                          {"diverged_at", r.trace.diverged ? Json(r.trace.diverged_at) : Json(nullptr)}}
                         .dump()
                  << "\n";
  } else {
    auto& o = run.summary();
    o << "initial_loss      " << fmt(r.trace.initial_loss) << "\n";
    o << "final_loss        " << fmt(r.trace.final_loss) << "\n";
    o << "ratio             " << fmt(ratio) << "\n";
    o << "iterations_run    " << r.trace.losses.size() << "\n";
    o << "diverged          " << (r.trace.diverged ? "yes (iteration " + std::to_string(r.trace.diverged_at) + ")" : "no")
      << "\n";
  }
}

struct CoeffsArgs {
  std::string function;
  int N = -1;
};

void cmd_coeffs(Run& run, const CoeffsArgs& a) {
  if (a.N < 0) throw InvalidInput("coeffs: degree -N must be >= 0");
  run.parameters = {{"function", a.function}, {"N", a.N}};
  const auto r = coefficient_magnitudes(resolve_function(a.function), a.N);
  std::string out;
  if (run.json) {
    out = Json{{"legendre", r.legendre}, {"monomial", r.monomial}, {"chebyshev", r.chebyshev}, {"hierarchical", r.hierarchical}}
              .dump(1) +
          "\n";
  } else {
    out = "j,legendre,monomial,chebyshev,hierarchical\n";
    for (std::size_t j = 0; j < r.legendre.size(); ++j)
      out += std::to_string(j) + "," + fmt(r.legendre[j]) + "," + fmt(r.monomial[j]) + "," + fmt(r.chebyshev[j]) + "," +
             fmt(r.hierarchical[j]) + "\n";
  }
  run.emit(run.output, out);
}

struct EvalArgs {
  std::string network;
  std::vector<std::string> at;
  std::size_t grid_points = 0;
  std::string reference;
};

void cmd_eval(Run& run, const EvalArgs& a) {
  run.inputs.push_back(a.network);
  run.parameters = {{"network", a.network}, {"at", a.at}, {"grid", a.grid_points}, {"reference", a.reference}};
  const RepuNetwork net = load_network(a.network);
  std::vector<std::vector<double>> points;
  for (const auto& p : a.at) points.push_back(parse_list<double>(p, "--at"));
  if (a.grid_points > 0) {
    if (net.input_dim() != 1) throw InvalidInput("eval: --grid needs a univariate network");
    for (double x : grid(a.grid_points)) points.push_back({x});
  }
  if (points.empty()) throw InvalidInput("eval: give points with --at or --grid");

  std::optional<ExpansionDocument> ref;
  if (!a.reference.empty()) {
    run.inputs.push_back(a.reference);
    ref = expansion_from_json(read_json_file(a.reference));
    if (ref->dim() != net.input_dim()) throw InvalidInput("eval: reference dimension differs from the network");
  }

  std::vector<double> values;
  double err = 0.0;
  for (const auto& p : points) {
    if (p.size() != net.input_dim())
      throw InvalidInput("eval: point has " + std::to_string(p.size()) + " coordinates, network expects " +
                         std::to_string(net.input_dim()));
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size()));
    values.push_back(net.forward(x)(0));
    if (ref) {
      double r;
      if (ref->dim() == 1) {
        const auto c = ref->univariate_coeffs();
        r = ref->basis == "chebyshev" ? eval_chebyshev(c, p[0]) : ref->basis == "legendre" ? eval_legendre(c, p[0]) : eval_monomial(c, p[0]);
      } else {
        r = ref->to_multi()(p);
      }
      err = std::max(err, std::abs(values.back() - r));
    }
  }

  std::string out;
  if (run.json) {
    Json doc = {{"points", points}, {"values", Json::array()}};
    for (double v : values) doc["values"].push_back(json_number(v));
    if (ref) doc["max_abs_error"] = json_number(err);
    out = doc.dump(1) + "\n";
  } else {
    for (std::size_t i = 0; i < net.input_dim(); ++i) out += "x" + std::to_string(i + 1) + ",";
    out += "y\n";
    for (std::size_t k = 0; k < points.size(); ++k) {
      for (double v : points[k]) out += fmt(v) + ",";
      out += fmt(values[k]) + "\n";
    }
  }
  run.emit(run.output, out);
  if (ref && !run.json) run.summary() << "max_abs_error     " << fmt(err) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compile polynomial approximations into exact RePU networks"};
  app.set_version_flag("--version", std::string(chebnet::kVersion));
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  Run run;
  app.add_option("--output", run.output, "Write the main result here instead of stdout");
  app.add_option("--manifest", run.manifest, "Run manifest path (default: <output>.manifest.json)");
  app.add_flag("--json", run.json, "Machine-readable output");
  app.add_option("--seed", run.seed, "Seed for sampled reference points");
  app.add_flag("--long", run.long_run, "Allow conditioning runs with N > 500");

  ApproxArgs approx;
  auto* c_approx = app.add_subcommand("approx", "Polynomial approximation of a function");
  c_approx->add_option("function", approx.function, "f1, f2 or an expression in x")->required();
  c_approx->add_option("--basis", approx.basis, "chebyshev | legendre");
  c_approx->add_option("-N,--degree", approx.N, "Polynomial degree")->required();

  ConstructArgs construct;
  auto* c_construct = app.add_subcommand("construct", "Build a network from an expansion file");
  c_construct->add_option("expansion", construct.expansion, "Expansion JSON")->required();
  c_construct->add_option("--kind", construct.kind, "chebnet | powernet");
  c_construct->add_option("--s", construct.s, "Activation power");
  c_construct->add_flag("--via-monomial", construct.via_monomial, "Convert to monomials before building a powernet");

  CondArgs cond;
  auto* c_cond = app.add_subcommand("cond", "Condition numbers of basis transforms");
  c_cond->add_option("--s", cond.s, "Comma-separated sections");
  c_cond->add_option("--N", cond.N, "Comma-separated degrees");
  c_cond->add_flag("--leading-block", cond.leading_block, "Use the leading (N+1)x(N+1) block instead of the parent transform");

  TrainArgs trn;
  auto* c_train = app.add_subcommand("train", "Fine-tune a network with RMSProp");
  c_train->add_option("network", trn.network, "Network JSON")->required();
  c_train->add_option("function", trn.function, "f1, f2 or an expression in x")->required();
  c_train->add_option("--points", trn.points, "Equispaced training points");
  c_train->add_option("--iterations", trn.cfg.iterations, "Full-batch iterations");
  c_train->add_option("--gamma", trn.cfg.gamma, "RMSProp decay");
  c_train->add_option("--eta", trn.cfg.eta, "Learning rate");
  c_train->add_option("--epsilon", trn.cfg.epsilon, "Denominator guard");
  c_train->add_option("--initial-v", trn.cfg.initial_v, "Initial RMSProp accumulator");
  c_train->add_option("--trace", trn.trace, "Loss trace CSV (default: next to --output)");

  CoeffsArgs coeffs;
  auto* c_coeffs = app.add_subcommand("coeffs", "Legendre, monomial, Chebyshev and hierarchical coefficients");
  c_coeffs->add_option("function", coeffs.function, "f1, f2 or an expression in x")->required();
  c_coeffs->add_option("-N,--degree", coeffs.N, "Polynomial degree")->required();

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Evaluate a network");
  c_eval->add_option("network", ev.network, "Network JSON")->required();
  c_eval->add_option("--at", ev.at, "A point, coordinates comma-separated (repeatable)");
  c_eval->add_option("--grid", ev.grid_points, "Equispaced points on [-1, 1]");
  c_eval->add_option("--reference", ev.reference, "Expansion JSON to compare against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_approx->parsed()) {
      run.command = "approx";
      cmd_approx(run, approx);
    } else if (c_construct->parsed()) {
      run.command = "construct";
      cmd_construct(run, construct);
    } else if (c_cond->parsed()) {
      run.command = "cond";
      cmd_cond(run, cond);
    } else if (c_train->parsed()) {
      run.command = "train";
      cmd_train(run, trn);
    } else if (c_coeffs->parsed()) {
      run.command = "coeffs";
      cmd_coeffs(run, coeffs);
    } else if (c_eval->parsed()) {
      run.command = "eval";
      cmd_eval(run, ev);
    }
    run.write_manifest();
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const Json::exception& e) {
    std::cerr << "error: malformed JSON document: " << e.what() << "\n";
    return 1;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
