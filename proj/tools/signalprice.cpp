// Command-line front end: instance generation, baseline comparison, solver
// invocation and scheme evaluation over the JSON formats.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "signalprice/signalprice.hpp"

namespace sp = signalprice;
using nlohmann::json;

namespace {

constexpr int kExitBadInput = 2;
constexpr int kExitResource = 3;

json posterior_distribution_to_json(const sp::PosteriorDistribution& gamma) {
  json atoms = json::array();
  for (const auto& a : gamma.atoms)
    atoms.push_back({{"posterior", a.posterior.probs}, {"weight", a.weight}});
  return atoms;
}

struct SolveArgs {
  std::string instance_path;
  std::string mode = "public";
  std::string out_path;
  std::string format = "csv";
  std::optional<double> lambda;
  std::optional<int> q, b;
  std::optional<long long> K;
  std::optional<double> delta, beta;
  std::uint64_t seed = 0;
  bool exact_coefficients = false;
};

int run_solve(const SolveArgs& args) {
  bool has_explicit =
      args.q || args.b || args.K || args.delta || args.beta;
  if (args.lambda.has_value() == has_explicit) {
    std::cerr << "error: provide exactly one of --lambda or explicit --q/--b/...\n";
    return kExitBadInput;
  }

  sp::AuctionInstance inst = sp::instance_from_json(sp::load_json_file(args.instance_path));
  const int n = inst.num_buyers();
  const int d = inst.num_states();

  int q, b;
  long long K = 0;
  double delta = 0.0, beta = 0.0;
  if (args.lambda) {
    if (args.mode == "public") {
      sp::PublicParams p = sp::public_params(*args.lambda, n, d);
      q = p.q;
      b = p.b;
      K = p.K;
    } else {
      sp::PrivateParams p = sp::private_params(*args.lambda, n, d);
      q = p.q;
      b = p.b;
      K = p.K;
      delta = p.delta;
      beta = p.beta;
    }
  } else {
    if (!args.q || !args.b) {
      std::cerr << "error: explicit mode needs --q and --b\n";
      return kExitBadInput;
    }
    q = *args.q;
    b = *args.b;
    K = args.K.value_or(0);
    delta = args.delta.value_or(0.05);
    beta = args.beta.value_or(0.05);
    if (args.mode == "public" && !args.exact_coefficients && K < 1) {
      std::cerr << "error: sampled public mode needs --K >= 1 (or --exact-coefficients)\n";
      return kExitBadInput;
    }
  }

  auto started = std::chrono::steady_clock::now();
  json solution;
  double value = 0.0;
  if (args.mode == "public") {
    sp::PublicSolution sol =
        sp::solve_public(inst, q, std::max(K, 1LL), b, args.seed, args.exact_coefficients);
    value = sol.value;
    solution["mode"] = "public";
    solution["value"] = sol.value;
    solution["lp_value"] = sol.lp_value;
    solution["gamma"] = posterior_distribution_to_json(sol.gamma);
    json prices = json::array();
    for (const auto& pv : sol.price_map) prices.push_back(pv.prices);
    solution["prices"] = prices;
    solution["scheme"] = sp::scheme_to_json(sp::recover_scheme_public(inst, sol));
  } else if (args.mode == "private") {
    sp::PrivateSolution sol = sp::solve_private(inst, q, b, delta, beta, K, args.seed);
    value = sol.value;
    for (std::size_t i = 0; i < sol.trace.size(); ++i) {
      const auto& s = sol.trace[i];
      std::cerr << "trace solve-private step=" << i + 1 << " rho=" << s.rho
                << " result=" << (s.feasible ? "feasible" : "infeasible")
                << " iterations=" << s.iterations << " y_cuts=" << s.y_cuts
                << " logvol_drop=" << s.log_volume_drop << "\n";
    }
    solution["mode"] = "private";
    solution["value"] = sol.value;
    solution["lp_value"] = sol.lp_value;
    solution["rho_bracket"] = {sol.rho_infeasible, sol.rho_feasible};
    json gamma = json::array(), t = json::array(), y = json::array();
    for (double g : sol.vars.gamma) gamma.push_back(g);
    for (double tv : sol.vars.t) t.push_back(tv);
    for (const auto& [id, v] : sol.y)
      y.push_back({{"theta", id.theta}, {"xi", id.xi}, {"p", id.p}, {"value", v}});
    solution["gamma"] = gamma;
    solution["t"] = t;
    solution["y"] = y;
    solution["scheme"] = sp::scheme_to_json(sol.scheme);
  } else {
    std::cerr << "error: unknown mode " << args.mode << "\n";
    return kExitBadInput;
  }
  auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - started)
                     .count();

  if (!args.out_path.empty()) sp::save_json_file(args.out_path, solution);

  double baseline_none = sp::no_signaling_value(inst);
  double baseline_full = sp::full_revelation_value(inst);
  if (args.format == "json") {
    json row = {{"instance", args.instance_path}, {"mode", args.mode},
                {"q", q},                          {"b", b},
                {"K", K},                          {"seed", args.seed},
                {"value", value},                  {"no_signaling", baseline_none},
                {"full_revelation", baseline_full}, {"runtime_ms", elapsed}};
    std::cout << row.dump() << "\n";
  } else {
    std::cout << "instance,mode,q,b,K,seed,value,no_signaling,full_revelation,runtime_ms\n";
    std::cout << args.instance_path << "," << args.mode << "," << q << "," << b << "," << K
              << "," << args.seed << "," << json(value).dump() << ","
              << json(baseline_none).dump() << "," << json(baseline_full).dump() << ","
              << elapsed << "\n";
  }
  return 0;
}

int run_baseline(const std::string& instance_path, int q, int b) {
  sp::AuctionInstance inst = sp::instance_from_json(sp::load_json_file(instance_path));
  double none = sp::no_signaling_value(inst);
  double full = sp::full_revelation_value(inst);
  sp::PublicBruteResult brute = sp::brute_force_public(inst, q, b);
  std::cout << "no_signaling " << json(none).dump() << "\n";
  std::cout << "full_revelation " << json(full).dump() << "\n";
  std::cout << "public_q" << q << "_grid_b" << b << " " << json(brute.grid_value).dump()
            << "\n";
  std::cout << "public_q" << q << "_unrestricted " << json(brute.unrestricted_value).dump()
            << "\n";
  return 0;
}

int run_eval(const std::string& instance_path, const std::string& scheme_path) {
  sp::AuctionInstance inst = sp::instance_from_json(sp::load_json_file(instance_path));
  sp::SignalingScheme scheme = sp::scheme_from_json(sp::load_json_file(scheme_path));
  scheme.validate(inst);
  std::cout << json(sp::scheme_value(inst, scheme)).dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"signaling and pricing solvers for sequential posted-price auctions"};
  app.require_subcommand(1);

  SolveArgs solve_args;
  CLI::App* solve = app.add_subcommand("solve", "compute a signaling scheme and prices");
  solve->add_option("--instance", solve_args.instance_path, "instance JSON")->required();
  solve->add_option("--mode", solve_args.mode, "public|private")
      ->check(CLI::IsMember({"public", "private"}));
  solve->add_option("--lambda", solve_args.lambda, "target additive error");
  solve->add_option("--q", solve_args.q, "posterior lattice grain");
  solve->add_option("--b", solve_args.b, "price grid steps");
  solve->add_option("--K", solve_args.K, "samples per estimate");
  solve->add_option("--delta", solve_args.delta, "separation oracle tolerance");
  solve->add_option("--beta", solve_args.beta, "bisection bracket width");
  solve->add_option("--seed", solve_args.seed, "rng seed");
  solve->add_flag("--exact-coefficients", solve_args.exact_coefficients,
                  "skip sampling, use exact per-posterior optima");
  solve->add_option("--out", solve_args.out_path, "solution JSON path");
  solve->add_option("--format", solve_args.format, "summary format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string baseline_instance;
  int baseline_q = 2, baseline_b = 10;
  CLI::App* baseline = app.add_subcommand("baseline", "print reference values");
  baseline->add_option("--instance", baseline_instance)->required();
  baseline->add_option("--q", baseline_q);
  baseline->add_option("--b", baseline_b);

  CLI::App* gen = app.add_subcommand("gen", "generate instances");
  gen->require_subcommand(1);
  std::uint64_t gen_seed = 0;
  int gen_n = 2, gen_d = 2, gen_support = 2;
  std::string gen_out;
  CLI::App* gen_random = gen->add_subcommand("random", "random instance");
  gen_random->add_option("--seed", gen_seed);
  gen_random->add_option("--n", gen_n);
  gen_random->add_option("--d", gen_d);
  gen_random->add_option("--support", gen_support);
  gen_random->add_option("--out", gen_out)->required();

  std::string gen_graph;
  std::string hard_out;
  int hard_k = 2, hard_l = 5;
  double hard_eps = 0.5;
  CLI::App* gen_hard = gen->add_subcommand("hardness", "graph gadget instance");
  gen_hard->add_option("--graph", gen_graph, "edge-list JSON")->required();
  gen_hard->add_option("--k", hard_k);
  gen_hard->add_option("--l", hard_l);
  gen_hard->add_option("--eps", hard_eps);
  gen_hard->add_option("--out", hard_out)->required();

  std::string eval_instance, eval_scheme;
  CLI::App* eval = app.add_subcommand("eval", "expected revenue of a scheme");
  eval->add_option("--instance", eval_instance)->required();
  eval->add_option("--scheme", eval_scheme)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) return run_solve(solve_args);
    if (baseline->parsed()) return run_baseline(baseline_instance, baseline_q, baseline_b);
    if (gen->parsed()) {
      if (gen_random->parsed()) {
        sp::AuctionInstance inst =
            sp::gen_random_instance(gen_seed, gen_n, gen_d, gen_support);
        sp::save_json_file(gen_out, sp::instance_to_json(inst));
        return 0;
      }
      sp::Graph graph;
      json j = sp::load_json_file(gen_graph);
      try {
        graph.m = j.at("m").get<int>();
        for (const auto& e : j.at("edges"))
          graph.edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
      } catch (const json::exception& e) {
        std::cerr << "error: bad graph json: " << e.what() << "\n";
        return kExitBadInput;
      }
      sp::AuctionInstance inst = sp::gen_hardness_instance(graph, hard_k, hard_l, hard_eps);
      sp::save_json_file(hard_out, sp::instance_to_json(inst));
      return 0;
    }
    if (eval->parsed()) return run_eval(eval_instance, eval_scheme);
  } catch (const sp::TooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const sp::NumericalFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return 0;
}
