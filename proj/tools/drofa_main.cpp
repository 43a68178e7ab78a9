#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "drofa/errors.hpp"
#include "drofa/harness.hpp"
#include "drofa/oracle.hpp"
#include "drofa/rng.hpp"

namespace {

using namespace drofa;

void apply_overrides(ExperimentConfig& cfg, const std::string& seed_list,
                     const std::string& out, long eval_every,
                     const std::string& preset) {
  if (!seed_list.empty()) {
    cfg.seeds.clear();
    std::stringstream ss(seed_list);
    std::string tok;
    while (std::getline(ss, tok, ','))
      cfg.seeds.push_back(std::stoull(tok));
  }
  if (!out.empty()) cfg.output_dir = out;
  if (eval_every > 0) cfg.eval_every = eval_every;
  if (!preset.empty()) {
    if (preset == "none")
      cfg.preset = Preset::none;
    else if (preset == "theorem1")
      cfg.preset = Preset::theorem1;
    else if (preset == "theorem2_appendix")
      cfg.preset = Preset::theorem2_appendix;
    else
      throw SchemaError("preset", "unknown value '" + preset + "'");
  }
}

int oracle_check() {
  // cross-checks the fast geometry paths against the brute-force oracles
  RngStream rng(1234, StreamPurpose::data_gen, 0);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::size_t n = 1 + rng.next_below(16);
    Vec v(n);
    for (double& x : v) x = 4.0 * rng.next_double() - 2.0;
    Vec fast = project_simplex(v).weights;
    Vec slow = oracle::brute_force_simplex_projection(v);
    for (std::size_t i = 0; i < n; ++i)
      worst = std::max(worst, std::abs(fast[i] - slow[i]));
  }
  std::printf("simplex projection vs brute force: max |diff| = %.3e  %s\n",
              worst, worst < 1e-9 ? "ok" : "FAIL");

  double worst_prox = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng.next_below(2);
    Vec anchor(n);
    for (double& x : anchor) x = 2.0 * rng.next_double() - 0.5;
    for (auto g : {RegularizerSpec::quadratic(1.0), RegularizerSpec::kl(1.0)}) {
      double gamma = 0.1, tau = 2.0;
      MixtureWeights fast = prox_simplex(ProxProblem{anchor, gamma, tau, g});
      // KKT residual of the prox objective at the returned point
      Vec grad(n);
      for (std::size_t i = 0; i < n; ++i) grad[i] = (anchor[i] - fast[i]) / gamma;
      add_inplace(grad, scaled(eval_regularizer(g, fast).grad, tau));
      Vec probe = fast.weights;
      add_inplace(probe, grad);
      double res = dist(project_simplex(probe).weights, fast.weights);
      worst_prox = std::max(worst_prox, res);
    }
  }
  std::printf("prox KKT residual over random problems: max = %.3e  %s\n",
              worst_prox, worst_prox < 1e-8 ? "ok" : "FAIL");

  // saddle oracle self-consistency on a fixed asymmetric instance
  oracle::SaddleProblem sp;
  sp.centers = {{1.0, 0.0}, {-0.5, 0.8}, {0.2, -1.3}};
  sp.curvature = 1.0;
  sp.regularizer = RegularizerSpec::quadratic(0.5);
  auto sol = oracle::saddle_point_oracle(sp);
  std::printf("saddle oracle residuals: w %.3e, lambda %.3e  %s\n",
              sol.residual_w, sol.residual_lambda,
              sol.residual_w < 1e-12 && sol.residual_lambda < 1e-12 ? "ok"
                                                                    : "FAIL");
  bool ok = worst < 1e-9 && worst_prox < 1e-8 && sol.residual_w < 1e-12 &&
            sol.residual_lambda < 1e-12;
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"drofa: distributionally robust federated averaging simulator"};
  app.require_subcommand(1);

  std::string config_path, out, seed_list, preset;
  long eval_every = 0;

  auto* run = app.add_subcommand("run", "run one experiment config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--seed", seed_list, "comma-separated seed override");
  run->add_option("--out", out, "output directory override");
  run->add_option("--eval-every", eval_every, "stages between evaluations");
  run->add_option("--preset", preset, "theorem1|theorem2_appendix|none");

  std::vector<std::string> cmp_paths;
  auto* cmp = app.add_subcommand("compare", "paired comparison of configs");
  cmp->add_option("configs", cmp_paths, "JSON config files")->required();
  cmp->add_option("--out", out, "output directory");

  std::string sweep_param = "tau", sweep_values;
  auto* sweep = app.add_subcommand("sweep", "sweep one parameter");
  sweep->add_option("config", config_path, "JSON config file")->required();
  sweep->add_option("--param", sweep_param, "parameter to sweep (tau|eta|gamma|m)");
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();
  sweep->add_option("--out", out, "output directory");

  app.add_subcommand("oracle-check", "run the oracle cross-check suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("run")) {
      ExperimentConfig cfg = load_config(config_path);
      apply_overrides(cfg, seed_list, out, eval_every, preset);
      ResultsBundle rb = run_experiment(cfg);
      const auto& fr = rb.per_seed.front().final_record;
      std::printf("wrote %s (%zu seeds)\n", rb.config.output_dir.c_str(),
                  rb.per_seed.size());
      std::printf("seed %llu final: avg_loss %s worst_loss %s\n",
                  static_cast<unsigned long long>(rb.per_seed.front().seed),
                  format_double(fr.avg_loss).c_str(),
                  format_double(fr.worst_loss).c_str());
    } else if (app.got_subcommand("compare")) {
      std::vector<ExperimentConfig> cfgs;
      for (const auto& p : cmp_paths) cfgs.push_back(load_config(p));
      ComparisonResult cr = compare(cfgs, out.empty() ? "compare_out" : out);
      std::printf("compared %zu configs, %zu crossing rows\n",
                  cr.bundles.size(), cr.crossings.size());
    } else if (app.got_subcommand("sweep")) {
      ExperimentConfig base = load_config(config_path);
      std::vector<ExperimentConfig> cfgs;
      std::stringstream ss(sweep_values);
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        ExperimentConfig c = base;
        if (sweep_param == "tau")
          c.algo.tau = std::stol(tok);
        else if (sweep_param == "eta")
          c.algo.eta = std::stod(tok);
        else if (sweep_param == "gamma")
          c.algo.gamma = std::stod(tok);
        else if (sweep_param == "m")
          c.algo.m = std::stoul(tok);
        else
          throw BadConfig("unsupported sweep parameter " + sweep_param);
        c.name = base.name + "_" + sweep_param + "=" + tok;
        cfgs.push_back(std::move(c));
      }
      ComparisonResult cr = compare(cfgs, out.empty() ? "sweep_out" : out);
      std::printf("swept %zu values of %s\n", cr.bundles.size(),
                  sweep_param.c_str());
    } else if (app.got_subcommand("oracle-check")) {
      return oracle_check();
    }
  } catch (const drofa::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
