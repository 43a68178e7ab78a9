#ifndef DROFA_ALGORITHMS_HPP
#define DROFA_ALGORITHMS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "drofa/domain.hpp"
#include "drofa/geometry.hpp"
#include "drofa/objectives.hpp"
#include "drofa/rng.hpp"

namespace drofa {

enum class Algorithm { drfa, drfa_prox, drfa_ga, fedavg };
enum class OutputMode { averaged, last_iterate, tail_averaged };
enum class GaGradAt { stage_start, stage_end };

struct AlgoConfig {
  Algorithm algorithm = Algorithm::drfa;
  long T = 0;            // total iterations, divisible by tau
  long tau = 1;          // synchronization gap
  std::size_t m = 1;     // sampled clients per stage
  double eta = 0.1;      // primal step
  double gamma = 0.01;   // dual step
  std::size_t batch_primal = 1;  // 0 = full batch
  std::size_t batch_probe = 1;   // 0 = full batch
  PrimalDomainSpec primal_domain;
  RegularizerSpec regularizer;
  OutputMode output_mode = OutputMode::averaged;
  GaGradAt ga_grad_at = GaGradAt::stage_start;
  Vec w0;       // empty: zeros
  Vec lambda0;  // empty: uniform
  bool parallel_clients = true;  // OpenMP client loop; serial reference if false

  long stages() const { return T / tau; }
};

void validate_config(const AlgoConfig& cfg, const Federation& fed);

struct StageTranscript {
  long stage = 0;
  std::vector<std::size_t> sampled_devices;  // D^(s), draw order
  std::vector<std::size_t> probe_devices;    // U, draw order (empty if unused)
  std::size_t snapshot_step = 0;             // k' in 1..tau (0 if unused)
  int comm_exchanges = 0;
  MixtureWeights lambda_after;
};

struct RunResult {
  ModelParams w_hat;          // solution per output_mode
  MixtureWeights lambda_hat;  // stage average of lambda
  ModelParams w_last;
  MixtureWeights lambda_last;
  std::vector<StageTranscript> transcripts;
  AlgoConfig config_echo;
  std::uint64_t seed = 0;

  long total_comm_exchanges() const;
};

// Called after every stage with the stage transcript and the new global
// average model; used by the harness for metric evaluation.
using StageObserver =
    std::function<void(const StageTranscript&, const Vec& w_bar)>;

struct LocalWindowResult {
  Vec w_end;
  Vec w_snapshot;   // iterate after k_snap local steps
  Vec iterate_sum;  // sum of the tau post-update iterates
};

// tau projected-SGD steps on client i starting from w_start. The rng
// stream must be keyed by (seed, minibatch, stage, client) so execution
// order never matters. batch == 0 means full-batch gradients.
LocalWindowResult run_local_window(const Federation& fed, std::size_t client,
                                   const Vec& w_start, double eta, long tau,
                                   std::size_t k_snap,
                                   const PrimalDomainSpec& domain,
                                   std::size_t batch, RngStream rng);

// Loss-probe vector v: v_i += (N/m) f_i(w_snapshot; xi_i) for each draw
// i in probe_ids (duplicates accumulate), zero elsewhere.
Vec build_probe_vector(const Federation& fed,
                       const std::vector<std::size_t>& probe_ids,
                       const Vec& w_snapshot, std::size_t batch_probe,
                       std::uint64_t seed, long stage);

MixtureWeights drfa_lambda_step(const MixtureWeights& lambda, const Vec& v,
                                long tau, double gamma);

MixtureWeights drfa_prox_lambda_step(const MixtureWeights& lambda, const Vec& v,
                                     long tau, double gamma,
                                     const RegularizerSpec& g);

// one projected full-gradient ascent step on lambda
MixtureWeights drfa_ga_lambda_step(const MixtureWeights& lambda,
                                   const Vec& full_losses, double gamma,
                                   const RegularizerSpec& g);

RunResult run_drfa(const Federation& fed, const AlgoConfig& cfg,
                   std::uint64_t seed, const StageObserver& observer = {});
RunResult run_drfa_prox(const Federation& fed, const AlgoConfig& cfg,
                        std::uint64_t seed, const StageObserver& observer = {});
RunResult run_drfa_ga(const Federation& fed, const AlgoConfig& cfg,
                      std::uint64_t seed, const StageObserver& observer = {});
RunResult run_fedavg(const Federation& fed, const AlgoConfig& cfg,
                     std::uint64_t seed, const StageObserver& observer = {});

// dispatch on cfg.algorithm
RunResult run_algorithm(const Federation& fed, const AlgoConfig& cfg,
                        std::uint64_t seed, const StageObserver& observer = {});

}  // namespace drofa

#endif
