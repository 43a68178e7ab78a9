#include "drofa/algorithms.hpp"

#include <cmath>
#include <exception>

#include "drofa/errors.hpp"
#include "drofa/sampling.hpp"

namespace drofa {

void validate_config(const AlgoConfig& cfg, const Federation& fed) {
  if (cfg.T < 1) throw BadConfig("T must be >= 1");
  if (cfg.tau < 1) throw BadConfig("tau must be >= 1");
  if (cfg.T % cfg.tau != 0) throw BadConfig("T must be divisible by tau");
  if (cfg.m < 1) throw BadConfig("m must be >= 1");
  if (!(cfg.eta >= 0.0) || !std::isfinite(cfg.eta))
    throw BadConfig("eta must be finite and >= 0");
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma))
    throw BadConfig("gamma must be finite and > 0");
  if (cfg.algorithm == Algorithm::drfa &&
      cfg.regularizer.kind != RegularizerKind::none)
    throw BadConfig("drfa supports regularizer none only; use drfa_prox");
  if (cfg.algorithm == Algorithm::drfa_ga && cfg.m > fed.n_clients())
    throw BadConfig("drfa_ga requires m <= N");
  if (!cfg.w0.empty() && cfg.w0.size() != fed.model_dim())
    throw BadConfig("w0 dimension mismatch");
  if (!cfg.lambda0.empty() && cfg.lambda0.size() != fed.n_clients())
    throw BadConfig("lambda0 length mismatch");
}

long RunResult::total_comm_exchanges() const {
  long s = 0;
  for (const auto& t : transcripts) s += t.comm_exchanges;
  return s;
}

LocalWindowResult run_local_window(const Federation& fed, std::size_t client,
                                   const Vec& w_start, double eta, long tau,
                                   std::size_t k_snap,
                                   const PrimalDomainSpec& domain,
                                   std::size_t batch, RngStream rng) {
  if (k_snap < 1 || static_cast<long>(k_snap) > tau)
    throw BadConfig("snapshot step out of range");
  const ClientShard& sh = fed.shards.at(client);
  LocalWindowResult out;
  out.iterate_sum.assign(w_start.size(), 0.0);
  Vec w = w_start;
  for (long k = 0; k < tau; ++k) {
    Vec g;
    if (batch == 0) {
      g = eval_grad(fed, client, w);
    } else {
      auto idx = draw_minibatch(sh, batch, rng);
      g = eval_grad(fed, client, w, idx);
    }
    axpy(-eta, g, w);
    if (!all_finite(w)) throw NonFiniteIterate(k + 1);
    w = project_primal(w, domain).values;
    add_inplace(out.iterate_sum, w);
    if (static_cast<std::size_t>(k + 1) == k_snap) out.w_snapshot = w;
  }
  out.w_end = std::move(w);
  return out;
}

Vec build_probe_vector(const Federation& fed,
                       const std::vector<std::size_t>& probe_ids,
                       const Vec& w_snapshot, std::size_t batch_probe,
                       std::uint64_t seed, long stage) {
  const std::size_t N = fed.n_clients();
  const std::size_t m = probe_ids.size();
  Vec v(N, 0.0);
  const double scale = static_cast<double>(N) / static_cast<double>(m);
  for (std::size_t i : probe_ids) {
    double f;
    if (batch_probe == 0) {
      f = eval_loss(fed, i, w_snapshot);
    } else {
      RngStream rng(seed, StreamPurpose::probe_batch,
                    static_cast<std::uint64_t>(stage), i);
      auto idx = draw_minibatch(fed.shards[i], batch_probe, rng);
      f = eval_loss(fed, i, w_snapshot, idx);
    }
    v[i] += scale * f;
  }
  if (!all_finite(v)) throw NonFiniteLoss();
  return v;
}

MixtureWeights drfa_lambda_step(const MixtureWeights& lambda, const Vec& v,
                                long tau, double gamma) {
  Vec target = lambda.weights;
  axpy(static_cast<double>(tau) * gamma, v, target);
  return project_simplex(target);
}

MixtureWeights drfa_prox_lambda_step(const MixtureWeights& lambda, const Vec& v,
                                     long tau, double gamma,
                                     const RegularizerSpec& g) {
  Vec anchor = lambda.weights;
  axpy(gamma * static_cast<double>(tau), v, anchor);
  return prox_simplex(
      ProxProblem{std::move(anchor), gamma, static_cast<double>(tau), g});
}

MixtureWeights drfa_ga_lambda_step(const MixtureWeights& lambda,
                                   const Vec& full_losses, double gamma,
                                   const RegularizerSpec& g) {
  if (full_losses.size() != lambda.size())
    throw DimensionMismatch(lambda.size(), full_losses.size());
  if (!all_finite(full_losses)) throw NonFiniteLoss();
  Vec target = lambda.weights;
  Vec grad = full_losses;
  if (g.kind != RegularizerKind::none)
    add_inplace(grad, eval_regularizer(g, lambda).grad);
  axpy(gamma, grad, target);
  return project_simplex(target);
}

namespace {

struct LoopState {
  Vec w_bar;
  MixtureWeights lambda;
  IterateAverager w_avg;
  Vec lambda_sum;
  std::vector<StageTranscript> transcripts;
};

// Runs all sampled client windows of one stage. Slot-indexed results and
// client-keyed rng streams keep the outcome independent of scheduling;
// the OpenMP path and the serial path are bit-identical.
std::vector<LocalWindowResult> run_stage_windows(
    const Federation& fed, const std::vector<std::size_t>& devices,
    const Vec& w_bar, const AlgoConfig& cfg, std::size_t k_snap,
    std::uint64_t seed, long stage) {
  const long m = static_cast<long>(devices.size());
  std::vector<LocalWindowResult> results(m);
  if (cfg.parallel_clients) {
    // exceptions may not escape the parallel region; stash and rethrow
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (long j = 0; j < m; ++j) {
      try {
        RngStream rng(seed, StreamPurpose::minibatch,
                      static_cast<std::uint64_t>(stage), devices[j]);
        results[j] =
            run_local_window(fed, devices[j], w_bar, cfg.eta, cfg.tau, k_snap,
                             cfg.primal_domain, cfg.batch_primal, rng);
      } catch (...) {
#pragma omp critical
        if (!error) error = std::current_exception();
      }
    }
    if (error) std::rethrow_exception(error);
  } else {
    for (long j = 0; j < m; ++j) {
      RngStream rng(seed, StreamPurpose::minibatch,
                    static_cast<std::uint64_t>(stage), devices[j]);
      results[j] =
          run_local_window(fed, devices[j], w_bar, cfg.eta, cfg.tau, k_snap,
                           cfg.primal_domain, cfg.batch_primal, rng);
    }
  }
  return results;
}

// fixed ascending draw order reduction
Vec mean_of(const std::vector<LocalWindowResult>& results,
            const Vec& (*field)(const LocalWindowResult&)) {
  Vec acc(field(results.front()).size(), 0.0);
  for (const auto& r : results) add_inplace(acc, field(r));
  scale_inplace(acc, 1.0 / static_cast<double>(results.size()));
  return acc;
}

RunResult run_loop(const Federation& fed, const AlgoConfig& cfg,
                   std::uint64_t seed, const StageObserver& observer) {
  validate_config(cfg, fed);
  const std::size_t N = fed.n_clients();
  const long S = cfg.stages();

  LoopState st;
  st.w_bar = cfg.w0.empty() ? Vec(fed.model_dim(), 0.0) : cfg.w0;
  st.w_bar = project_primal(st.w_bar, cfg.primal_domain).values;
  st.lambda = cfg.lambda0.empty() ? uniform_mixture(N)
                                  : validate_mixture(cfg.lambda0);
  st.lambda_sum.assign(N, 0.0);
  st.transcripts.reserve(S);

  const bool is_fedavg = cfg.algorithm == Algorithm::fedavg;
  const bool is_ga = cfg.algorithm == Algorithm::drfa_ga;
  const bool is_prox = cfg.algorithm == Algorithm::drfa_prox;
  const bool tail = cfg.output_mode == OutputMode::tail_averaged;

  for (long s = 0; s < S; ++s) {
    add_inplace(st.lambda_sum, st.lambda.weights);

    RngStream dev_rng(seed, StreamPurpose::device_select,
                      static_cast<std::uint64_t>(s));
    std::vector<std::size_t> devices =
        is_fedavg ? sample_clients_uniform(N, cfg.m, dev_rng)
                  : sample_clients_weighted(st.lambda, cfg.m, dev_rng);

    std::size_t k_snap = static_cast<std::size_t>(cfg.tau);
    if (!is_fedavg && !is_ga) {
      RngStream snap_rng(seed, StreamPurpose::snapshot,
                         static_cast<std::uint64_t>(s));
      k_snap = sample_snapshot_step(cfg.tau, snap_rng);
    }

    const Vec w_stage_start = st.w_bar;
    std::vector<LocalWindowResult> results;
    try {
      results = run_stage_windows(fed, devices, st.w_bar, cfg, k_snap, seed, s);
    } catch (const NonFiniteIterate& e) {
      throw DivergenceDetected(s, e.step);
    }

    st.w_bar = mean_of(results, [](const LocalWindowResult& r) -> const Vec& {
      return r.w_end;
    });

    // accumulate the averaged-solution numerator client-side
    const bool include_stage = !tail || (s * cfg.tau) * 2 >= cfg.T;
    if (include_stage) {
      Vec stage_sum(st.w_bar.size(), 0.0);
      for (const auto& r : results) add_inplace(stage_sum, r.iterate_sum);
      st.w_avg.push_sum(stage_sum,
                        static_cast<double>(cfg.m) *
                            static_cast<double>(cfg.tau));
    }

    StageTranscript tr;
    tr.stage = s;
    tr.sampled_devices = devices;
    tr.comm_exchanges = is_fedavg ? 1 : 2;

    if (is_ga) {
      const Vec& eval_at =
          cfg.ga_grad_at == GaGradAt::stage_start ? w_stage_start : st.w_bar;
      Vec losses(N);
      for (std::size_t i = 0; i < N; ++i) losses[i] = eval_loss(fed, i, eval_at);
      st.lambda = drfa_ga_lambda_step(st.lambda, losses, cfg.gamma,
                                      cfg.regularizer);
    } else if (!is_fedavg) {
      tr.snapshot_step = k_snap;
      Vec w_snap = mean_of(results,
                           [](const LocalWindowResult& r) -> const Vec& {
                             return r.w_snapshot;
                           });
      RngStream probe_rng(seed, StreamPurpose::uniform_select,
                          static_cast<std::uint64_t>(s));
      tr.probe_devices = sample_clients_uniform(N, cfg.m, probe_rng);
      Vec v = build_probe_vector(fed, tr.probe_devices, w_snap,
                                 cfg.batch_probe, seed, s);
      st.lambda = is_prox ? drfa_prox_lambda_step(st.lambda, v, cfg.tau,
                                                  cfg.gamma, cfg.regularizer)
                          : drfa_lambda_step(st.lambda, v, cfg.tau, cfg.gamma);
    }

    tr.lambda_after = st.lambda;
    st.transcripts.push_back(std::move(tr));
    if (observer) observer(st.transcripts.back(), st.w_bar);
  }

  RunResult out;
  out.lambda_hat = validate_mixture([&] {
    Vec lh = st.lambda_sum;
    scale_inplace(lh, 1.0 / static_cast<double>(S));
    // exact renormalization after averaging, charged to the largest entry
    double total = compensated_sum(lh);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < lh.size(); ++i)
      if (lh[i] > lh[imax]) imax = i;
    lh[imax] += 1.0 - total;
    return lh;
  }());
  out.w_hat = cfg.output_mode == OutputMode::last_iterate
                  ? ModelParams{st.w_bar}
                  : ModelParams{st.w_avg.mean()};
  out.w_last = ModelParams{st.w_bar};
  out.lambda_last = st.lambda;
  out.transcripts = std::move(st.transcripts);
  out.config_echo = cfg;
  out.seed = seed;
  return out;
}

}  // namespace

RunResult run_drfa(const Federation& fed, const AlgoConfig& cfg,
                   std::uint64_t seed, const StageObserver& observer) {
  if (cfg.algorithm != Algorithm::drfa)
    throw BadConfig("run_drfa called with a different algorithm configured");
  return run_loop(fed, cfg, seed, observer);
}

RunResult run_drfa_prox(const Federation& fed, const AlgoConfig& cfg,
                        std::uint64_t seed, const StageObserver& observer) {
  if (cfg.algorithm != Algorithm::drfa_prox)
    throw BadConfig("run_drfa_prox: wrong algorithm in config");
  return run_loop(fed, cfg, seed, observer);
}

RunResult run_drfa_ga(const Federation& fed, const AlgoConfig& cfg,
                      std::uint64_t seed, const StageObserver& observer) {
  if (cfg.algorithm != Algorithm::drfa_ga)
    throw BadConfig("run_drfa_ga: wrong algorithm in config");
  return run_loop(fed, cfg, seed, observer);
}

RunResult run_fedavg(const Federation& fed, const AlgoConfig& cfg,
                     std::uint64_t seed, const StageObserver& observer) {
  if (cfg.algorithm != Algorithm::fedavg)
    throw BadConfig("run_fedavg: wrong algorithm in config");
  return run_loop(fed, cfg, seed, observer);
}

RunResult run_algorithm(const Federation& fed, const AlgoConfig& cfg,
                        std::uint64_t seed, const StageObserver& observer) {
  return run_loop(fed, cfg, seed, observer);
}

}  // namespace drofa
