#include "drofa/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "drofa/errors.hpp"
#include "drofa/geometry.hpp"

namespace drofa {

PhiLinear phi_linear(const Federation& fed, const Vec& w) {
  const std::size_t N = fed.n_clients();
  Vec losses(N);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(N); ++i)
    losses[i] = eval_loss(fed, static_cast<std::size_t>(i), w);
  std::size_t best = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (losses[i] > losses[best]) best = i;
  return PhiLinear{losses[best], best};
}

PhiRegularized phi_regularized(const Federation& fed, const Vec& w,
                               const RegularizerSpec& g) {
  const std::size_t N = fed.n_clients();
  if (g.kind == RegularizerKind::none) {
    PhiLinear lin = phi_linear(fed, w);
    Vec vertex(N, 0.0);
    vertex[lin.argmax_client] = 1.0;
    return PhiRegularized{lin.value, MixtureWeights{vertex}};
  }

  Vec losses(N);
  for (std::size_t i = 0; i < N; ++i) losses[i] = eval_loss(fed, i, w);

  // proximal fixed-point iteration on the concave dual objective
  double step = g.strength > 0.0 ? 1.0 / g.strength : 1.0;
  MixtureWeights lambda = uniform_mixture(N);
  double resid = 0.0;
  bool converged = false;
  for (int it = 0; it < 10000; ++it) {
    Vec anchor = lambda.weights;
    axpy(step, losses, anchor);
    MixtureWeights next =
        prox_simplex(ProxProblem{std::move(anchor), step, 1.0, g});

    // KKT residual: distance moved by one unit-step projected ascent
    Vec grad = losses;
    add_inplace(grad, eval_regularizer(g, next).grad);
    Vec probe = next.weights;
    add_inplace(probe, grad);
    resid = dist(project_simplex(probe).weights, next.weights);
    lambda = std::move(next);
    if (resid < 1e-10) {
      converged = true;
      break;
    }
  }
  if (!converged) throw SolverNoConvergence(resid);
  double value = dot(losses, lambda.weights) +
                 eval_regularizer(g, lambda).value;
  return PhiRegularized{value, lambda};
}

double gradient_dissimilarity_at(const Federation& fed, const Vec& w) {
  const std::size_t N = fed.n_clients();
  std::vector<Vec> grads(N);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(N); ++i)
    grads[i] = eval_grad(fed, static_cast<std::size_t>(i), w);
  double worst = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      double d = dist2(grads[i], grads[j]);
      worst = std::max(worst, d);
    }
  return worst;
}

double primal_dual_gap(const Federation& fed, const Vec& w_hat,
                       const MixtureWeights& lambda_hat,
                       const RegularizerSpec& g,
                       const PrimalDomainSpec& domain, long inner_budget) {
  double max_term = phi_regularized(fed, w_hat, g).value;

  // inner minimization of F(., lambda_hat) by projected gradient descent
  const double L = estimate_smoothness(fed);
  const double eta = 1.0 / L;
  const std::size_t N = fed.n_clients();
  Vec w = w_hat;
  double grad_norm = 0.0;
  for (long it = 0; it < inner_budget; ++it) {
    Vec grad(w.size(), 0.0);
    for (std::size_t i = 0; i < N; ++i)
      if (lambda_hat[i] > 0.0) axpy(lambda_hat[i], eval_grad(fed, i, w), grad);
    grad_norm = norm2(grad);
    if (domain.kind == PrimalDomainKind::unconstrained && grad_norm < 1e-12)
      break;
    axpy(-eta, grad, w);
    w = project_primal(w, domain).values;
  }
  if (estimate_strong_convexity(fed) > 0.0 &&
      domain.kind == PrimalDomainKind::unconstrained && grad_norm > 1e-8)
    throw SolverNoConvergence(grad_norm);

  double min_term = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    if (lambda_hat[i] > 0.0) min_term += lambda_hat[i] * eval_loss(fed, i, w);
  min_term += eval_regularizer(g, lambda_hat).value;
  return max_term - min_term;
}

ClassificationMetrics classification_metrics(const Federation& fed,
                                             const Vec& w) {
  if (fed.objective.kind == ObjectiveKind::quadratic)
    throw WrongObjectiveKind("classification metrics on quadratic objective");
  const std::size_t N = fed.n_clients();
  ClassificationMetrics out;
  out.per_client_accuracy.resize(N);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < static_cast<long>(N); ++i) {
    const ClientShard& sh = fed.shards[i];
    std::size_t correct = 0;
    for (std::size_t k = 0; k < sh.size(); ++k) {
      int pred = predict_class(fed.objective, w, sh.features[k]);
      if (pred == static_cast<int>(sh.labels[k])) ++correct;
    }
    out.per_client_accuracy[i] =
        static_cast<double>(correct) / static_cast<double>(sh.size());
  }
  out.worst_client = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sum += out.per_client_accuracy[i];
    if (out.per_client_accuracy[i] < out.per_client_accuracy[out.worst_client])
      out.worst_client = i;
  }
  out.worst_accuracy = out.per_client_accuracy[out.worst_client];
  out.avg_accuracy = sum / static_cast<double>(N);
  double var = 0.0;
  for (double a : out.per_client_accuracy) {
    double d = a - out.avg_accuracy;
    var += d * d;
  }
  out.fairness_std = std::sqrt(var / static_cast<double>(N));
  return out;
}

double moreau_grad_norm_grid(const Federation& fed, const Vec& w, double L,
                             const GridSpec& grid) {
  const std::size_t d = w.size();
  if (d > 2) throw BadConfig("moreau grid diagnostic supports d <= 2 only");
  if (grid.points < 3 || !(grid.hi > grid.lo)) throw BadConfig("bad grid spec");

  const std::size_t n = grid.points;
  const double h = (grid.hi - grid.lo) / static_cast<double>(n - 1);
  auto coord = [&](std::size_t k) { return grid.lo + h * static_cast<double>(k); };

  double best = 1e300;
  Vec best_u(d, 0.0);
  bool best_on_boundary = false;
  Vec u(d, 0.0);
  const std::size_t rows = d == 2 ? n : 1;
  for (std::size_t a = 0; a < rows; ++a) {
    if (d == 2) u[1] = coord(a);
    for (std::size_t b = 0; b < n; ++b) {
      u[0] = coord(b);
      double pen = 0.0;
      for (std::size_t k = 0; k < d; ++k) {
        double diff = u[k] - w[k];
        pen += diff * diff;
      }
      double val = phi_linear(fed, u).value + L * pen;
      if (val < best) {
        best = val;
        best_u = u;
        best_on_boundary = b == 0 || b == n - 1 ||
                           (d == 2 && (a == 0 || a == rows - 1));
      }
    }
  }
  if (best_on_boundary) throw GridTooCoarse();
  return 2.0 * L * dist(w, best_u);
}

namespace {

// largest eigenvalue of (1/n) X^T X by power iteration
double gram_spectral_bound(const ClientShard& sh) {
  const std::size_t d = sh.feature_dim();
  Vec v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  double eig = 0.0;
  for (int it = 0; it < 300; ++it) {
    Vec av(d, 0.0);
    for (const Vec& x : sh.features) axpy(dot(x, v), x, av);
    scale_inplace(av, 1.0 / static_cast<double>(sh.size()));
    double nrm = norm2(av);
    if (nrm == 0.0) return 0.0;
    double next = nrm;
    scale_inplace(av, 1.0 / nrm);
    v = av;
    if (std::abs(next - eig) < 1e-12 * std::max(1.0, next)) {
      eig = next;
      break;
    }
    eig = next;
  }
  return eig;
}

}  // namespace

double estimate_smoothness(const Federation& fed) {
  const ObjectiveSpec& obj = fed.objective;
  switch (obj.kind) {
    case ObjectiveKind::quadratic:
      return obj.curvature + obj.l2_term;
    case ObjectiveKind::logistic_regression: {
      double worst = 0.0;
      for (const auto& sh : fed.shards)
        worst = std::max(worst, gram_spectral_bound(sh));
      double factor = obj.n_classes <= 2 ? 0.25 : 0.5;
      return factor * worst + obj.l2_term;
    }
    case ObjectiveKind::sigmoid_nonconvex: {
      double worst = 0.0;
      for (const auto& sh : fed.shards)
        worst = std::max(worst, gram_spectral_bound(sh));
      // |d^2/dz^2 (sigmoid(z) - y)^2| <= 1/2 for y in [0, 1]
      return 0.5 * worst + obj.l2_term;
    }
  }
  return 1.0;
}

double estimate_strong_convexity(const Federation& fed) {
  if (fed.objective.kind == ObjectiveKind::quadratic)
    return fed.objective.curvature + fed.objective.l2_term;
  return fed.objective.l2_term;
}

}  // namespace drofa
