#ifndef DROFA_METRICS_HPP
#define DROFA_METRICS_HPP

#include <cstddef>

#include "drofa/domain.hpp"
#include "drofa/objectives.hpp"
#include "drofa/vec.hpp"

namespace drofa {

struct MetricRecord {
  long stage = 0;
  long iteration = 0;
  long comm_rounds = 0;
  double avg_loss = 0.0;
  double worst_loss = 0.0;
  std::size_t worst_client = 0;
  double worst_accuracy = 0.0;  // classification only, else NaN
  double avg_accuracy = 0.0;
  double fairness_std = 0.0;
  double gamma_estimate = 0.0;  // pointwise gradient dissimilarity
};

struct PhiLinear {
  double value;
  std::size_t argmax_client;  // ties: smallest id
};

// max over clients of the FULL-batch local loss
PhiLinear phi_linear(const Federation& fed, const Vec& w);

struct PhiRegularized {
  double value;
  MixtureWeights lambda_star;
};

// max over the simplex of sum lambda_i f_i(w) + g(lambda), solved by
// proximal fixed-point iteration to KKT residual < 1e-10
PhiRegularized phi_regularized(const Federation& fed, const Vec& w,
                               const RegularizerSpec& g);

// pointwise surrogate of the gradient dissimilarity:
// max_{i,j} || grad f_i(w) - grad f_j(w) ||^2
double gradient_dissimilarity_at(const Federation& fed, const Vec& w);

// max_lambda F(w_hat, lambda) - min_w F(w, lambda_hat); the min term is
// an inner projected-gradient upper bound, so the reported gap upper
// bounds the true gap
double primal_dual_gap(const Federation& fed, const Vec& w_hat,
                       const MixtureWeights& lambda_hat,
                       const RegularizerSpec& g,
                       const PrimalDomainSpec& domain, long inner_budget);

struct ClassificationMetrics {
  Vec per_client_accuracy;
  double worst_accuracy;
  std::size_t worst_client;
  double avg_accuracy;
  double fairness_std;  // population std over clients
};

ClassificationMetrics classification_metrics(const Federation& fed,
                                             const Vec& w);

struct GridSpec {
  double lo = -1.0;
  double hi = 1.0;
  std::size_t points = 101;  // per axis
};

// ||grad Phi_{1/2L}(w)|| = 2L * dist(w, argmin_u Phi(u) + L||u - w||^2),
// argmin taken over a dense grid; d <= 2 only
double moreau_grad_norm_grid(const Federation& fed, const Vec& w, double L,
                             const GridSpec& grid);

// smoothness constant L of the local losses (exact for quadratics, a
// spectral bound for the classification kinds)
double estimate_smoothness(const Federation& fed);

// strong convexity mu (0 when the objective kind is not strongly convex)
double estimate_strong_convexity(const Federation& fed);

}  // namespace drofa

#endif
