#include "drofa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "drofa/errors.hpp"

namespace drofa {
namespace {

// fix the sum to exactly 1 by charging the residual to the largest entry
void renormalize_exact(Vec& w) {
  double s = compensated_sum(w);
  std::size_t imax = 0;
  for (std::size_t i = 1; i < w.size(); ++i)
    if (w[i] > w[imax]) imax = i;
  w[imax] += 1.0 - s;
}

}  // namespace

MixtureWeights project_simplex(const Vec& v) {
  if (v.empty()) throw EmptyVector();
  if (!all_finite(v)) throw NonFiniteInput();
  const std::size_t n = v.size();
  if (n == 1) return MixtureWeights{Vec{1.0}};

  Vec u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0, theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < n; ++j) {
    cum += u[j];
    double t = (cum - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) {
      rho = j + 1;
      theta = t;
    }
  }
  (void)rho;
  Vec w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::max(v[i] - theta, 0.0);
  renormalize_exact(w);
  return MixtureWeights{w};
}

ModelParams project_primal(const Vec& w, const PrimalDomainSpec& spec) {
  if (!all_finite(w)) throw NonFiniteInput();
  if (spec.kind == PrimalDomainKind::unconstrained) return ModelParams{w};
  double nrm = norm2(w);
  if (nrm <= spec.radius) return ModelParams{w};
  return ModelParams{scaled(w, spec.radius / nrm)};
}

namespace {

// invert h(u) = u + beta*log(u) on (0, inf); strictly increasing
double inv_u_plus_beta_log(double beta, double r) {
  double u = std::max(r, 1e-8);
  double lo = 1e-300, hi = std::max(1.0, r) + 1.0;
  for (int it = 0; it < 200; ++it) {
    double f = u + beta * std::log(u) - r;
    if (f > 0.0)
      hi = u;
    else
      lo = u;
    double step = f / (1.0 + beta / u);
    double un = u - step;
    if (!(un > lo && un < hi)) un = 0.5 * (lo + hi);
    if (std::abs(un - u) <= 1e-16 * std::max(1.0, std::abs(u))) {
      u = un;
      break;
    }
    u = un;
  }
  return std::max(u, 1e-300);
}

MixtureWeights prox_kl(const ProxProblem& p) {
  const std::size_t n = p.anchor.size();
  const double beta = p.step * p.scale * p.regularizer.strength;
  const double logN = std::log(static_cast<double>(n));
  Vec c(n);
  for (std::size_t i = 0; i < n; ++i)
    c[i] = p.anchor[i] - beta * (1.0 + logN);

  auto sum_at = [&](double t, Vec* out) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double u = inv_u_plus_beta_log(beta, c[i] - t);
      if (out) (*out)[i] = u;
      s += u;
    }
    return s;
  };

  // bracket the multiplier, then safeguarded Newton on sum(t) = 1
  double t_lo = -1.0, t_hi = 1.0;
  for (int it = 0; it < 200 && sum_at(t_lo, nullptr) < 1.0; ++it)
    t_lo = 2.0 * t_lo - 1.0;
  for (int it = 0; it < 200 && sum_at(t_hi, nullptr) > 1.0; ++it)
    t_hi = 2.0 * t_hi + 1.0;

  Vec u(n);
  double t = 0.5 * (t_lo + t_hi);
  bool done = false;
  for (int it = 0; it < 200; ++it) {
    double s = sum_at(t, &u);
    double f = s - 1.0;
    if (std::abs(f) < 1e-14) {
      done = true;
      break;
    }
    if (f > 0.0)
      t_lo = t;
    else
      t_hi = t;
    double deriv = 0.0;  // d sum / dt = -sum u/(u+beta)
    for (std::size_t i = 0; i < n; ++i) deriv -= u[i] / (u[i] + beta);
    double tn = t - f / deriv;
    if (!(tn > t_lo && tn < t_hi)) tn = 0.5 * (t_lo + t_hi);
    t = tn;
  }
  if (!done) {
    double resid = std::abs(sum_at(t, &u) - 1.0);
    if (resid > 1e-10) throw SolverNoConvergence(resid);
  }
  sum_at(t, &u);
  renormalize_exact(u);
  return MixtureWeights{u};
}

}  // namespace

MixtureWeights prox_simplex(const ProxProblem& p) {
  if (p.anchor.empty()) throw EmptyVector();
  if (!all_finite(p.anchor)) throw NonFiniteInput();
  if (!(p.step > 0.0) || !(p.scale > 0.0))
    throw BadConfig("prox step and scale must be positive");

  switch (p.regularizer.kind) {
    case RegularizerKind::none:
      return project_simplex(p.anchor);
    case RegularizerKind::quadratic_to_uniform: {
      // argmax tau*(-(mu/2)||u - unif||^2) - (1/(2 gamma))||a - u||^2
      // is the Euclidean projection of the unconstrained optimum
      const double mu = p.regularizer.strength;
      const double gamma = p.step, tau = p.scale;
      const double denom = 1.0 / gamma + tau * mu;
      const double uni = 1.0 / static_cast<double>(p.anchor.size());
      Vec target(p.anchor.size());
      for (std::size_t i = 0; i < target.size(); ++i)
        target[i] = (p.anchor[i] / gamma + tau * mu * uni) / denom;
      return project_simplex(target);
    }
    case RegularizerKind::kl_to_uniform:
      return prox_kl(p);
  }
  throw BadConfig("unknown regularizer kind");
}

}  // namespace drofa
