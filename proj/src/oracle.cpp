#include "drofa/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "drofa/errors.hpp"

namespace drofa {
namespace oracle {
namespace {

double sqdist(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// quadratic local loss, written out independently of the fast path
double quad_loss(const SaddleProblem& p, std::size_t i, const Vec& w) {
  double s = 0.0, n2 = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double d = w[k] - p.centers[i][k];
    s += d * d;
    n2 += w[k] * w[k];
  }
  return 0.5 * p.curvature * s + 0.5 * p.l2_term * n2;
}

double reg_value(const RegularizerSpec& g, const Vec& lambda) {
  const std::size_t n = lambda.size();
  switch (g.kind) {
    case RegularizerKind::none:
      return 0.0;
    case RegularizerKind::quadratic_to_uniform: {
      double s = 0.0;
      const double u = 1.0 / static_cast<double>(n);
      for (double x : lambda) s += (x - u) * (x - u);
      return -0.5 * g.strength * s;
    }
    case RegularizerKind::kl_to_uniform: {
      double s = 0.0;
      const double N = static_cast<double>(n);
      for (double x : lambda) {
        if (x < 0.0) return -1e300;
        if (x > 0.0) s += x * std::log(N * x);
      }
      return -g.strength * s;
    }
  }
  return 0.0;
}

// exact best response of lambda to a fixed loss vector
Vec lambda_best_response(const Vec& losses, const RegularizerSpec& g) {
  const std::size_t n = losses.size();
  switch (g.kind) {
    case RegularizerKind::none: {
      std::size_t best = 0;
      for (std::size_t i = 1; i < n; ++i)
        if (losses[i] > losses[best]) best = i;
      Vec v(n, 0.0);
      v[best] = 1.0;
      return v;
    }
    case RegularizerKind::quadratic_to_uniform: {
      Vec target(n);
      const double u = 1.0 / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i)
        target[i] = u + losses[i] / g.strength;
      return brute_force_simplex_projection(target);
    }
    case RegularizerKind::kl_to_uniform: {
      // entropic best response has the softmax closed form
      double zmax = *std::max_element(losses.begin(), losses.end());
      Vec v(n);
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        v[i] = std::exp((losses[i] - zmax) / g.strength);
        s += v[i];
      }
      for (double& x : v) x /= s;
      return v;
    }
  }
  throw BadConfig("unsupported regularizer in oracle");
}

Vec w_best_response(const SaddleProblem& p, const Vec& lambda) {
  const std::size_t d = p.centers.front().size();
  Vec w(d, 0.0);
  for (std::size_t i = 0; i < lambda.size(); ++i)
    for (std::size_t k = 0; k < d; ++k)
      w[k] += lambda[i] * p.centers[i][k];
  const double denom = p.curvature + p.l2_term;
  for (double& x : w) x *= p.curvature / denom;
  if (p.domain.kind == PrimalDomainKind::l2_ball) {
    // Hessian is a multiple of the identity, so the constrained
    // minimizer is the radial projection of the unconstrained one
    double nrm = 0.0;
    for (double x : w) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm > p.domain.radius)
      for (double& x : w) x *= p.domain.radius / nrm;
  }
  return w;
}

}  // namespace

Vec brute_force_simplex_projection(const Vec& v) {
  const std::size_t n = v.size();
  if (n == 0) throw EmptyVector();
  if (n > 16) throw BadConfig("brute-force projection limited to length 16");
  Vec best;
  double best_d = 1e300;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    double sum = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        sum += v[i];
        ++cnt;
      }
    double shift = (sum - 1.0) / static_cast<double>(cnt);
    Vec cand(n, 0.0);
    bool feasible = true;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        cand[i] = v[i] - shift;
        if (cand[i] < 0.0) {
          feasible = false;
          break;
        }
      }
    }
    if (!feasible) continue;
    double d = sqdist(cand, v);
    if (d < best_d) {
      best_d = d;
      best = std::move(cand);
    }
  }
  return best;
}

SaddlePoint saddle_point_oracle(const SaddleProblem& p) {
  if (p.centers.empty()) throw BadConfig("saddle problem needs centers");
  const std::size_t n = p.centers.size();
  const std::size_t d = p.centers.front().size();
  if (n > 8 || d > 4) throw BadConfig("saddle oracle limited to N<=8, d<=4");

  auto losses_at = [&](const Vec& w) {
    Vec l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = quad_loss(p, i, w);
    return l;
  };

  // alternating exact best response; damping escalates if plain
  // iteration cycles (fixed point is unchanged by damping)
  for (double damp : {1.0, 0.5, 0.1}) {
    Vec lambda(n, 1.0 / static_cast<double>(n));
    Vec w = w_best_response(p, lambda);
    double rw = 0.0, rl = 0.0;
    for (long it = 0; it < 100000; ++it) {
      Vec lam_br = lambda_best_response(losses_at(w), p.regularizer);
      for (std::size_t i = 0; i < n; ++i)
        lambda[i] = (1.0 - damp) * lambda[i] + damp * lam_br[i];
      Vec w_br = w_best_response(p, lambda);
      rw = std::sqrt(sqdist(w, w_br));
      w = w_br;
      rl = std::sqrt(sqdist(lambda, lambda_best_response(losses_at(w),
                                                         p.regularizer)));
      if (rw < 1e-13 && rl < 1e-13) {
        Vec l = losses_at(w);
        double phi = reg_value(p.regularizer, lambda);
        for (std::size_t i = 0; i < n; ++i) phi += lambda[i] * l[i];
        return SaddlePoint{w, lambda, phi, rw, rl};
      }
    }
    if (damp == 0.1) throw SolverNoConvergence(std::max(rw, rl));
  }
  throw SolverNoConvergence(1.0);  // unreachable
}

GridMax grid_max_over_simplex(const Vec& loss_values, const RegularizerSpec& g,
                              double resolution) {
  const std::size_t n = loss_values.size();
  if (n < 1 || n > 3) throw BadConfig("grid search limited to N <= 3");
  const long steps = static_cast<long>(std::llround(1.0 / resolution));

  auto objective = [&](const Vec& lam) {
    double v = reg_value(g, lam);
    for (std::size_t i = 0; i < n; ++i) v += lam[i] * loss_values[i];
    return v;
  };

  GridMax best{-1e300, Vec(n, 0.0)};
  if (n == 1) {
    best.lambda = {1.0};
    best.value = objective(best.lambda);
    return best;
  }
  Vec lam(n, 0.0);
  for (long a = 0; a <= steps; ++a) {
    lam[0] = static_cast<double>(a) / static_cast<double>(steps);
    if (n == 2) {
      lam[1] = 1.0 - lam[0];
      double v = objective(lam);
      if (v > best.value) {
        best.value = v;
        best.lambda = lam;
      }
    } else {
      for (long b = 0; a + b <= steps; ++b) {
        lam[1] = static_cast<double>(b) / static_cast<double>(steps);
        lam[2] = 1.0 - lam[0] - lam[1];
        if (lam[2] < 0.0) lam[2] = 0.0;
        double v = objective(lam);
        if (v > best.value) {
          best.value = v;
          best.lambda = lam;
        }
      }
    }
  }
  return best;
}

}  // namespace oracle
}  // namespace drofa
