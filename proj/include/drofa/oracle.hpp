#ifndef DROFA_ORACLE_HPP
#define DROFA_ORACLE_HPP

#include <vector>

#include "drofa/domain.hpp"
#include "drofa/objectives.hpp"
#include "drofa/vec.hpp"

namespace drofa {
namespace oracle {

// Brute-force simplex projection: enumerates every nonempty active set,
// solves the equality-constrained least squares, returns the feasible
// candidate closest to the input. Independent of the fast sort-threshold
// path. len(v) <= 16.
Vec brute_force_simplex_projection(const Vec& v);

struct SaddleProblem {
  std::vector<Vec> centers;  // per-client quadratic centers
  double curvature = 1.0;
  double l2_term = 0.0;
  RegularizerSpec regularizer;
  PrimalDomainSpec domain;
};

struct SaddlePoint {
  Vec w_star;
  Vec lambda_star;
  double phi_star;
  double residual_w;       // best-response residual at the returned point
  double residual_lambda;
};

// Alternating exact best response for quadratic-vs-(quadratic or linear)
// saddle problems; converges for strongly-convex-strongly-concave
// instances, residual certificate reported either way.
SaddlePoint saddle_point_oracle(const SaddleProblem& p);

struct GridMax {
  double value;
  Vec lambda;
};

// dense simplex grid search, N <= 3
GridMax grid_max_over_simplex(const Vec& loss_values, const RegularizerSpec& g,
                              double resolution);

}  // namespace oracle
}  // namespace drofa

#endif
