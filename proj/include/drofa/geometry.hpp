#ifndef DROFA_GEOMETRY_HPP
#define DROFA_GEOMETRY_HPP

#include "drofa/domain.hpp"
#include "drofa/objectives.hpp"
#include "drofa/vec.hpp"

namespace drofa {

// Euclidean projection onto the probability simplex, sort-then-threshold.
// The output sum is fixed to exactly 1 by subtracting the residual from
// the largest entry.
MixtureWeights project_simplex(const Vec& v);

ModelParams project_primal(const Vec& w, const PrimalDomainSpec& spec);

// argmax over the simplex of  tau * g(u) - (1/(2*step)) * ||anchor - u||^2
struct ProxProblem {
  Vec anchor;  // lambda + step * scale * v
  double step = 1.0;
  double scale = 1.0;
  RegularizerSpec regularizer;
};

MixtureWeights prox_simplex(const ProxProblem& p);

}  // namespace drofa

#endif
