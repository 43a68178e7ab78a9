#ifndef DROFA_DOMAIN_HPP
#define DROFA_DOMAIN_HPP

#include <cstddef>

#include "drofa/errors.hpp"
#include "drofa/vec.hpp"

namespace drofa {

// Primal iterate. Dimension is fixed for the lifetime of a run; entries
// must stay finite (divergence is detected by the optimization loops).
struct ModelParams {
  Vec values;

  std::size_t dim() const { return values.size(); }
};

// Dual iterate on the probability simplex: entries >= 0 exactly, sum
// within 1e-12 of one at validation. Construct via validate_mixture or
// the simplex projection/prox operators.
struct MixtureWeights {
  Vec weights;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

inline constexpr double kSimplexSumTol = 1e-12;

MixtureWeights validate_mixture(const Vec& raw);

MixtureWeights uniform_mixture(std::size_t n);

enum class PrimalDomainKind { unconstrained, l2_ball };

struct PrimalDomainSpec {
  PrimalDomainKind kind = PrimalDomainKind::unconstrained;
  double radius = 0.0;  // used when kind == l2_ball

  static PrimalDomainSpec unconstrained() { return {}; }
  static PrimalDomainSpec l2_ball(double r);
};

// Running arithmetic mean of pushed vectors. Backs the returned
// solutions w-hat and lambda-hat and the tail-averaged variant.
class IterateAverager {
 public:
  IterateAverager() = default;

  void push(const Vec& x);
  // Add a vector that is already the sum of n_items raw iterates.
  void push_sum(const Vec& x, double n_items);
  std::size_t count() const { return count_; }
  bool empty() const { return count_ == 0; }
  Vec mean() const;

 private:
  Vec running_sum_;
  std::size_t count_ = 0;
  double weight_ = 0.0;
};

}  // namespace drofa

#endif
