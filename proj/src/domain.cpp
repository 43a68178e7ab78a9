#include "drofa/domain.hpp"

#include <cmath>

namespace drofa {

MixtureWeights validate_mixture(const Vec& raw) {
  if (raw.empty()) throw EmptyVector();
  double sum = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) throw NonFiniteInput();
    if (raw[i] < 0.0) throw NegativeEntry(i);
    sum += raw[i];
  }
  if (std::abs(sum - 1.0) > kSimplexSumTol) throw SumOutOfTolerance(sum);
  return MixtureWeights{raw};
}

MixtureWeights uniform_mixture(std::size_t n) {
  if (n == 0) throw EmptyVector();
  Vec w(n, 1.0 / static_cast<double>(n));
  // fix the residual on the first entry so the sum is exactly 1
  double s = 0.0;
  for (double x : w) s += x;
  w[0] += 1.0 - s;
  return MixtureWeights{w};
}

PrimalDomainSpec PrimalDomainSpec::l2_ball(double r) {
  if (!(r > 0.0) || !std::isfinite(r))
    throw BadConfig("l2_ball radius must be finite and positive");
  return PrimalDomainSpec{PrimalDomainKind::l2_ball, r};
}

void IterateAverager::push(const Vec& x) { push_sum(x, 1.0); }

void IterateAverager::push_sum(const Vec& x, double n_items) {
  if (running_sum_.empty()) {
    running_sum_.assign(x.size(), 0.0);
  } else if (running_sum_.size() != x.size()) {
    throw DimensionMismatch(running_sum_.size(), x.size());
  }
  add_inplace(running_sum_, x);
  weight_ += n_items;
  ++count_;
}

Vec IterateAverager::mean() const {
  if (count_ == 0) throw Error("mean of empty averager");
  return scaled(running_sum_, 1.0 / weight_);
}

}  // namespace drofa
