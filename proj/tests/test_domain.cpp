#include <doctest.h>

#include "drofa/domain.hpp"
#include "drofa/errors.hpp"
#include "drofa/rng.hpp"

using namespace drofa;

TEST_CASE("validate_mixture accepts feasible vectors") {
  auto m = validate_mixture({0.25, 0.25, 0.5});
  CHECK(m.size() == 3);
  CHECK(m[2] == 0.5);
  CHECK(validate_mixture({1.0}).size() == 1);  // degenerate 1-simplex
}

TEST_CASE("validate_mixture rejects bad input") {
  CHECK_THROWS_AS(validate_mixture({0.7, 0.4}), SumOutOfTolerance);
  CHECK_THROWS_AS(validate_mixture({}), EmptyVector);
  CHECK_THROWS_AS(validate_mixture({1.5, -0.5}), NegativeEntry);
  try {
    validate_mixture({0.7, 0.4});
  } catch (const SumOutOfTolerance& e) {
    CHECK(e.actual_sum == doctest::Approx(1.1));
  }
}

TEST_CASE("uniform mixture sums to exactly one") {
  for (std::size_t n : {1, 2, 3, 7, 100}) {
    auto u = uniform_mixture(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += u[i];
    CHECK(s == 1.0);
  }
}

TEST_CASE("averager two-point mean") {
  IterateAverager acc;
  acc.push({2.0, 0.0});
  acc.push({0.0, 2.0});
  auto m = acc.mean();
  CHECK(m[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(m[1] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("averager identity and idempotent mean") {
  IterateAverager one;
  one.push({3.5, -1.0});
  CHECK(one.mean() == Vec{3.5, -1.0});

  for (int k : {1, 2, 5, 17}) {
    IterateAverager acc;
    for (int i = 0; i < k; ++i) acc.push({3.5, -1.0});
    auto m = acc.mean();
    CHECK(m[0] == doctest::Approx(3.5).epsilon(1e-15));
    CHECK(m[1] == doctest::Approx(-1.0).epsilon(1e-15));
  }
}

TEST_CASE("averager rejects dimension mismatch") {
  IterateAverager acc;
  acc.push({1.0, 2.0});
  CHECK_THROWS_AS(acc.push({1.0}), DimensionMismatch);
}

TEST_CASE("averager push_sum matches individual pushes") {
  RngStream rng(9, StreamPurpose::data_gen, 0);
  IterateAverager a, b;
  Vec sum(3, 0.0);
  for (int i = 0; i < 8; ++i) {
    Vec x{rng.next_double(), rng.next_double(), rng.next_double()};
    a.push(x);
    add_inplace(sum, x);
  }
  b.push_sum(sum, 8.0);
  auto ma = a.mean(), mb = b.mean();
  for (int k = 0; k < 3; ++k) CHECK(ma[k] == doctest::Approx(mb[k]).epsilon(1e-15));
}

TEST_CASE("l2_ball spec validation") {
  CHECK_THROWS_AS(PrimalDomainSpec::l2_ball(-1.0), BadConfig);
  CHECK(PrimalDomainSpec::l2_ball(2.0).radius == 2.0);
}
