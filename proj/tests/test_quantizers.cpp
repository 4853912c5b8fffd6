#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "adq/errors.hpp"
#include "adq/quantizers.hpp"

using namespace adq;

TEST_CASE("sign quantizer sends zero to -1") {
  Rng rng(1);
  CHECK(quantize_scalar(ScalarQuantizerSpec::sign(), 0.0, rng).b == -1);
  CHECK(quantize_scalar(ScalarQuantizerSpec::sign(), 1e-300, rng).b == 1);
  CHECK(quantize_scalar(ScalarQuantizerSpec::sign(), -3.0, rng).b == -1);
  CHECK(sign_quantize(0.0) == -1);
}

TEST_CASE("tri-level dead zone is closed") {
  Rng rng(1);
  const auto q = ScalarQuantizerSpec::tri_level(0.5);
  CHECK(quantize_scalar(q, 0.4, rng).b == 0);
  CHECK(quantize_scalar(q, 0.5, rng).b == 0);
  CHECK(quantize_scalar(q, -0.5, rng).b == 0);
  CHECK(quantize_scalar(q, 0.5000001, rng).b == 1);
  CHECK(quantize_scalar(q, -0.51, rng).b == -1);
}

TEST_CASE("four-level case table") {
  Rng rng(1);
  const auto q = ScalarQuantizerSpec::four_level(0.9);
  // 1/(2*.9) = .5556 < .6
  CHECK(quantize_scalar(q, 0.6, rng) == QuantizerOutput{1, 1});
  CHECK(quantize_scalar(q, 0.55, rng) == QuantizerOutput{0, 1});
  CHECK(quantize_scalar(q, 0.0, rng) == QuantizerOutput{0, 0});
  CHECK(quantize_scalar(q, -0.5, rng) == QuantizerOutput{-1, 0});
  CHECK(quantize_scalar(q, -0.49, rng) == QuantizerOutput{0, 0});
}

TEST_CASE("four-level properties over a grid") {
  Rng rng(1);
  for (double tau : {0.5, 0.9, 0.98, 1.0}) {
    const auto q = ScalarQuantizerSpec::four_level(tau);
    for (int i = -400; i <= 400; ++i) {
      const double u = i / 100.0;
      const QuantizerOutput out = quantize_scalar(q, u, rng);
      CHECK((out.q == 1) == (u > 0.0));
      if (out.b != 0) CHECK((out.b > 0) == (u > 0.0));
    }
  }
}

TEST_CASE("flaky sign agrees with sign outside the zone for every mode") {
  const double nu = 0.3;
  const std::vector<FlakyMode> modes = {FlakyMode::ideal(), FlakyMode::always_plus(),
                                        FlakyMode::always_minus(), FlakyMode::coin(0.3),
                                        FlakyMode::offset(-0.2)};
  Rng rng(7);
  for (const auto& m : modes) {
    const auto q = ScalarQuantizerSpec::flaky_sign(nu, m);
    for (int i = -300; i <= 300; ++i) {
      const double u = i / 100.0 + 0.001;
      if (std::abs(u) <= nu) continue;
      CHECK(quantize_scalar(q, u, rng).b == sign_quantize(u));
    }
  }
}

TEST_CASE("flaky zone follows the mode") {
  Rng rng(3);
  CHECK(quantize_scalar(ScalarQuantizerSpec::flaky_sign(0.3, FlakyMode::always_plus()), -0.2, rng).b == 1);
  CHECK(quantize_scalar(ScalarQuantizerSpec::flaky_sign(0.3, FlakyMode::always_minus()), 0.2, rng).b == -1);
  CHECK(quantize_scalar(ScalarQuantizerSpec::flaky_sign(0.3, FlakyMode::offset(0.25)), -0.2, rng).b == 1);
  CHECK(quantize_scalar(ScalarQuantizerSpec::flaky_sign(0.3, FlakyMode::ideal()), 0.0, rng).b == -1);
}

TEST_CASE("coin mode is reproducible and roughly fair") {
  const auto q = ScalarQuantizerSpec::flaky_sign(0.5, FlakyMode::coin(0.5));
  Rng a(42), b(42);
  int plus = 0;
  for (int i = 0; i < 10000; ++i) {
    const int x = quantize_scalar(q, 0.1, a).b;
    CHECK(x == quantize_scalar(q, 0.1, b).b);
    plus += x == 1;
  }
  CHECK(plus > 4800);
  CHECK(plus < 5200);
}

TEST_CASE("plane quantizer") {
  Rng rng(1);
  CHECK(quantize_plane({2.0, 0.3, FlakyMode::ideal()}, 1.0, 1.0, rng) == 1);
  CHECK(quantize_plane({2.0, 0.0, FlakyMode::ideal()}, 0.0, 0.0, rng) == 1);
  CHECK(quantize_plane({2.0, 0.3, FlakyMode::always_minus()}, 0.0, 0.0, rng) == -1);
  CHECK(quantize_plane({2.0, 0.3, FlakyMode::always_plus()}, -0.5, 0.1, rng) == 1);
  CHECK(quantize_plane({2.0, 0.3, FlakyMode::always_plus()}, -0.5, 0.09, rng) == -1);
  // strip is -nu <= w < nu: w = nu is already outside
  CHECK(quantize_plane({2.0, 0.3, FlakyMode::always_minus()}, 0.3, 0.0, rng) == 1);
}

TEST_CASE("validation") {
  Rng rng(1);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(quantize_scalar(ScalarQuantizerSpec::sign(), nan, rng), DomainError);
  CHECK_THROWS_AS(quantize_plane({2.0, 0.0, {}}, INFINITY, 0.0, rng), DomainError);
  CHECK_THROWS_AS(FlakyMode::coin(1.5).validate(0.1), ConfigError);
  CHECK_THROWS_AS(FlakyMode::offset(0.2).validate(0.1), ConfigError);
  CHECK_NOTHROW(FlakyMode::offset(0.1).validate(0.1));
  CHECK_THROWS_AS(ScalarQuantizerSpec::tri_level(0.0).validate(), ConfigError);
  CHECK_THROWS_AS((PlaneQuantizerSpec{-1.0, 0.0, {}}.validate()), ConfigError);
}

TEST_CASE("rng streams") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  // mt19937_64's 10000th output for the default seed is fixed by the standard
  Rng c(5489u);
  for (int i = 0; i < 9999; ++i) c.next();
  CHECK(c.next() == 9981545732273789042ULL);
  Rng u(3);
  double s = 0, s2 = 0;
  for (int i = 0; i < 100000; ++i) {
    const double z = u.normal();
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / 1e5) < 0.02);
  CHECK(std::abs(s2 / 1e5 - 1.0) < 0.02);
  CHECK(Rng::derive(10, 3) == (10u ^ 3u));
}
