#include <doctest.h>

#include <cmath>
#include <vector>

#include "adq/errors.hpp"
#include "adq/sigma_delta.hpp"

using namespace adq;

namespace {

SdConfig asymmetric(double rho, double gamma) {
  SdConfig c;
  c.order = 2;
  c.scheme = SdScheme::asymmetric;
  c.rho = rho;
  c.gamma = gamma;
  c.quantizer = ScalarQuantizerSpec::four_level(rho);
  return c;
}

SdConfig finite(double rho, double gamma, double tau) {
  SdConfig c;
  c.order = 2;
  c.scheme = SdScheme::finite_memory;
  c.rho = rho;
  c.gamma = gamma;
  c.quantizer = ScalarQuantizerSpec::tri_level(tau);
  return c;
}

bool in_t(double gamma, const SdState& s) {
  return region_contains(RegionSpec::of(RegionKind::t, gamma), s);
}

// A point of T⁺ or T⁻ drawn through the coordinates (u, u/γ + v).
SdState random_t_point(double gamma, Rng& rng) {
  const double u = rng.uniform(1e-9, 1.0 - 1e-9);
  const double w = rng.uniform(-0.5, 0.5 + 1.0 / gamma);
  SdState s{u, w - u / gamma};
  if (rng.bernoulli(0.5)) s = {-s.u, -s.v};
  return s;
}

}  // namespace

TEST_CASE("first order with zero input alternates") {
  SdConfig c;
  c.order = 1;
  c.quantizer = ScalarQuantizerSpec::sign();
  Rng rng(1);
  const auto tr = sd_run(c, {}, {0.3, 0.0}, 20, rng);
  for (std::size_t n = 0; n < 20; ++n) {
    CHECK(tr.bits[n].b == (n % 2 == 0 ? 1 : -1));
    CHECK(tr.states[n].u == doctest::Approx(n % 2 == 0 ? -0.7 : 0.3));
  }
}

TEST_CASE("origin is fixed for the undamped tri-level scheme") {
  Rng rng(1);
  const auto tr = sd_run(finite(1.0, 0.2, 0.5), {}, {0.0, 0.0}, 1000, rng);
  for (std::size_t n = 0; n < 1000; ++n) {
    CHECK(tr.bits[n].b == 0);
    CHECK(tr.states[n].u == 0.0);
    CHECK(tr.states[n].v == 0.0);
  }
}

TEST_CASE("asymmetric recursion matches a hand transcription") {
  const SdConfig c = asymmetric(0.98, 0.2);
  Rng rng(1), rng2(1);
  std::vector<double> f(300);
  for (auto& x : f) x = rng2.uniform(-0.5, 0.5);
  const auto tr = sd_run(c, f, {-3.4, 12.7}, 300, rng);
  double u = -3.4, v = 12.7;
  for (std::size_t n = 0; n < 300; ++n) {
    const double w = u / 0.2 + v;
    int b, q = w > 0 ? 1 : 0;
    if (w <= -0.5) b = -1;
    else if (w <= 1.0 / (2 * 0.98)) b = 0;
    else b = 1;
    u = u + q * (0.98 - 1) * u - b + f[n];
    v = v + q * (0.98 - 1) * v + u;
    CHECK(tr.bits[n].b == b);
    CHECK(tr.bits[n].q == q);
    CHECK(tr.states[n].u == doctest::Approx(u).epsilon(1e-12));
    CHECK(tr.states[n].v == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("zero input map") {
  auto z = zero_input_step(0.2, 0.98, {0.0, 0.0});
  CHECK(z.next.u == 0.0);
  CHECK(z.next.v == 0.0);
  auto a = zero_input_step(0.2, 0.98, {0.1, 0.1});
  CHECK(a.damped);
  CHECK(a.b == 1);
  CHECK(a.next.u == doctest::Approx(-0.902));
  CHECK(a.next.v == doctest::Approx(-0.804));
  auto b = zero_input_step(0.2, 0.98, {-0.1, -0.1});
  CHECK_FALSE(b.damped);
  CHECK(b.b == -1);
  // A applied to (-.1,-.1): (u+1, u+v+1)
  CHECK(b.next.u == doctest::Approx(0.9));
  CHECK(b.next.v == doctest::Approx(0.8));
}

TEST_CASE("the map agrees with one zero-input step of the asymmetric scheme") {
  Rng rng(5);
  for (int i = 0; i < 2000; ++i) {
    const SdState s{rng.uniform(-5, 5), rng.uniform(-20, 20)};
    const double gamma = rng.uniform(0.05, 0.3), rho = rng.uniform(0.9, 1.0);
    const auto m = zero_input_step(gamma, rho, s);
    QuantizerOutput out;
    const SdState n = sd_step(asymmetric(rho, gamma), s, 0.0, rng, &out);
    CHECK(m.next.u == doctest::Approx(n.u).epsilon(1e-12));
    CHECK(m.next.v == doctest::Approx(n.v).epsilon(1e-12));
  }
}

TEST_CASE("region membership") {
  CHECK(region_contains(RegionSpec::of(RegionKind::t_plus, 0.2), {0.5, 0.0}));
  CHECK(in_t(0.2, {0.5, 0.0}));
  CHECK_FALSE(in_t(0.2, {2.0, 0.0}));
  CHECK(region_contains(RegionSpec::of(RegionKind::t_minus, 0.2), {-0.5, 0.0}));
  CHECK(stability_constant_lower_bound(0.9) == doctest::Approx(39.0).epsilon(1e-2));
  CHECK(40.0 >= stability_constant_lower_bound(0.9));
  CHECK(region_contains(RegionSpec::stability(0.9, 40), {0.0, 0.0}));
  CHECK_FALSE(region_contains(RegionSpec::stability(0.9, 40), {0.0, 41.0}));
  CHECK(region_contains(RegionSpec::sublevel(2.0), {1.0, 1.0}));
  CHECK_FALSE(region_contains(RegionSpec::sublevel(1.9), {1.0, 1.0}));
}

TEST_CASE("printed gamma window of the stability region is empty") {
  for (double a : {0.3, 0.5, 0.7, 0.9}) {
    for (double m : {1.0, 2.0, 10.0}) {
      CHECK(stability_gamma_range(a, m * stability_constant_lower_bound(a)).empty());
    }
  }
}

TEST_CASE("stability region is invariant at an empirically admissible gamma") {
  // γ = .04 at (α, C) = (.9, 40); the printed window gives no γ at all.
  const SdConfig c = finite(1.0, 0.04, 0.5);
  const auto S = RegionSpec::stability(0.9, 40.0);
  Rng rng(12);
  int checked = 0;
  while (checked < 10000) {
    const SdState s{rng.uniform(-120, 120), rng.uniform(-80, 80)};
    if (!region_contains(S, s)) continue;
    ++checked;
    QuantizerOutput out;
    CHECK(region_contains(S, sd_step(c, s, rng.uniform(-0.9, 0.9), rng, &out)));
  }
}

TEST_CASE("lyapunov function") {
  CHECK(lyapunov_h({0, 0}) == 0.0);
  CHECK(lyapunov_h({1, 1}) == 2.0);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const SdState s{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    CHECK(std::abs(lyapunov_h(s) - std::max(lyapunov_h_plus(s), lyapunov_h_minus(s))) <= 1e-12);
    CHECK(std::abs(lyapunov_h_plus({s.u - 1, s.u + s.v - 1}) - lyapunov_h_plus(s)) <= 1e-12);
    CHECK(std::abs(lyapunov_h_minus({s.u + 1, s.u + s.v + 1}) - lyapunov_h_minus(s)) <= 1e-12);
  }
}

TEST_CASE("T is positively invariant") {
  Rng rng(21);
  for (int i = 0; i < 10000; ++i) {
    const double gamma = rng.uniform(0.05, 0.3), rho = rng.uniform(0.9, 1.0);
    const SdState s = random_t_point(gamma, rng);
    REQUIRE(in_t(gamma, s));
    CHECK(in_t(gamma, zero_input_step(gamma, rho, s).next));
  }
}

TEST_CASE("descent set inside R inside T on a grid") {
  // On the shift branches h(A p) = h(p) exactly; the margin keeps rounding
  // from counting those as increases.
  for (double gamma : {0.1, 0.2, 0.3}) {
    int bad_r = 0, bad_t = 0;
    for (int i = -200; i <= 200; ++i) {
      for (int j = -200; j <= 200; ++j) {
        const SdState p{i / 100.0, j / 100.0};
        const bool in_r = region_contains(RegionSpec::of(RegionKind::r, gamma), p);
        if (lyapunov_h(affine_step(gamma, p).next) > lyapunov_h(p) + 1e-12 && !in_r) ++bad_r;
        if (in_r && !in_t(gamma, p)) ++bad_t;
      }
    }
    CHECK(bad_r == 0);
    CHECK(bad_t == 0);
  }
}

TEST_CASE("quietness of the asymmetric scheme") {
  Rng rng(1);
  const auto tr = sd_run(asymmetric(0.98, 0.2), {}, {-3.4, 12.7}, 100000, rng);
  const auto q = quietness_test(tr, 0);
  CHECK(q.quiet == Decision::yes);
  REQUIRE(q.settle_index);
  CHECK(q.settled == QuantizerOutput{0, 1});
  CHECK(std::abs(tr.states.back().u) < 1e-6);
  CHECK(std::abs(tr.states.back().v) < 1e-6);
}

TEST_CASE("undamped tri-level scheme is not quiet") {
  Rng rng(1);
  const auto tr = sd_run(finite(1.0, 0.2, 0.5), {}, {0.3, 0.0}, 1000000, rng);
  CHECK(quietness_test(tr, 0).quiet == Decision::no);
  const auto codes = output_codes(tr);
  CHECK(idle_tone_detect(codes, 100).periodic == Decision::yes);
}

TEST_CASE("short traces are indeterminate") {
  Rng rng(1);
  const auto tr = sd_run(asymmetric(0.98, 0.2), {}, {0.1, 0.1}, 10, rng);
  CHECK(quietness_test(tr, 10).quiet == Decision::indeterminate);
  CHECK(quietness_test(tr, 0).quiet == Decision::indeterminate);
}

TEST_CASE("trapping diagnostics") {
  const auto a = trapping_diagnostics(0.2, 0.98, {-3.4, 12.7}, 100000);
  REQUIRE(a.entry_index);
  CHECK(a.post_entry_violations == 0);
  CHECK(a.alternation_violations == 0);
  CHECK(a.descent_violations == 0);
  CHECK(a.t_plus_increases == 0);
  const auto o = trapping_diagnostics(0.2, 0.98, {0.0, 0.0}, 1000);
  REQUIRE(o.entry_index);
  CHECK(*o.entry_index == 0);
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const SdState s{rng.uniform(-20, 20), rng.uniform(-20, 20)};
    const auto r = trapping_diagnostics(0.2, 0.98, s, 100000);
    CHECK(r.entry_index);
    CHECK(r.post_entry_violations == 0);
    CHECK(r.alternation_violations == 0);
    CHECK(r.settle_index);
    CHECK(r.t_plus_increases == 0);
    CHECK(std::abs(r.final_state.u) < 1e-6);
  }
}

TEST_CASE("trapping settle index matches quietness_test") {
  Rng pick(21);
  for (int i = 0; i < 20; ++i) {
    const SdState s{pick.uniform(-20, 20), pick.uniform(-20, 20)};
    Rng rng(i);
    const auto q = quietness_test(sd_run(asymmetric(0.98, 0.2), {}, s, 20000, rng), 0);
    const auto r = trapping_diagnostics(0.2, 0.98, s, 20000);
    REQUIRE(q.quiet == Decision::yes);
    CHECK(q.settled == QuantizerOutput{0, 1});
    CHECK(r.settle_index == q.settle_index);
  }
}

TEST_CASE("slightly negative u in T- drifts for ~0.5/|u| steps") {
  // output (0,0) leaves u frozen and moves v by u each step
  const SdState s{-1e-6, -0.01};
  const auto short_run = trapping_diagnostics(0.2, 0.98, s, 100000);
  CHECK_FALSE(short_run.settle_index);
  CHECK(short_run.post_entry_violations == 0);
  const auto long_run = trapping_diagnostics(0.2, 0.98, s, 2000000);
  REQUIRE(long_run.settle_index);
  CHECK(*long_run.settle_index > 480000);
  CHECK(long_run.post_entry_violations == 0);
  CHECK(long_run.alternation_violations == 0);
}

TEST_CASE("idle tone detection") {
  std::vector<int> alt(2000), zero(2000, 0);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? -1 : 1;
  auto a = idle_tone_detect(alt, 100);
  CHECK(a.periodic == Decision::yes);
  CHECK(a.period == 2u);
  auto z = idle_tone_detect(zero, 100);
  CHECK(z.periodic == Decision::yes);
  CHECK(z.period == 1u);
  CHECK(idle_tone_detect(std::vector<int>(999, 0), 100).periodic == Decision::indeterminate);
}

TEST_CASE("chaotic scheme output is aperiodic") {
  SdConfig c;
  c.order = 2;
  c.scheme = SdScheme::chaotic;
  c.expansion = 0.01;
  c.gamma = 0.2;
  c.quantizer = ScalarQuantizerSpec::tri_level(0.5);
  Rng rng(1);
  std::vector<double> f(1000000, -0.001);
  const auto tr = sd_run(c, f, {0.1, 0.0}, f.size(), rng);
  CHECK_FALSE(tr.diverged_at);
  CHECK(idle_tone_detect(output_codes(tr), 100).periodic == Decision::no);
}

TEST_CASE("hybrid scheme reports q in {-1,1}") {
  SdConfig c;
  c.order = 2;
  c.scheme = SdScheme::hybrid;
  c.expansion = 0.01;
  c.quantizer = ScalarQuantizerSpec::four_level(1.0);
  Rng rng(1);
  const auto tr = sd_run(c, {}, {0.3, -1.0}, 1000, rng);
  for (const auto& o : tr.bits) CHECK((o.q == 1 || o.q == -1));
}

TEST_CASE("divergence guard") {
  SdConfig c;
  c.order = 2;
  c.scheme = SdScheme::chaotic;
  c.expansion = 1.0;
  c.quantizer = ScalarQuantizerSpec::tri_level(0.5);
  Rng rng(1);
  const auto tr = sd_run(c, {}, {5.0, 5.0}, 1000, rng);
  REQUIRE(tr.diverged_at);
  CHECK(*tr.diverged_at < 1000);
}

TEST_CASE("config validation") {
  Rng rng(1);
  SdConfig c;
  c.order = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = asymmetric(0.98, 0.2);
  c.quantizer = ScalarQuantizerSpec::tri_level(0.5);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = finite(1.2, 0.2, 0.5);
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.rho = 0.9;
  c.order = 1;
  c.scheme = SdScheme::asymmetric;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  std::vector<double> f(5, 0.0);
  CHECK_THROWS_AS(sd_run(finite(1.0, 0.2, 0.5), f, {}, 10, rng), RangeError);
}
