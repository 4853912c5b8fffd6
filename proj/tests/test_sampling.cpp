#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "adq/errors.hpp"
#include "adq/sampling.hpp"
#include "adq/sigma_delta.hpp"

using namespace adq;
using std::numbers::pi;

namespace {

TestSignal random_trig(std::uint64_t seed, int n, double peak) {
  Rng rng(seed);
  std::vector<TestSignal::Term> terms;
  for (int i = 0; i < n; ++i) {
    const double a = rng.uniform(-1.0, 1.0);
    const double w = rng.uniform(0.0, 0.95 * pi);
    terms.push_back({a, w, rng.uniform(0.0, 2.0 * pi)});
  }
  return TestSignal::trig_polynomial(terms, peak);
}

// g(t) = (1/π) ∫_0^S ĝ(ω) cos(ωt) dω by composite Simpson.
double kernel_by_quadrature(const ReconstructionFilter& g, double t) {
  const int n = 200000;
  const double h = g.stopband() / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = i * h;
    const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += c * g.spectrum(w) * std::cos(w * t);
  }
  return acc * h / 3.0 / pi;
}

}  // namespace

TEST_CASE("sampling") {
  for (double s : sample(TestSignal::zero(), 4.0, -10, 21)) CHECK(s == 0.0);
  const auto f = TestSignal::trig_polynomial({{1.0, 0.9 * pi, 0.3}}, 0.5);
  const auto s = sample(f, 4.0, -3, 8);
  for (int i = 0; i < 8; ++i) {
    const double t = (i - 3) / 4.0;
    CHECK(s[i] == doctest::Approx(0.5 * std::cos(0.9 * pi * t + 0.3)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(TestSignal::trig_polynomial({{1.0, pi, 0.0}}, 0.5), DomainError);
  CHECK_THROWS_AS(TestSignal::trig_polynomial({{1.0, 1.0, 0.0}}, 1.0), DomainError);
  CHECK_THROWS_AS(sample(f, 0.5, 0, 1), DomainError);
}

TEST_CASE("signals are scaled to the requested peak") {
  const auto f = random_trig(3, 5, 0.7);
  double worst = 0;
  for (int i = 0; i < 20000; ++i) worst = std::max(worst, std::abs(f(i * 0.01 - 100)));
  CHECK(worst <= 0.7);
  const auto g = TestSignal::sinc_sum({{2.0, 0.0, 0.0}, {-1.0, 1.5, 0.0}}, 0.6);
  CHECK(g(0.0) == doctest::Approx(0.4 + -0.2 * std::sin(-1.5 * pi) / (-1.5 * pi)));
}

TEST_CASE("filter spectrum is admissible") {
  const ReconstructionFilter g(4.0 * pi);
  double prev = 1.0;
  for (int i = 0; i <= 100000; ++i) {
    const double w = i * 6.0 * pi / 100000;
    const double s = g.spectrum(w);
    CHECK(s <= 1.0 + 1e-9);
    CHECK(s >= -1e-9);
    if (w <= pi) CHECK(std::abs(s - 1.0) <= 1e-9);
    if (w >= 4.0 * pi) CHECK(std::abs(s) <= 1e-9);
    CHECK(s <= prev + 1e-12);
    CHECK(g.spectrum(-w) == s);
    prev = s;
  }
}

TEST_CASE("closed-form kernel matches the Fourier integral") {
  for (double stop : {2.0 * pi, 4.0 * pi}) {
    const ReconstructionFilter g(stop);
    const double w = (stop - pi) / 2.0;
    // t = π/(2w) is where the closed form has its removable singularity
    for (double t : {0.0, 0.3, -1.7, 5.2, pi / (2.0 * w), pi / (2.0 * w) + 1e-5, 31.4}) {
      CHECK(std::abs(g(t) - kernel_by_quadrature(g, t)) <= 1e-9);
    }
  }
}

TEST_CASE("tail bound covers the kernel tail") {
  const ReconstructionFilter g(4.0 * pi);
  const double r = g.radius();
  CHECK(g.tail_bound(r) <= 1.0001e-8);
  double tail = 0.0;
  const double h = 1e-3;
  for (double t = r; t < 40.0 * r; t += h) tail += 2.0 * std::abs(g(t + h / 2)) * h;
  CHECK(tail <= g.tail_bound(r));
  CHECK(g.tail_bound(2 * r) < g.tail_bound(r));
}

TEST_CASE("unquantized samples reconstruct a trig polynomial") {
  const auto f = random_trig(11, 3, 0.8);
  for (double lambda : {4.0, 8.0}) {
    const ReconstructionFilter g(4.0 * pi);
    const std::int64_t first = -static_cast<std::int64_t>(std::ceil((g.radius() + 10) * lambda));
    const auto c = sample(f, lambda, first, static_cast<std::size_t>(-2 * first + 1));
    for (int i = 0; i < 50; ++i) {
      const double t = -5.0 + i * 0.2037;
      const auto rec = reconstruct(c, first, g, lambda, t);
      CHECK(std::abs(rec.value - f(t)) <= rec.truncation_bound + 1e-9);
      CHECK(rec.truncation_bound <= 1e-7);
    }
  }
}

TEST_CASE("reconstruction edge cases") {
  const ReconstructionFilter g(4.0 * pi);
  const auto half = static_cast<std::int64_t>(std::ceil(g.radius() * 8.0)) + 1;
  const std::vector<double> zeros(static_cast<std::size_t>(2 * half + 1), 0.0);
  CHECK(reconstruct(zeros, -half, g, 8.0, 0.0).value == 0.0);
  CHECK_THROWS_AS(reconstruct(std::vector<double>(10, 0.0), 0, g, 8.0, 0.0), RangeError);
  CHECK_THROWS_AS(reconstruct(zeros, -half, g, 2.0, 0.0), DomainError);
}

TEST_CASE("first-order bits reconstruct within the summation-by-parts bound") {
  const ReconstructionFilter g(4.0 * pi);
  // ‖g'‖₁ by central differences
  double dg = 0.0;
  const double h = 1e-3;
  for (double t = -g.radius(); t < g.radius(); t += h) dg += std::abs(g(t + h) - g(t));
  const auto f = random_trig(5, 4, 0.5);
  for (double lambda : {8.0, 16.0, 32.0}) {
    const std::int64_t first = -static_cast<std::int64_t>(std::ceil((g.radius() + 10) * lambda));
    const std::size_t count = static_cast<std::size_t>(-2 * first + 1);
    const auto x = sample(f, lambda, first, count);
    SdConfig c;
    c.order = 1;
    c.quantizer = ScalarQuantizerSpec::sign();
    Rng rng(1);
    const auto tr = sd_run(c, x, {}, count, rng);
    std::vector<double> bits(count);
    double umax = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      bits[i] = tr.bits[i].b;
      umax = std::max(umax, std::abs(tr.states[i].u));
    }
    CHECK(umax <= 1.5);
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double t = -4.0 + i * 0.04;
      worst = std::max(worst, std::abs(reconstruct(bits, first, g, lambda, t).value - f(t)));
    }
    CHECK(worst <= 2.0 * dg * umax / lambda);
  }
}

TEST_CASE("sigma-delta distortion slopes") {
  DistortionOptions opt;
  opt.grid_points = 200;
  const std::vector<double> lambdas = {8, 16, 32, 64};
  for (std::uint64_t seed : {1u, 2u}) {
    const auto f = random_trig(seed, 4, 0.5);
    const auto sd1 = distortion_curve(Pipeline::sd1, f, lambdas, opt);
    const auto sd2 = distortion_curve(Pipeline::sd2_finite, f, lambdas, opt);
    CHECK(log2_slope(sd1) <= -0.9);
    CHECK(log2_slope(sd2) <= -1.8);
    for (const auto* curve : {&sd1, &sd2}) {
      for (std::size_t i = 1; i < curve->size(); ++i) {
        CHECK((*curve)[i].sup_error <= 1.05 * (*curve)[i - 1].sup_error);
      }
    }
  }
}

TEST_CASE("beta and pcm pipelines lose a factor base^-8 per 8 bits") {
  DistortionOptions opt;
  opt.grid_points = 200;
  const auto f = random_trig(1, 4, 0.5);
  const std::vector<double> bits = {8, 16, 24};
  for (auto [pipe, base] : {std::pair{Pipeline::beta, 1.8}, std::pair{Pipeline::pcm, 2.0}}) {
    const auto curve = distortion_curve(pipe, f, bits, opt);
    for (std::size_t i = 1; i < curve.size(); ++i) {
      const double ratio = curve[i].sup_error / curve[i - 1].sup_error;
      CHECK(ratio >= 0.5 * std::pow(base, -8));
      CHECK(ratio <= 2.0 * std::pow(base, -8));
    }
  }
}

TEST_CASE("asymmetric pipeline decays and stays bounded") {
  DistortionOptions opt;
  opt.grid_points = 200;
  const auto curve = distortion_curve(Pipeline::sd2_asymmetric, random_trig(1, 4, 0.5),
                                      {8, 16, 32, 64}, opt);
  for (const auto& p : curve) CHECK_FALSE(p.diverged);
  CHECK(log2_slope(curve) <= -1.0);
}

TEST_CASE("pipeline names and curve validation") {
  for (auto p : {Pipeline::pcm, Pipeline::beta, Pipeline::sd1, Pipeline::sd2_finite,
                 Pipeline::sd2_asymmetric}) {
    CHECK(parse_pipeline(pipeline_name(p)) == p);
  }
  CHECK_THROWS_AS(parse_pipeline("sd3"), ConfigError);
  CHECK_THROWS_AS(distortion_curve(Pipeline::sd1, TestSignal::zero(), {16, 8}), ConfigError);
  CHECK_THROWS_AS(log2_slope({{8, 1.0}}), ConfigError);
}
