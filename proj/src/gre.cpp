#include "adq/gre.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adq/errors.hpp"

namespace adq {

namespace {

void check_leaks(double lambda1, double lambda2) {
  if (!(lambda1 > 0.0 && lambda2 > 0.0)) {
    throw DomainError("leaks must be positive");
  }
}

struct Eigenvalues {
  double eps1, eps2;
};

// Roots of x² - λ₁x - λ₁λ₂.
Eigenvalues eigenvalues(double lambda1, double lambda2) {
  const double root = std::sqrt(lambda1 * lambda1 + 4.0 * lambda1 * lambda2);
  return {(lambda1 + root) / 2.0, (-lambda1 + root) / 2.0};
}

}  // namespace

void GreConfig::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(nu >= 0.0)) throw ConfigError("nu must be nonnegative");
  if (!(lambda1 > 0.0 && lambda1 <= 1.0 && lambda2 > 0.0 && lambda2 <= 1.0)) {
    throw ConfigError("leaks must lie in (0,1]");
  }
  if (bits < 0) throw ConfigError("bit budget must be nonnegative");
  mode.validate(nu);
}

GreEncoding gre_encode(double x, const GreConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!(std::abs(x) <= 1.0)) throw DomainError("gre_encode needs |x| <= 1");
  GreEncoding enc;
  enc.start = cfg.start;
  const PlaneQuantizerSpec q{cfg.alpha, cfg.nu, cfg.mode};
  const double l12 = cfg.lambda1 * cfg.lambda2;
  double u0 = cfg.start == GreStart::ideal ? x : 0.0;
  double u1 = cfg.start == GreStart::ideal ? 0.0 : x;
  enc.states = {u0, u1};
  enc.bits.bits.reserve(cfg.bits + 1);
  for (int n = 0; n <= cfg.bits; ++n) {
    const double a = l12 * u0;
    const double c = cfg.lambda1 * u1;
    const int b = quantize_plane(q, a, c, rng);
    const double u2 = a + c - b;
    enc.bits.bits.push_back(b);
    enc.states.push_back(u2);
    u0 = u1;
    u1 = u2;
  }
  return enc;
}

double gamma_of_leaks(double lambda1, double lambda2) {
  check_leaks(lambda1, lambda2);
  const double l12 = lambda1 * lambda2;
  return (-lambda1 + std::sqrt(lambda1 * lambda1 + 4.0 * l12)) / (2.0 * l12);
}

double equal_leaks_for_gamma(double gamma) {
  const double phi_inv = 1.0 / std::numbers::phi;
  if (!(gamma >= phi_inv - 1e-15 && gamma < 1.0)) {
    throw DomainError("equal leaks exist only for gamma in [1/phi, 1)");
  }
  // γ(λ,λ) = (√5 - 1)/(2λ) exactly: the root of 1 - λγ - λ²γ² is (φ⁻¹)/λ.
  return std::min(1.0, phi_inv / gamma);
}

double gre_decode(const Bitstream& bits, double gamma, int n) {
  if (n < 0 || static_cast<std::size_t>(n) + 1 > bits.size()) {
    throw RangeError("decode length exceeds the stream");
  }
  return power_sum(bits.bits, 0, n + 1, gamma, 1);
}

double gre_reconstruct(const GreEncoding& enc, double gamma, int n) {
  const double s = gre_decode(enc.bits, gamma, n);
  return enc.start == GreStart::leaky ? s : s / gamma;
}

double gre_error_bound(double gamma, int n) {
  return gamma / (1.0 - gamma) * std::pow(gamma, n);
}

std::optional<ClosedInterval> admissible_alpha_range(double eps) {
  if (!(eps >= 0.0)) throw DomainError("tolerance must be nonnegative");
  if (eps > 0.337) return std::nullopt;
  return ClosedInterval{1.198 + 1.479 * eps, 2.053 - 1.058 * eps};
}

std::optional<ClosedInterval> appendix_alpha_range(double delta) {
  if (!(delta >= 0.0)) throw DomainError("tolerance must be nonnegative");
  if (delta > 0.4161) return std::nullopt;
  return ClosedInterval{1.198 * (1.0 + delta), 2.053 - 0.8568 * delta};
}

RectangleGeometry stability_rectangle(double lambda1, double lambda2,
                                      double mu) {
  check_leaks(lambda1, lambda2);
  if (!(mu >= 0.0)) throw DomainError("mu must be nonnegative");
  const auto [e1, e2] = eigenvalues(lambda1, lambda2);
  RectangleGeometry g{};
  g.eps1 = e1;
  g.eps2 = e2;
  g.s1 = std::sqrt(1.0 + e1 * e1);
  g.s2 = std::sqrt(1.0 + e2 * e2);
  g.mu = mu;
  const double sum = e1 + e2;
  g.h = 2.0 * mu / (1.0 - e1) + 2.0 * g.s1 / (e1 * (e1 - 1.0) * sum);
  g.d = mu / (1.0 - e1) + g.s1 * (2.0 - e1) / (e1 * (e1 - 1.0) * sum);
  g.l = mu / (1.0 - e2) + g.s2 * (2.0 - e2) / (e2 * (1.0 - e2) * sum);
  g.r = mu / (1.0 - e2) + g.s2 / ((1.0 - e2) * sum);
  g.y_intercept = sum / g.s1 * (g.h - g.d);
  g.admissible = g.d > 0.0;
  return g;
}

double overlap_mu_limit(double lambda1, double lambda2) {
  check_leaks(lambda1, lambda2);
  const auto [e1, e2] = eigenvalues(lambda1, lambda2);
  return std::sqrt(1.0 + e1 * e1) * (2.0 - e1) / (e1 * (e1 + e2));
}

double intercept_mu_limit(double lambda1, double lambda2) {
  check_leaks(lambda1, lambda2);
  const auto [e1, e2] = eigenvalues(lambda1, lambda2);
  return std::sqrt(1.0 + e1 * e1) * (2.0 - e1) / (e1 + e2);
}

double alpha_lower_numerator(double x, double y, double delta) {
  return x * (x - 1.0) - (2.0 - x) * (1.0 - y) +
         delta * x * (x - 1.0) * (x + y) * (1.0 - y);
}

double alpha_lower_denominator(double x, double y) {
  return x * ((2.0 - x) * (1.0 - y) + y * (x - 1.0));
}

double alpha_upper(double x, double y, double delta) {
  return (2.0 + x * y - 2.0 * y - delta * x * y * (x - 1.0) * (1.0 - y + x)) /
         (x * (y - 2.0));
}

AlphaBounds alpha_bounds(double eps1, double eps2, double delta) {
  return {alpha_lower_numerator(eps1, eps2, delta) /
              alpha_lower_denominator(eps1, eps2),
          alpha_upper(eps1, eps1 + eps2, delta)};
}

double max_admissible_delta() {
  const double phi = std::numbers::phi;
  const double x_min = eigenvalues(0.9, 0.9).eps1;
  const double y_max = std::sqrt(5.0);
  const double den = alpha_lower_denominator(x_min, 1.0 / phi);
  // Both sides are affine in δ.
  const double u0 = alpha_upper(x_min, y_max, 0.0);
  const double u1 = alpha_upper(x_min, y_max, 1.0) - u0;
  const double l0 = alpha_lower_numerator(phi, 1.0 / phi, 0.0) / den;
  const double l1 = alpha_lower_numerator(phi, 1.0 / phi, 1.0) / den - l0;
  return (u0 - l0) / (l1 - u1);
}

}  // namespace adq
