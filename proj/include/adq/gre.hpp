#pragma once

#include <optional>
#include <vector>

#include "adq/bitstream.hpp"
#include "adq/quantizers.hpp"
#include "adq/rng.hpp"

namespace adq {

// ideal: (u_0, u_1) = (x, 0), x ≈ Σ b_n γ^n.
// leaky: (u_0, u_1) = (0, x), x ≈ Σ b_n γ^{n+1}.
enum class GreStart { ideal, leaky };

struct GreConfig {
  double alpha = 2.0;
  double nu = 0.0;
  FlakyMode mode;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  int bits = 40;  // N; the stream holds b_0 .. b_N
  GreStart start = GreStart::leaky;

  void validate() const;
};

struct GreEncoding {
  Bitstream bits;              // b_0 .. b_N
  std::vector<double> states;  // u_0 .. u_{N+2}
  GreStart start = GreStart::leaky;
};

GreEncoding gre_encode(double x, const GreConfig& cfg, Rng& rng);

// Positive root of 1 - λ₁γ - λ₁λ₂γ² = 0.
double gamma_of_leaks(double lambda1, double lambda2);

// Equal leaks λ₁ = λ₂ = λ with gamma_of_leaks(λ, λ) = γ, for γ ∈ [φ⁻¹, 1).
double equal_leaks_for_gamma(double gamma);

// Σ_{n=0}^{N} b_n γ^{n+1}.
double gre_decode(const Bitstream& bits, double gamma, int n);
double gre_reconstruct(const GreEncoding& enc, double gamma, int n);

// (γ/(1-γ))γ^N.
double gre_error_bound(double gamma, int n);

struct ClosedInterval {
  double lo;
  double hi;
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool empty() const { return lo > hi; }
};

// [1.198 + 1.479ε, 2.053 - 1.058ε]; nullopt for ε > .337.
std::optional<ClosedInterval> admissible_alpha_range(double eps);

// Same range in the tolerance δ of the rescaled quantizer:
// [1.198(1+δ), 2.053 - .8568δ]; nullopt for δ > .4161.
std::optional<ClosedInterval> appendix_alpha_range(double delta);

struct RectangleGeometry {
  double eps1, eps2;
  double s1, s2;
  double h, d, l, r;
  double mu;
  double y_intercept;  // s₁⁻¹(ε₁+ε₂)(h - d)
  bool admissible;     // d > 0: the two rectangles overlap
};

RectangleGeometry stability_rectangle(double lambda1, double lambda2,
                                      double mu);

// Largest μ with d > 0, and the largest μ keeping the y-intercept ≥ 1.
double overlap_mu_limit(double lambda1, double lambda2);
double intercept_mu_limit(double lambda1, double lambda2);

// L(x,y) = N(x,y)/D(x,y) and U(x,y) of the rescaled amplifier bounds.
double alpha_lower_numerator(double x, double y, double delta);
double alpha_lower_denominator(double x, double y);
double alpha_upper(double x, double y, double delta);

struct AlphaBounds {
  double lower;  // L(ε₁, ε₂)
  double upper;  // U(ε₁, ε₁ + ε₂)
};
AlphaBounds alpha_bounds(double eps1, double eps2, double delta);

// δ at which U(ε₁(.9,.9), √5) meets N(φ, φ⁻¹)/D(ε₁(.9,.9), φ⁻¹).
double max_admissible_delta();

}  // namespace adq
