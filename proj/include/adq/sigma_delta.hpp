#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "adq/quantizers.hpp"
#include "adq/rng.hpp"

namespace adq {

enum class SdScheme { plain, finite_memory, asymmetric, chaotic, hybrid };

struct SdConfig {
  int order = 2;
  SdScheme scheme = SdScheme::plain;
  double rho = 1.0;        // finite_memory, asymmetric
  double expansion = 0.0;  // chaotic, hybrid
  double gamma = 0.2;      // linear-rule weight
  ScalarQuantizerSpec quantizer = ScalarQuantizerSpec::tri_level(0.5);
  double lambda1 = 1.0;  // integrator leaks applied to the stored u and v
  double lambda2 = 1.0;

  void validate() const;
};

struct SdState {
  double u = 0.0;
  double v = 0.0;  // unused by first-order schemes
};

inline constexpr double kDivergenceThreshold = 1e6;

// One clock of the configured recursion. For the hybrid scheme the reported
// q is mapped from {0,1} to {-1,1}.
SdState sd_step(const SdConfig& cfg, const SdState& s, double f, Rng& rng,
                QuantizerOutput* out);

struct OrbitTrace {
  SdState initial;
  std::vector<SdState> states;  // state after each step
  std::vector<QuantizerOutput> bits;
  std::vector<double> inputs;
  std::optional<std::size_t> diverged_at;  // step at which |u| or |v| > 1e6
};

// An empty f means zero input; otherwise f must hold at least `steps` values.
OrbitTrace sd_run(const SdConfig& cfg, std::span<const double> f,
                  const SdState& initial, std::size_t steps, Rng& rng);

// Zero-input map of the asymmetric scheme, M = A_γ ∘ D_(γ,ρ).
struct MapStep {
  SdState next;
  bool damped = false;  // D fired: u/γ + v > 0
  int b = 0;            // A branch: 1 → (u-1, u+v-1), 0 → (u, u+v), -1 → (u+1, u+v+1)
};
MapStep zero_input_step(double gamma, double rho, const SdState& s);

// A_γ alone.
MapStep affine_step(double gamma, const SdState& s);

enum class RegionKind {
  t, t_plus, t_minus,
  r, r1, r2,
  s,
  omega_h,
  s_plus, s_minus
};

struct RegionSpec {
  RegionKind kind = RegionKind::t;
  double gamma = 0.2;
  double alpha = 0.9;  // S
  double c = 40.0;     // S
  double eps = 1.0;    // Ω_h

  static RegionSpec of(RegionKind kind, double gamma) { return {kind, gamma}; }
  static RegionSpec stability(double alpha, double c) {
    return {RegionKind::s, 0.2, alpha, c};
  }
  static RegionSpec sublevel(double eps) {
    return {RegionKind::omega_h, 0.2, 0.9, 40.0, eps};
  }
};

bool region_contains(const RegionSpec& region, const SdState& s);

// Envelope functions of the stability region S.
double stability_b1(double alpha, double c, double u);
double stability_b2(double alpha, double c, double u);
double stability_constant_lower_bound(double alpha);

struct GammaRange {
  double lo, hi;
  bool empty() const { return lo > hi; }
};
// The printed γ window for S; may come out empty.
GammaRange stability_gamma_range(double alpha, double c);

// h = u² + |2v - u| = max(h⁺, h⁻).
double lyapunov_h(const SdState& s);
double lyapunov_h_plus(const SdState& s);
double lyapunov_h_minus(const SdState& s);

enum class Decision { yes, no, indeterminate };

struct QuietnessResult {
  Decision quiet = Decision::indeterminate;
  std::optional<std::size_t> settle_index;
  QuantizerOutput settled{};
};

// Quiet means the output is constant over a final run of at least min_tail
// steps after onset; traces with fewer than min_tail post-onset steps are
// indeterminate.
QuietnessResult quietness_test(const OrbitTrace& trace, std::size_t onset,
                               std::size_t min_tail = 1000);

struct TrappingReport {
  std::optional<std::size_t> entry_index;
  std::size_t post_entry_violations = 0;
  std::size_t alternation_violations = 0;
  std::size_t descent_checks = 0;      // steps taken outside T within S⁺
  std::size_t descent_violations = 0;  // h(Mx) ≥ h(x) on those steps
  std::optional<std::size_t> diverged_at;
  std::optional<std::size_t> settle_index;  // first step of the final (0,1) run
  SdState final_state;
  // u along successive visits to T⁺ after entry.
  std::size_t t_plus_visits = 0;
  std::size_t t_plus_increases = 0;  // u rose between consecutive visits
  std::size_t t_plus_non_rho = 0;    // ratio of consecutive visits ≠ ρ
  double last_t_plus_u = 0.0;
};

TrappingReport trapping_diagnostics(double gamma, double rho,
                                    const SdState& initial,
                                    std::size_t max_steps);

struct IdleToneResult {
  Decision periodic = Decision::indeterminate;
  std::optional<std::size_t> period;
};

IdleToneResult idle_tone_detect(std::span<const int> codes,
                                std::size_t max_period);

// One integer per (b,q) pair, for idle-tone detection on traces.
std::vector<int> output_codes(const OrbitTrace& trace);

}  // namespace adq
