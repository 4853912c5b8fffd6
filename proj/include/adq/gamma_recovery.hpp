#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adq/bitstream.hpp"

namespace adq {

// Upper end of the interval on which class-B power series have at most one
// root, and that root is simple.
inline constexpr double kUniqueRootBound = 0.6491;

// c_0 + c_1 t + ... + c_n t^n with c_i ∈ {-1,0,1} and c_0 = ±1.
class SignedTernaryPolynomial {
 public:
  explicit SignedTernaryPolynomial(std::vector<int> coeffs);

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<int>& coeffs() const { return coeffs_; }

  double operator()(double t) const;
  double derivative(double t) const;
  int sign_changes(double lo, double hi, int samples) const;

 private:
  std::vector<int> coeffs_;
};

// Tabulated transversality constant; none is available above .63.
std::optional<double> tabulated_delta(double gamma_high);

struct RecoveryConfig {
  double gamma_low = 0.6;
  double gamma_high = 0.63;
  std::optional<double> delta;  // defaults to tabulated_delta(gamma_high)
  int newton_steps = 10;
  double x0 = 0.618;

  void validate() const;
  std::optional<double> effective_delta() const;
};

enum class RootStatus { certified, no_certified_root };

struct RootResult {
  double estimate = 0.0;
  double residual = 0.0;  // |P(estimate)|
  RootStatus status = RootStatus::no_certified_root;
  bool used_bisection = false;
};

// Newton from cfg.x0 for cfg.newton_steps steps; if Newton leaves
// [0, .6491] or misses the residual tolerance γ_low^n while P changes sign on
// that interval, bisection takes over. Throws SingularStepError on P'(x_k)=0.
RootResult newton_first_root(const SignedTernaryPolynomial& p,
                             const RecoveryConfig& cfg);

struct PairDifference {
  Bitstream bar_d;  // over {-1,0,1}, first entry ±1
  int offset = 0;   // k: index of the first nonzero d
};

// d_j = b_j + c_j, shifted past its leading zeros and halved.
PairDifference pair_difference_stream(const Bitstream& b, const Bitstream& c);

struct Certificate {
  double estimate = 0.0;
  double residual = 0.0;
  double bound = 0.0;  // C₂ γ_high^N, C₂ = 1/(δ(1 - γ_high)); 0 without δ
  bool certified = false;
  std::string reason;  // why certification was refused, empty otherwise
};

// Builds P_N from the first N+1 symbols of b (or of the pair difference when
// c is given) and solves for its first root.
Certificate recover_gamma(const Bitstream& b, const Bitstream* c,
                          const RecoveryConfig& cfg, int n);

// Smallest N with γ_high^{N+1} ≤ (1 - γ_high)εδ.
int certified_threshold_N(double gamma_high, double eps, double delta);

struct PhiStructureReport {
  bool pattern_ok = false;       // b_{3j+1} = b_{3j+2} = -b_{3j}
  bool r_bound_ok = false;       // |R_N(t)| ≥ 1 - t³/(1-t³) on [0, φ⁻¹)
  bool derivative_ok = false;    // |P_N'(φ⁻¹)| ≥ 1.545
  double factorization_residual = 0.0;  // max |P - (1-t-t²)R| on the grid
  double derivative_at_root = 0.0;
  bool verdict() const { return pattern_ok && r_bound_ok && derivative_ok; }
};

PhiStructureReport phi_structure_check(const Bitstream& bits);

}  // namespace adq
