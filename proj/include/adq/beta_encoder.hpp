#pragma once

#include <vector>

#include "adq/bitstream.hpp"
#include "adq/quantizers.hpp"
#include "adq/rng.hpp"

namespace adq {

// scaled: u_1 = βx, so x ≈ Σ_{j≥1} b_j β^{-j}.
// unscaled: u_1 = x, so x ≈ Σ_{j≥1} b_j γ^{j-1} with γ = 1/(λβ).
enum class BetaStart { scaled, unscaled };

struct BetaEncoderConfig {
  double beta = 1.8;
  double leak = 1.0;
  int bits = 20;
  ScalarQuantizerSpec quantizer = ScalarQuantizerSpec::sign();
  BetaStart start = BetaStart::unscaled;

  void validate() const;
};

struct BetaEncoding {
  Bitstream bits;
  std::vector<double> states;  // u_1 .. u_N
  BetaStart start = BetaStart::unscaled;
};

BetaEncoding beta_encode(double x, const BetaEncoderConfig& cfg, Rng& rng);

// Σ_{j=1}^{n} b_j γ^j.
double beta_decode(const Bitstream& bits, double gamma, int n);

// Decode honouring the start convention of the encoding.
double beta_reconstruct(const BetaEncoding& enc, double gamma, int n);

struct OpenInterval {
  double lo;
  double hi;
  bool contains(double x) const { return lo < x && x < hi; }
};

// β range of the robustness bound |x - Σ b_j β^{-j}| ≤ (ε+1)β^{-N}.
OpenInterval admissible_beta_range(double eps);

}  // namespace adq
