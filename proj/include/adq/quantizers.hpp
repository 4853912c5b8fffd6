#pragma once

#include "adq/rng.hpp"

namespace adq {

// What a flaky comparator does inside its unreliable zone.
enum class FlakyKind { ideal, always_plus, always_minus, coin, offset };

struct FlakyMode {
  FlakyKind kind = FlakyKind::ideal;
  double p = 0.5;      // coin: probability of +1
  double shift = 0.0;  // offset: added to the argument before taking the sign

  static FlakyMode ideal() { return {}; }
  static FlakyMode always_plus() { return {FlakyKind::always_plus}; }
  static FlakyMode always_minus() { return {FlakyKind::always_minus}; }
  static FlakyMode coin(double p) { return {FlakyKind::coin, p, 0.0}; }
  static FlakyMode offset(double s) { return {FlakyKind::offset, 0.5, s}; }

  void validate(double nu) const;
};

enum class QuantizerKind { sign, flaky_sign, tri_level, four_level };

struct ScalarQuantizerSpec {
  QuantizerKind kind = QuantizerKind::sign;
  double nu = 0.0;   // flaky_sign tolerance
  FlakyMode mode;    // flaky_sign zone behaviour
  double tau = 0.5;  // tri_level dead zone, four_level upper threshold 1/(2τ)

  static ScalarQuantizerSpec sign() { return {}; }
  static ScalarQuantizerSpec flaky_sign(double nu, FlakyMode mode) {
    return {QuantizerKind::flaky_sign, nu, mode, 0.5};
  }
  static ScalarQuantizerSpec tri_level(double tau) {
    return {QuantizerKind::tri_level, 0.0, {}, tau};
  }
  // τ = 1 gives the symmetric thresholds ±1/2.
  static ScalarQuantizerSpec four_level(double tau) {
    return {QuantizerKind::four_level, 0.0, {}, tau};
  }

  void validate() const;
};

// b is the output symbol; q is the damping flag of the four-level quantizer
// and 0 for every other kind.
struct QuantizerOutput {
  int b = 0;
  int q = 0;
  bool operator==(const QuantizerOutput&) const = default;
};

// Ideal sign with the convention Q(0) = -1.
inline int sign_quantize(double u) { return u > 0.0 ? 1 : -1; }

QuantizerOutput quantize_scalar(const ScalarQuantizerSpec& spec, double u,
                                Rng& rng);

// Two-input quantizer thresholding u + αv; the flaky strip is -ν ≤ u + αv < ν.
struct PlaneQuantizerSpec {
  double alpha = 2.0;
  double nu = 0.0;
  FlakyMode mode;

  void validate() const;
};

int quantize_plane(const PlaneQuantizerSpec& spec, double u, double v,
                   Rng& rng);

}  // namespace adq
