#include "adq/quantizers.hpp"

#include <cmath>

#include "adq/errors.hpp"

namespace adq {

void FlakyMode::validate(double nu) const {
  if (kind == FlakyKind::coin && !(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("coin probability must lie in [0,1]");
  }
  if (kind == FlakyKind::offset && !(std::abs(shift) <= nu)) {
    throw ConfigError("offset shift exceeds the declared tolerance");
  }
}

void ScalarQuantizerSpec::validate() const {
  if (!(nu >= 0.0)) throw ConfigError("tolerance nu must be nonnegative");
  if (!(tau > 0.0)) throw ConfigError("threshold tau must be positive");
  if (kind == QuantizerKind::flaky_sign) mode.validate(nu);
}

void PlaneQuantizerSpec::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (!(nu >= 0.0)) throw ConfigError("tolerance nu must be nonnegative");
  mode.validate(nu);
}

namespace {

// Output of a flaky comparator for an argument w already known to be inside
// its zone. `plus_at_zero` selects the boundary convention of the ideal rule.
int flaky_zone_value(const FlakyMode& mode, double w, bool plus_at_zero,
                     Rng& rng) {
  switch (mode.kind) {
    case FlakyKind::ideal:
      return plus_at_zero ? (w >= 0.0 ? 1 : -1) : sign_quantize(w);
    case FlakyKind::always_plus:
      return 1;
    case FlakyKind::always_minus:
      return -1;
    case FlakyKind::coin:
      return rng.bernoulli(mode.p) ? 1 : -1;
    case FlakyKind::offset: {
      const double s = w + mode.shift;
      return plus_at_zero ? (s >= 0.0 ? 1 : -1) : sign_quantize(s);
    }
  }
  return sign_quantize(w);
}

}  // namespace

QuantizerOutput quantize_scalar(const ScalarQuantizerSpec& spec, double u,
                                Rng& rng) {
  if (!std::isfinite(u)) throw DomainError("quantizer input is not finite");
  switch (spec.kind) {
    case QuantizerKind::sign:
      return {sign_quantize(u), 0};
    case QuantizerKind::flaky_sign:
      if (std::abs(u) > spec.nu) return {sign_quantize(u), 0};
      return {flaky_zone_value(spec.mode, u, false, rng), 0};
    case QuantizerKind::tri_level:
      if (u > spec.tau) return {1, 0};
      if (u < -spec.tau) return {-1, 0};
      return {0, 0};
    case QuantizerKind::four_level:
      if (u <= -0.5) return {-1, 0};
      if (u <= 0.0) return {0, 0};
      if (u <= 1.0 / (2.0 * spec.tau)) return {0, 1};
      return {1, 1};
  }
  return {sign_quantize(u), 0};
}

int quantize_plane(const PlaneQuantizerSpec& spec, double u, double v,
                   Rng& rng) {
  if (!std::isfinite(u) || !std::isfinite(v)) {
    throw DomainError("quantizer input is not finite");
  }
  const double w = u + spec.alpha * v;
  if (w < -spec.nu) return -1;
  if (w >= spec.nu) return 1;
  return flaky_zone_value(spec.mode, w, true, rng);
}

}  // namespace adq
