#include "adq/beta_encoder.hpp"

#include <cmath>

#include "adq/errors.hpp"

namespace adq {

void BetaEncoderConfig::validate() const {
  if (!(beta > 1.0 && beta <= 2.0)) throw ConfigError("beta must lie in (1,2]");
  if (!(leak > 0.0 && leak <= 1.0)) throw ConfigError("leak must lie in (0,1]");
  if (!(leak * beta > 1.0)) throw ConfigError("leak * beta must exceed 1");
  if (bits < 1) throw ConfigError("bit budget must be positive");
  if (quantizer.kind != QuantizerKind::sign &&
      quantizer.kind != QuantizerKind::flaky_sign) {
    throw ConfigError("beta encoder needs a two-level quantizer");
  }
  quantizer.validate();
}

BetaEncoding beta_encode(double x, const BetaEncoderConfig& cfg, Rng& rng) {
  cfg.validate();
  if (!(std::abs(x) <= 1.0)) throw DomainError("beta_encode needs |x| <= 1");
  BetaEncoding enc;
  enc.start = cfg.start;
  enc.bits.bits.reserve(cfg.bits);
  enc.states.reserve(cfg.bits);
  const double gain = cfg.leak * cfg.beta;
  double u = cfg.start == BetaStart::scaled ? cfg.beta * x : x;
  for (int j = 0; j < cfg.bits; ++j) {
    const int b = quantize_scalar(cfg.quantizer, u, rng).b;
    enc.bits.bits.push_back(b);
    enc.states.push_back(u);
    u = gain * (u - b);
  }
  return enc;
}

double beta_decode(const Bitstream& bits, double gamma, int n) {
  if (n < 0 || static_cast<std::size_t>(n) > bits.size()) {
    throw RangeError("decode length exceeds the stream");
  }
  return power_sum(bits.bits, 0, n, gamma, 1);
}

double beta_reconstruct(const BetaEncoding& enc, double gamma, int n) {
  const double s = beta_decode(enc.bits, gamma, n);
  return enc.start == BetaStart::scaled ? s : s / gamma;
}

OpenInterval admissible_beta_range(double eps) {
  if (!(eps >= 0.0)) throw DomainError("tolerance must be nonnegative");
  return {1.0, (2.0 + eps) / (eps + 1.0)};
}

}  // namespace adq
