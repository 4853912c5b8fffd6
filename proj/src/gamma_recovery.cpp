#include "adq/gamma_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adq/errors.hpp"

namespace adq {

SignedTernaryPolynomial::SignedTernaryPolynomial(std::vector<int> coeffs)
    : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty() || (coeffs_[0] != 1 && coeffs_[0] != -1)) {
    throw DomainError("constant coefficient must be +1 or -1");
  }
  for (int c : coeffs_) {
    if (c < -1 || c > 1) throw DomainError("coefficients must lie in {-1,0,1}");
  }
}

double SignedTernaryPolynomial::operator()(double t) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

double SignedTernaryPolynomial::derivative(double t) const {
  double acc = 0.0;
  for (std::size_t i = coeffs_.size(); i-- > 1;) {
    acc = acc * t + static_cast<double>(i) * coeffs_[i];
  }
  return acc;
}

int SignedTernaryPolynomial::sign_changes(double lo, double hi,
                                          int samples) const {
  int changes = 0;
  double prev = (*this)(lo);
  for (int i = 1; i <= samples; ++i) {
    const double v = (*this)(lo + (hi - lo) * i / samples);
    if (v == 0.0) continue;
    if (prev != 0.0 && (v > 0.0) != (prev > 0.0)) ++changes;
    prev = v;
  }
  return changes;
}

std::optional<double> tabulated_delta(double gamma_high) {
  if (gamma_high <= 0.63) return 0.07;
  return std::nullopt;
}

void RecoveryConfig::validate() const {
  if (!(gamma_low > 0.5 && gamma_low <= gamma_high &&
        gamma_high <= kUniqueRootBound)) {
    throw ConfigError("need .5 < gamma_low <= gamma_high <= .6491");
  }
  if (delta && !(*delta > 0.0)) throw ConfigError("delta must be positive");
  if (newton_steps < 1) throw ConfigError("newton_steps must be positive");
}

std::optional<double> RecoveryConfig::effective_delta() const {
  return delta ? delta : tabulated_delta(gamma_high);
}

namespace {

double bisect(const SignedTernaryPolynomial& p, double lo, double hi) {
  double plo = p(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double pm = p(mid);
    if (pm == 0.0) return mid;
    if ((pm > 0.0) == (plo > 0.0)) {
      lo = mid;
      plo = pm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

RootResult newton_first_root(const SignedTernaryPolynomial& p,
                             const RecoveryConfig& cfg) {
  cfg.validate();
  if (p.degree() < 1) throw DomainError("polynomial must be nonconstant");
  const double tol = std::pow(cfg.gamma_low, p.degree());

  double x = cfg.x0;
  for (int k = 0; k < cfg.newton_steps; ++k) {
    const double d = p.derivative(x);
    if (d == 0.0) throw SingularStepError("zero derivative in Newton step", k);
    x -= p(x) / d;
    if (!std::isfinite(x)) break;
  }

  RootResult out;
  out.estimate = x;
  out.residual = std::isfinite(x) ? std::abs(p(x)) : INFINITY;
  const bool inside = x >= 0.0 && x <= kUniqueRootBound;
  if (inside && out.residual <= tol) {
    out.status = RootStatus::certified;
    return out;
  }
  const double p0 = p(0.0);
  const double p1 = p(kUniqueRootBound);
  if ((p0 > 0.0) != (p1 > 0.0) || p1 == 0.0) {
    out.estimate = bisect(p, 0.0, kUniqueRootBound);
    out.residual = std::abs(p(out.estimate));
    out.used_bisection = true;
    out.status = out.residual <= tol ? RootStatus::certified
                                     : RootStatus::no_certified_root;
  }
  return out;
}

PairDifference pair_difference_stream(const Bitstream& b, const Bitstream& c) {
  if (b.size() != c.size()) throw ConfigError("pair streams differ in length");
  if (b.alphabet != Alphabet::pm1 || c.alphabet != Alphabet::pm1) {
    throw ConfigError("pair streams must use the pm1 alphabet");
  }
  std::size_t k = 0;
  while (k < b.size() && b[k] + c[k] == 0) ++k;
  if (k == b.size()) {
    throw DegeneratePairError(
        "b = -c identically; the pair method needs a flaky quantizer");
  }
  PairDifference out;
  out.offset = static_cast<int>(k);
  out.bar_d.bits.reserve(b.size() - k);
  for (std::size_t j = k; j < b.size(); ++j) {
    out.bar_d.bits.push_back((b[j] + c[j]) / 2);
  }
  return out;
}

Certificate recover_gamma(const Bitstream& b, const Bitstream* c,
                          const RecoveryConfig& cfg, int n) {
  cfg.validate();
  if (n < 1) throw RangeError("N must be positive");
  const std::vector<int>* source = &b.bits;
  PairDifference pair;
  if (c != nullptr) {
    pair = pair_difference_stream(b, *c);
    source = &pair.bar_d.bits;
  }
  if (source->size() < static_cast<std::size_t>(n) + 1) {
    throw RangeError("stream too short for the requested N");
  }
  const SignedTernaryPolynomial p(
      std::vector<int>(source->begin(), source->begin() + n + 1));
  const RootResult root = newton_first_root(p, cfg);

  Certificate cert;
  cert.estimate = root.estimate;
  cert.residual = root.residual;
  const auto delta = cfg.effective_delta();
  if (delta) {
    cert.bound = std::pow(cfg.gamma_high, n) / (*delta * (1.0 - cfg.gamma_high));
  }
  if (root.status != RootStatus::certified) {
    cert.reason = "no certified root";
  } else if (root.estimate < cfg.gamma_low || root.estimate > cfg.gamma_high) {
    cert.reason = "root outside [gamma_low, gamma_high]";
  } else if (root.residual > std::pow(cfg.gamma_low, n)) {
    cert.reason = "residual above gamma_low^N";
  } else if (!delta) {
    cert.reason = "no transversality constant tabulated for gamma_high";
  } else {
    cert.certified = true;
  }
  return cert;
}

int certified_threshold_N(double gamma_high, double eps, double delta) {
  if (!(gamma_high > 0.0 && gamma_high < 1.0)) {
    throw DomainError("gamma_high must lie in (0,1)");
  }
  if (!(eps > 0.0 && delta > 0.0)) {
    throw DomainError("eps and delta must be positive");
  }
  const double target = (1.0 - gamma_high) * eps * delta;
  int n = 0;
  double power = gamma_high;  // γ^{n+1}
  while (power > target) {
    power *= gamma_high;
    ++n;
  }
  return n;
}

PhiStructureReport phi_structure_check(const Bitstream& bits) {
  PhiStructureReport rep;
  const std::size_t triples = bits.size() / 3;
  if (triples == 0) return rep;
  rep.pattern_ok = true;
  for (std::size_t j = 0; j < triples; ++j) {
    const int b0 = bits[3 * j];
    if (b0 == 0 || bits[3 * j + 1] != -b0 || bits[3 * j + 2] != -b0) {
      rep.pattern_ok = false;
    }
  }

  auto p_at = [&](double t) {
    return power_sum(bits.bits, 0, 3 * triples, t, 0);
  };
  auto r_at = [&](double t) {
    const double t3 = t * t * t;
    double acc = 0.0;
    for (std::size_t j = triples; j-- > 0;) acc = acc * t3 + bits[3 * j];
    return acc;
  };

  const double root = 1.0 / std::numbers::phi;
  constexpr int kGrid = 400;
  rep.r_bound_ok = true;
  for (int i = 0; i < kGrid; ++i) {
    const double t = root * i / kGrid;
    const double t3 = t * t * t;
    const double r = r_at(t);
    if (std::abs(r) < 1.0 - t3 / (1.0 - t3) - 1e-12) rep.r_bound_ok = false;
    const double resid = std::abs(p_at(t) - (1.0 - t - t * t) * r);
    rep.factorization_residual = std::max(rep.factorization_residual, resid);
  }

  double dp = 0.0;
  for (std::size_t i = 3 * triples; i-- > 1;) {
    dp = dp * root + static_cast<double>(i) * bits[i];
  }
  rep.derivative_at_root = dp;
  rep.derivative_ok = std::abs(dp) >= 1.545;
  return rep;
}

}  // namespace adq
