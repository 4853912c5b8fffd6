#include "adq/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "adq/beta_encoder.hpp"
#include "adq/errors.hpp"
#include "adq/sigma_delta.hpp"

namespace adq {

using std::numbers::pi;

TestSignal::TestSignal(Kind kind, std::vector<Term> terms, double peak)
    : kind_(kind), terms_(std::move(terms)), peak_(peak) {
  if (!(peak >= 0.0 && peak < 1.0)) throw DomainError("peak must lie in [0,1)");
  double total = 0.0;
  for (const auto& t : terms_) total += std::abs(t.amplitude);
  if (kind_ == Kind::trig_polynomial) {
    for (const auto& t : terms_) {
      if (!(std::abs(t.omega_or_shift) < pi)) {
        throw DomainError("trig frequencies must lie inside (-pi, pi)");
      }
    }
  }
  if (total > 0.0) {
    for (auto& t : terms_) t.amplitude *= peak / total;
  }
}

TestSignal TestSignal::trig_polynomial(std::vector<Term> terms, double peak) {
  return TestSignal(Kind::trig_polynomial, std::move(terms), peak);
}

TestSignal TestSignal::sinc_sum(std::vector<Term> terms, double peak) {
  return TestSignal(Kind::sinc_sum, std::move(terms), peak);
}

TestSignal TestSignal::zero() { return TestSignal(Kind::trig_polynomial, {}, 0.0); }

double TestSignal::operator()(double t) const {
  double acc = 0.0;
  for (const auto& term : terms_) {
    if (kind_ == Kind::trig_polynomial) {
      acc += term.amplitude * std::cos(term.omega_or_shift * t + term.phase);
    } else {
      const double s = t - term.omega_or_shift;
      acc += term.amplitude * (s == 0.0 ? 1.0 : std::sin(pi * s) / (pi * s));
    }
  }
  return acc;
}

std::vector<double> sample(const TestSignal& f, double lambda,
                           std::int64_t first, std::size_t count) {
  if (!(lambda >= 1.0)) throw DomainError("oversampling ratio must be >= 1");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = f(static_cast<double>(first + static_cast<std::int64_t>(i)) / lambda);
  }
  return out;
}

ReconstructionFilter::ReconstructionFilter(double stopband, double tolerance)
    : center_((pi + stopband) / 2.0),
      halfwidth_((stopband - pi) / 2.0),
      stopband_(stopband) {
  if (!(stopband > pi)) throw DomainError("stopband must exceed pi");
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
  // tail_bound(R) = -log(1 - π²/(4w²R²))/π, solved for R.
  const double k = -std::expm1(-pi * tolerance);
  radius_ = pi / (2.0 * halfwidth_ * std::sqrt(k));
}

double ReconstructionFilter::spectrum(double omega) const {
  const double a = std::abs(omega);
  if (a <= pi) return 1.0;
  if (a >= stopband_) return 0.0;
  return 0.5 * (1.0 + std::cos(pi * (a - pi) / (2.0 * halfwidth_)));
}

namespace {

// cos(w s)/(1 - y²) with y = 2w|s|/π, rewritten near y = 1 through
// cos(πy/2) = sin(π(1-y)/2) so the removable singularity is harmless.
double rolloff_factor(double w, double s) {
  const double y = 2.0 * w * std::abs(s) / pi;
  const double a = 1.0 - y;
  if (std::abs(a) < 1e-3) {
    const double x = pi * a / 2.0;
    const double sinc = x == 0.0 ? 1.0 : std::sin(x) / x;
    return (pi / 2.0) * sinc / (1.0 + y);
  }
  return std::cos(w * s) / (1.0 - y * y);
}

}  // namespace

double ReconstructionFilter::operator()(double t) const {
  const double lead = t == 0.0 ? center_ / pi : std::sin(center_ * t) / (pi * t);
  return lead * rolloff_factor(halfwidth_, t);
}

double ReconstructionFilter::tail_bound(double radius) const {
  const double x = pi * pi / (4.0 * halfwidth_ * halfwidth_ * radius * radius);
  if (!(x < 1.0)) return INFINITY;
  return -std::log1p(-x) / pi;
}

Reconstruction reconstruct(const std::vector<double>& coeffs,
                           std::int64_t first, const ReconstructionFilter& g,
                           double lambda, double t) {
  if (!(lambda >= 1.0)) throw DomainError("oversampling ratio must be >= 1");
  if (g.stopband() > lambda * pi + 1e-12) {
    throw DomainError("filter stopband exceeds lambda * pi");
  }
  const double radius = g.radius();
  const auto lo = static_cast<std::int64_t>(std::ceil(lambda * (t - radius)));
  const auto hi = static_cast<std::int64_t>(std::floor(lambda * (t + radius)));
  const std::int64_t last = first + static_cast<std::int64_t>(coeffs.size()) - 1;
  if (lo < first || hi > last) {
    throw RangeError("coefficient window does not cover the filter radius");
  }

  // Phasor recurrences for sin/cos of c·s and w·s as s = t - n/λ steps by
  // -1/λ, resynchronised every few hundred terms.
  const double c = (pi + g.stopband()) / 2.0;
  const double w = (g.stopband() - pi) / 2.0;
  const double dc_cos = std::cos(c / lambda), dc_sin = -std::sin(c / lambda);
  const double dw_cos = std::cos(w / lambda), dw_sin = -std::sin(w / lambda);
  const double singular = pi / (2.0 * w);

  double acc = 0.0;
  double cmax = 0.0;
  double sc = 0.0, cc = 1.0, sw = 0.0, cw = 1.0;
  for (std::int64_t n = lo; n <= hi; ++n) {
    const double s = t - static_cast<double>(n) / lambda;
    if ((n - lo) % 256 == 0) {
      sc = std::sin(c * s);
      cc = std::cos(c * s);
      sw = std::sin(w * s);
      cw = std::cos(w * s);
    }
    const double cn = coeffs[static_cast<std::size_t>(n - first)];
    cmax = std::max(cmax, std::abs(cn));
    double k;
    if (std::abs(s) < 1e-6 || std::abs(std::abs(s) - singular) < 1e-3 * singular) {
      k = g(s);
    } else {
      const double y = s / singular;
      k = sc / (pi * s) * cw / (1.0 - y * y);
    }
    acc += cn * k;
    // advance s by -1/λ
    const double sc2 = sc * dc_cos + cc * dc_sin;
    const double cc2 = cc * dc_cos - sc * dc_sin;
    const double sw2 = sw * dw_cos + cw * dw_sin;
    const double cw2 = cw * dw_cos - sw * dw_sin;
    sc = sc2;
    cc = cc2;
    sw = sw2;
    cw = cw2;
  }
  for (std::int64_t n = std::max(first, lo - 1); n <= std::min(last, hi + 1); ++n) {
    cmax = std::max(cmax, std::abs(coeffs[static_cast<std::size_t>(n - first)]));
  }
  return {acc / lambda, cmax * g.tail_bound(radius - 1.0 / lambda)};
}

Pipeline parse_pipeline(const std::string& name) {
  if (name == "pcm") return Pipeline::pcm;
  if (name == "beta") return Pipeline::beta;
  if (name == "sd1") return Pipeline::sd1;
  if (name == "sd2-finite") return Pipeline::sd2_finite;
  if (name == "sd2-asymmetric") return Pipeline::sd2_asymmetric;
  throw ConfigError("unknown pipeline: " + name);
}

std::string pipeline_name(Pipeline p) {
  switch (p) {
    case Pipeline::pcm: return "pcm";
    case Pipeline::beta: return "beta";
    case Pipeline::sd1: return "sd1";
    case Pipeline::sd2_finite: return "sd2-finite";
    case Pipeline::sd2_asymmetric: return "sd2-asymmetric";
  }
  return "?";
}

namespace {

bool is_sigma_delta(Pipeline p) {
  return p == Pipeline::sd1 || p == Pipeline::sd2_finite ||
         p == Pipeline::sd2_asymmetric;
}

DistortionPoint run_budget(Pipeline pipeline, const TestSignal& f,
                           double budget, const DistortionOptions& opt) {
  const double lambda = is_sigma_delta(pipeline) ? budget : opt.lambda;
  const ReconstructionFilter g(opt.stopband);
  const double half = opt.half_window / 2.0;
  const auto first =
      static_cast<std::int64_t>(std::floor(lambda * (-half - g.radius()))) - 2;
  const auto last =
      static_cast<std::int64_t>(std::ceil(lambda * (half + g.radius()))) + 2;
  const auto count = static_cast<std::size_t>(last - first + 1);
  const std::vector<double> samples = sample(f, lambda, first, count);

  DistortionPoint point{budget, 0.0, false};
  std::vector<double> coeffs(count);
  Rng rng(opt.seed);

  if (pipeline == Pipeline::pcm || pipeline == Pipeline::beta) {
    BetaEncoderConfig cfg;
    cfg.beta = pipeline == Pipeline::pcm ? 2.0 : opt.beta;
    cfg.bits = static_cast<int>(budget);
    cfg.start = BetaStart::scaled;
    for (std::size_t i = 0; i < count; ++i) {
      const BetaEncoding enc = beta_encode(samples[i], cfg, rng);
      coeffs[i] = beta_reconstruct(enc, 1.0 / cfg.beta, cfg.bits);
    }
  } else {
    SdConfig cfg;
    if (pipeline == Pipeline::sd1) {
      cfg.order = 1;
      cfg.scheme = SdScheme::plain;
      cfg.quantizer = ScalarQuantizerSpec::sign();
    } else if (pipeline == Pipeline::sd2_finite) {
      cfg.scheme = SdScheme::finite_memory;
      cfg.rho = 1.0 - 1.0 / lambda;
      cfg.gamma = opt.sd_gamma;
      cfg.quantizer = ScalarQuantizerSpec::tri_level(opt.tri_tau);
    } else {
      cfg.scheme = SdScheme::asymmetric;
      cfg.rho = 1.0 - 1.0 / lambda;
      cfg.gamma = opt.sd_gamma;
      cfg.quantizer = ScalarQuantizerSpec::four_level(cfg.rho);
    }
    const OrbitTrace trace = sd_run(cfg, samples, SdState{}, count, rng);
    if (trace.diverged_at) {
      point.diverged = true;
      point.sup_error = INFINITY;
      return point;
    }
    for (std::size_t i = 0; i < count; ++i) coeffs[i] = trace.bits[i].b;
  }

  for (int i = 0; i < opt.grid_points; ++i) {
    const double t = -half + 2.0 * half * (i + 0.5) / opt.grid_points;
    const double err = std::abs(reconstruct(coeffs, first, g, lambda, t).value - f(t));
    point.sup_error = std::max(point.sup_error, err);
  }
  return point;
}

}  // namespace

std::vector<DistortionPoint> distortion_curve(Pipeline pipeline,
                                              const TestSignal& f,
                                              const std::vector<double>& budgets,
                                              const DistortionOptions& opt) {
  if (!std::is_sorted(budgets.begin(), budgets.end())) {
    throw ConfigError("budgets must be sorted ascending");
  }
  std::vector<DistortionPoint> curve;
  curve.reserve(budgets.size());
  for (double b : budgets) curve.push_back(run_budget(pipeline, f, b, opt));
  return curve;
}

double log2_slope(const std::vector<DistortionPoint>& curve) {
  const double n = static_cast<double>(curve.size());
  if (curve.size() < 2) throw ConfigError("need at least two points for a slope");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : curve) {
    const double x = std::log2(p.budget);
    const double y = std::log2(p.sup_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace adq
