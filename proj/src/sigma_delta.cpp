#include "adq/sigma_delta.hpp"

#include <algorithm>
#include <cmath>

#include "adq/errors.hpp"

namespace adq {

void SdConfig::validate() const {
  if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2");
  if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0,1]");
  if (!(expansion >= 0.0)) throw ConfigError("expansion must be nonnegative");
  if (!(gamma > 0.0)) throw ConfigError("gamma must be positive");
  if (!(lambda1 > 0.0 && lambda1 <= 1.0 && lambda2 > 0.0 && lambda2 <= 1.0)) {
    throw ConfigError("leaks must lie in (0,1]");
  }
  if (order == 1 && scheme != SdScheme::plain &&
      scheme != SdScheme::finite_memory) {
    throw ConfigError("first order supports plain and finite-memory only");
  }
  const bool needs_four = scheme == SdScheme::asymmetric || scheme == SdScheme::hybrid;
  if (needs_four && quantizer.kind != QuantizerKind::four_level) {
    throw ConfigError("asymmetric and hybrid schemes need a four-level quantizer");
  }
  quantizer.validate();
}

SdState sd_step(const SdConfig& cfg, const SdState& s, double f, Rng& rng,
                QuantizerOutput* out) {
  const double u = cfg.lambda1 * s.u;
  const double v = cfg.lambda2 * s.v;
  const double rho = cfg.rho;
  const double g = cfg.gamma;
  QuantizerOutput q;
  SdState next;

  if (cfg.order == 1) {
    const double w = cfg.scheme == SdScheme::finite_memory ? rho * u : u;
    q = quantize_scalar(cfg.quantizer, w + f, rng);
    next.u = w + f - q.b;
  } else {
    switch (cfg.scheme) {
      case SdScheme::plain:
        q = quantize_scalar(cfg.quantizer, u + g * v, rng);
        next.u = u + f - q.b;
        next.v = v + next.u;
        break;
      case SdScheme::finite_memory:
        q = quantize_scalar(cfg.quantizer, rho * (u + g * v), rng);
        next.u = rho * u + f - q.b;
        next.v = rho * v + next.u;
        break;
      case SdScheme::asymmetric:
        q = quantize_scalar(cfg.quantizer, u / g + v, rng);
        next.u = u + q.q * (rho - 1.0) * u - q.b + f;
        next.v = v + q.q * (rho - 1.0) * v + next.u;
        break;
      case SdScheme::chaotic: {
        q = quantize_scalar(cfg.quantizer, u + g * v, rng);
        const double grow = 1.0 + cfg.expansion;
        next.u = grow * u + f - q.b;
        next.v = grow * v + next.u;
        break;
      }
      case SdScheme::hybrid:
        q = quantize_scalar(cfg.quantizer, u / g + v, rng);
        q.q = q.q == 0 ? -1 : 1;
        next.u = u + q.q * cfg.expansion * u - q.b + f;
        next.v = v + q.q * cfg.expansion * v + next.u;
        break;
    }
  }
  if (out != nullptr) *out = q;
  return next;
}

OrbitTrace sd_run(const SdConfig& cfg, std::span<const double> f,
                  const SdState& initial, std::size_t steps, Rng& rng) {
  cfg.validate();
  if (!f.empty() && f.size() < steps) {
    throw RangeError("input sequence shorter than the requested steps");
  }
  OrbitTrace trace;
  trace.initial = initial;
  trace.states.reserve(steps);
  trace.bits.reserve(steps);
  trace.inputs.reserve(steps);
  SdState s = initial;
  for (std::size_t n = 0; n < steps; ++n) {
    const double fn = f.empty() ? 0.0 : f[n];
    QuantizerOutput q;
    s = sd_step(cfg, s, fn, rng, &q);
    trace.states.push_back(s);
    trace.bits.push_back(q);
    trace.inputs.push_back(fn);
    if (!(std::abs(s.u) <= kDivergenceThreshold &&
          std::abs(s.v) <= kDivergenceThreshold)) {
      trace.diverged_at = n;
      break;
    }
  }
  return trace;
}

MapStep affine_step(double gamma, const SdState& s) {
  const double w = s.u / gamma + s.v;
  MapStep m;
  if (w > 0.5) {
    m.b = 1;
  } else if (w < -0.5) {
    m.b = -1;
  }
  m.next.u = s.u - m.b;
  m.next.v = s.u + s.v - m.b;
  return m;
}

MapStep zero_input_step(double gamma, double rho, const SdState& s) {
  SdState d = s;
  const bool damped = s.u / gamma + s.v > 0.0;
  if (damped) d = {rho * s.u, rho * s.v};
  MapStep m = affine_step(gamma, d);
  m.damped = damped;
  return m;
}

namespace {

bool in_t_plus(double g, const SdState& s) {
  const double w = s.u / g + s.v;
  return s.u > 0.0 && s.u < 1.0 && w >= -0.5 && w <= 0.5 + 1.0 / g;
}

bool in_t_minus(double g, const SdState& s) {
  const double w = s.u / g + s.v;
  return s.u > -1.0 && s.u <= 0.0 && w >= -(0.5 + 1.0 / g) && w <= 0.5;
}

bool in_r1(double g, const SdState& s) {
  return s.u + g * s.v >= 0.0 && 2.0 * s.v + s.u <= 1.0 && s.u <= 0.5;
}

bool in_r2(double g, const SdState& s) {
  return s.u + g * s.v < 0.0 && 2.0 * s.v + s.u >= -1.0 && s.u >= -0.5;
}

}  // namespace

bool region_contains(const RegionSpec& region, const SdState& s) {
  const double g = region.gamma;
  switch (region.kind) {
    case RegionKind::t:
      return in_t_plus(g, s) || in_t_minus(g, s);
    case RegionKind::t_plus:
      return in_t_plus(g, s);
    case RegionKind::t_minus:
      return in_t_minus(g, s);
    case RegionKind::r:
      return in_r1(g, s) || in_r2(g, s);
    case RegionKind::r1:
      return in_r1(g, s);
    case RegionKind::r2:
      return in_r2(g, s);
    case RegionKind::s:
      return s.v <= stability_b1(region.alpha, region.c, s.u) &&
             s.v >= stability_b2(region.alpha, region.c, s.u);
    case RegionKind::omega_h:
      return lyapunov_h(s) <= region.eps;
    case RegionKind::s_plus:
      return s.u + g * s.v >= 0.0;
    case RegionKind::s_minus:
      return s.u + g * s.v < 0.0;
  }
  return false;
}

double stability_b1(double alpha, double c, double u) {
  const double k = u >= 0.0 ? 1.0 - alpha : 1.0 + alpha;
  return -u * u / (2.0 * k) + u / 2.0 + c;
}

double stability_b2(double alpha, double c, double u) {
  const double k = u >= 0.0 ? 1.0 + alpha : 1.0 - alpha;
  return u * u / (2.0 * k) + u / 2.0 - c;
}

double stability_constant_lower_bound(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in [0,1)");
  return 1.0 / (2.0 - 2.0 * alpha * alpha) +
         (12.0 + 9.0 * (1.0 + alpha)) / (8.0 * (1.0 - alpha));
}

GammaRange stability_gamma_range(double alpha, double c) {
  const double a1 = 1.0 + alpha;
  const double root = std::sqrt(2.0 * c * (1.0 - alpha * alpha));
  return {(2.0 * root - a1) / (root + 2.0 * alpha * c),
          4.0 * a1 * (a1 + 2.0) / (8.0 * c * a1 - a1 - 4.0)};
}

double lyapunov_h_plus(const SdState& s) { return s.u * s.u + 2.0 * s.v - s.u; }
double lyapunov_h_minus(const SdState& s) { return s.u * s.u - 2.0 * s.v + s.u; }
double lyapunov_h(const SdState& s) {
  return s.u * s.u + std::abs(2.0 * s.v - s.u);
}

QuietnessResult quietness_test(const OrbitTrace& trace, std::size_t onset,
                               std::size_t min_tail) {
  QuietnessResult res;
  const std::size_t n = trace.bits.size();
  if (trace.diverged_at || onset >= n || n - onset < std::max<std::size_t>(min_tail, 1)) {
    return res;
  }
  std::size_t start = n - 1;
  while (start > onset && trace.bits[start - 1] == trace.bits[n - 1]) --start;
  res.quiet = n - start >= min_tail ? Decision::yes : Decision::no;
  if (res.quiet == Decision::yes) {
    res.settle_index = start;
    res.settled = trace.bits[n - 1];
  }
  return res;
}

TrappingReport trapping_diagnostics(double gamma, double rho,
                                    const SdState& initial,
                                    std::size_t max_steps) {
  if (!(gamma > 0.0 && rho > 0.0 && rho <= 1.0)) {
    throw ConfigError("need gamma > 0 and rho in (0,1]");
  }
  const RegionSpec t = RegionSpec::of(RegionKind::t, gamma);
  const RegionSpec tp = RegionSpec::of(RegionKind::t_plus, gamma);
  TrappingReport rep;
  SdState s = initial;
  if (region_contains(t, s)) rep.entry_index = 0;
  int prev_b = 0;
  bool have_prev_b = false;
  bool have_tp = false;
  double tp_u = 0.0;
  bool quiet_run = false;

  bool in_t = region_contains(t, s);
  for (std::size_t n = 0; n < max_steps; ++n) {
    const MapStep m = zero_input_step(gamma, rho, s);
    const bool next_in_t = region_contains(t, m.next);

    if (in_t) {
      if (region_contains(tp, s)) {
        ++rep.t_plus_visits;
        if (have_tp) {
          if (s.u > tp_u + 1e-12) ++rep.t_plus_increases;
          if (std::abs(s.u - rho * tp_u) > 1e-12) ++rep.t_plus_non_rho;
        }
        have_tp = true;
        tp_u = s.u;
        rep.last_t_plus_u = s.u;
      }
      if (have_prev_b && ((prev_b == 1 && m.b == 1) || (prev_b == -1 && m.b == -1))) {
        ++rep.alternation_violations;
      }
      prev_b = m.b;
      have_prev_b = true;
      if (!next_in_t) ++rep.post_entry_violations;
    } else if (s.u + gamma * s.v > 0.0) {
      ++rep.descent_checks;
      if (!next_in_t && !(lyapunov_h(m.next) < lyapunov_h(s))) {
        ++rep.descent_violations;
      }
    }

    const bool settled_step = m.b == 0 && m.damped;  // output (0,1)
    if (settled_step && !quiet_run) rep.settle_index = n;
    quiet_run = settled_step;
    if (!settled_step) rep.settle_index.reset();

    s = m.next;
    in_t = next_in_t;
    if (!rep.entry_index && in_t) rep.entry_index = n + 1;
    if (!(std::abs(s.u) <= kDivergenceThreshold &&
          std::abs(s.v) <= kDivergenceThreshold)) {
      rep.diverged_at = n;
      break;
    }
  }
  rep.final_state = s;
  return rep;
}

IdleToneResult idle_tone_detect(std::span<const int> codes,
                                std::size_t max_period) {
  if (max_period < 1) throw ConfigError("max_period must be at least 1");
  IdleToneResult res;
  const std::size_t window = 10 * max_period;
  const std::size_t n = codes.size();
  if (n < window) return res;
  for (std::size_t p = 1; p <= max_period; ++p) {
    bool ok = true;
    for (std::size_t i = n - window + p; i < n && ok; ++i) {
      ok = codes[i] == codes[i - p];
    }
    if (ok) {
      res.periodic = Decision::yes;
      res.period = p;
      return res;
    }
  }
  res.periodic = Decision::no;
  return res;
}

std::vector<int> output_codes(const OrbitTrace& trace) {
  std::vector<int> codes;
  codes.reserve(trace.bits.size());
  for (const auto& q : trace.bits) codes.push_back(3 * (q.b + 1) + (q.q + 1));
  return codes;
}

}  // namespace adq
