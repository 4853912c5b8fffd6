#include "adq/xlab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "adq/cs_cv.hpp"
#include "adq/errors.hpp"
#include "adq/gamma_recovery.hpp"
#include "adq/gre.hpp"
#include "adq/sampling.hpp"
#include "adq/sigma_delta.hpp"

namespace adq {

namespace {

using json = nlohmann::ordered_json;

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string fmt(int x) { return std::to_string(x); }
std::string fmt(std::size_t x) { return std::to_string(x); }

// JSON-safe number: non-finite values become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

class Params {
 public:
  explicit Params(const ParamMap& m) : m_(m) {}

  const std::string& str(const std::string& key) const { return m_.at(key); }

  double real(const std::string& key) const {
    const std::string& s = str(key);
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("parameter " + key + ": expected a number, got '" + s + "'");
  }

  long long integer(const std::string& key) const {
    const std::string& s = str(key);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("parameter " + key + ": expected an integer, got '" + s + "'");
  }

  int positive(const std::string& key) const {
    const long long v = integer(key);
    if (v < 1 || v > 100000000) throw UsageError("parameter " + key + " must be positive");
    return static_cast<int>(v);
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw UsageError("parameter " + key + ": bad list entry '" + item + "'");
      }
    }
    if (out.empty()) throw UsageError("parameter " + key + " must not be empty");
    return out;
  }

  std::vector<int> integers(const std::string& key) const {
    std::vector<int> out;
    for (double v : reals(key)) {
      if (v != std::floor(v)) throw UsageError("parameter " + key + " needs integers");
      out.push_back(static_cast<int>(v));
    }
    return out;
  }

  std::vector<std::string> words(const std::string& key) const {
    std::vector<std::string> out;
    std::stringstream ss(str(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    if (out.empty()) throw UsageError("parameter " + key + " must not be empty");
    return out;
  }

 private:
  const ParamMap& m_;
};

double slope_of(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string decision_name(Decision d) {
  switch (d) {
    case Decision::yes: return "yes";
    case Decision::no: return "no";
    case Decision::indeterminate: return "indeterminate";
  }
  return "?";
}

// ---------------------------------------------------------------- gamma

void gamma_recovery(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const std::vector<int> ns = p.integers("N");
  const int trials = p.positive("trials");
  const double g_lo = std::max(p.real("gamma_lo"), 1.0 / std::numbers::phi);
  const double g_hi = p.real("gamma_hi");
  const double nu = p.real("nu");
  const double a_lo = p.real("alpha_lo"), a_hi = p.real("alpha_hi");
  if (!(g_lo <= g_hi && g_hi < 1.0)) throw UsageError("need 1/phi <= gamma_lo <= gamma_hi < 1");
  for (int n : ns) {
    if (n < 1) throw UsageError("N entries must be positive");
  }
  const int max_n = *std::max_element(ns.begin(), ns.end());

  RecoveryConfig rc;
  rc.gamma_high = std::clamp(g_hi, rc.gamma_low, kUniqueRootBound);
  rc.newton_steps = p.positive("newton_steps");
  rc.x0 = p.real("x0");

  const std::size_t nn = ns.size();
  std::vector<double> worst_g(nn, 0.0), sum_g(nn, 0.0), worst_x(nn, 0.0);
  std::vector<int> certified(nn, 0), failures(nn, 0);
  for (int t = 0; t < trials; ++t) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(t)));
    const double gamma = rng.uniform(g_lo, g_hi);
    const double lam = equal_leaks_for_gamma(gamma);
    GreConfig cfg;
    cfg.alpha = rng.uniform(a_lo, a_hi);
    cfg.nu = nu;
    cfg.mode = FlakyMode::coin(0.5);
    cfg.lambda1 = cfg.lambda2 = lam;
    cfg.bits = max_n + 64;
    const double x = rng.uniform(-1.0, 1.0);
    const GreEncoding eb = gre_encode(x, cfg, rng);
    const GreEncoding ec = gre_encode(-x, cfg, rng);
    for (std::size_t i = 0; i < nn; ++i) {
      try {
        const Certificate cert = recover_gamma(eb.bits, &ec.bits, rc, ns[i]);
        const double eg = std::abs(gamma - cert.estimate);
        const double ex = std::abs(x - gre_decode(eb.bits, cert.estimate, ns[i]));
        worst_g[i] = std::max(worst_g[i], eg);
        sum_g[i] += eg;
        worst_x[i] = std::max(worst_x[i], ex);
        if (cert.certified) ++certified[i];
      } catch (const std::exception&) {
        ++failures[i];
      }
    }
  }

  out.table.header = {"N", "worst_gamma_error", "mean_gamma_error", "worst_x_error",
                      "certified_fraction", "failures"};
  std::vector<double> xs, ys;
  bool decreasing = true;
  for (std::size_t i = 0; i < nn; ++i) {
    const int ok = trials - failures[i];
    out.table.rows.push_back({fmt(ns[i]), fmt(worst_g[i]),
                              fmt(ok ? sum_g[i] / ok : NAN), fmt(worst_x[i]),
                              fmt(static_cast<double>(certified[i]) / trials),
                              fmt(failures[i])});
    if (worst_g[i] > 0.0) {
      xs.push_back(ns[i]);
      ys.push_back(std::log(worst_g[i]));
    }
    if (i > 0 && !(worst_g[i] < worst_g[i - 1])) decreasing = false;
  }
  out.summary["strictly_decreasing"] = decreasing;
  out.summary["log_slope_per_N"] = xs.size() >= 2 ? num(slope_of(xs, ys)) : json(nullptr);
  out.summary["worst_error_at_max_N"] = num(worst_g.back());
}

void gamma_polys(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const double gamma = p.real("gamma");
  const std::vector<int> ns = p.integers("N");
  const int pairs = p.positive("pairs");
  const int grid = p.positive("grid");
  GreConfig cfg;
  cfg.alpha = p.real("alpha");
  cfg.nu = p.real("nu");
  cfg.mode = FlakyMode::coin(0.5);
  cfg.lambda1 = cfg.lambda2 = equal_leaks_for_gamma(gamma);
  cfg.bits = *std::max_element(ns.begin(), ns.end()) + 64;

  out.table.header = {"N", "pair", "t", "value"};
  json roots = json::array();
  for (int j = 0; j < pairs; ++j) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(j)));
    const double x = rng.uniform(-1.0, 1.0);
    const GreEncoding eb = gre_encode(x, cfg, rng);
    const GreEncoding ec = gre_encode(-x, cfg, rng);
    PairDifference diff;
    try {
      diff = pair_difference_stream(eb.bits, ec.bits);
    } catch (const DegeneratePairError&) {
      continue;
    }
    for (int n : ns) {
      if (diff.bar_d.size() < static_cast<std::size_t>(n) + 1) continue;
      const SignedTernaryPolynomial poly(
          std::vector<int>(diff.bar_d.bits.begin(), diff.bar_d.bits.begin() + n + 1));
      double prev_t = 0.0, prev_v = poly(0.0);
      std::optional<double> first_root;
      for (int i = 0; i <= grid; ++i) {
        const double t = static_cast<double>(i) / grid;
        const double v = poly(t);
        out.table.rows.push_back({fmt(n), fmt(j), fmt(t), fmt(v)});
        if (!first_root && i > 0 && (prev_v > 0.0) != (v > 0.0)) {
          double lo = prev_t, hi = t;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((poly(mid) > 0.0) == (prev_v > 0.0)) lo = mid; else hi = mid;
          }
          first_root = 0.5 * (lo + hi);
        }
        prev_t = t;
        prev_v = v;
      }
      roots.push_back({{"N", n}, {"pair", j},
                       {"first_root", first_root ? num(*first_root) : json(nullptr)}});
    }
  }
  out.summary["gamma"] = gamma;
  out.summary["first_roots"] = roots;
}

// ---------------------------------------------------------------- gre

void gre_stability_sweep(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const int configs = p.positive("configs");
  const double lam_lo = p.real("lambda_lo");
  const double eps = p.real("eps");
  const int steps = p.positive("steps");
  const int bits = p.positive("bits");
  const double state_bound = p.real("state_bound");
  if (!(lam_lo > 0.0 && lam_lo <= 1.0)) throw UsageError("lambda_lo must lie in (0,1]");
  const auto range = admissible_alpha_range(eps);
  if (!range) throw UsageError("no admissible alpha range for this eps");

  out.table.header = {"config", "lambda1", "lambda2", "nu", "alpha", "mode", "x",
                      "max_abs_u", "decode_error", "error_bound", "ok"};
  int ok_count = 0;
  const char* mode_names[] = {"always_plus", "always_minus", "coin", "offset"};
  for (int c = 0; c < configs; ++c) {
    Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(c)));
    GreConfig cfg;
    cfg.lambda1 = rng.uniform(lam_lo, 1.0);
    cfg.lambda2 = rng.uniform(lam_lo, 1.0);
    cfg.nu = rng.uniform(0.0, eps);
    cfg.alpha = rng.uniform(range->lo, range->hi);
    const int mode = static_cast<int>(rng.uniform() * 4.0);
    switch (mode) {
      case 0: cfg.mode = FlakyMode::always_plus(); break;
      case 1: cfg.mode = FlakyMode::always_minus(); break;
      case 2: cfg.mode = FlakyMode::coin(0.5); break;
      default: cfg.mode = FlakyMode::offset(rng.uniform(-cfg.nu, cfg.nu)); break;
    }
    const double x = rng.uniform(-1.0, 1.0);
    cfg.bits = std::max(steps, bits);
    const GreEncoding enc = gre_encode(x, cfg, rng);
    double max_u = 0.0;
    for (double u : enc.states) max_u = std::max(max_u, std::abs(u));
    const double gamma = gamma_of_leaks(cfg.lambda1, cfg.lambda2);
    const double err = std::abs(x - gre_reconstruct(enc, gamma, bits));
    const double bound = gre_error_bound(gamma, bits);
    const bool ok = max_u <= state_bound && err <= bound;
    ok_count += ok;
    out.table.rows.push_back({fmt(c), fmt(cfg.lambda1), fmt(cfg.lambda2), fmt(cfg.nu),
                              fmt(cfg.alpha), mode_names[mode], fmt(x), fmt(max_u),
                              fmt(err), fmt(bound), ok ? "1" : "0"});
  }
  out.summary["alpha_range"] = {range->lo, range->hi};
  out.summary["configs"] = configs;
  out.summary["ok"] = ok_count;
}

// ---------------------------------------------------------------- Σ∆

SdConfig scheme_config(const std::string& scheme, double rho, double gamma,
                       double expansion, double tri_tau, bool symmetric_q4) {
  SdConfig cfg;
  cfg.gamma = gamma;
  cfg.rho = rho;
  if (scheme == "plain") {
    cfg.scheme = SdScheme::plain;
    cfg.quantizer = ScalarQuantizerSpec::tri_level(tri_tau);
  } else if (scheme == "finite") {
    cfg.scheme = SdScheme::finite_memory;
    cfg.quantizer = ScalarQuantizerSpec::tri_level(tri_tau);
  } else if (scheme == "asymmetric") {
    cfg.scheme = SdScheme::asymmetric;
    cfg.quantizer = ScalarQuantizerSpec::four_level(symmetric_q4 ? 1.0 : rho);
  } else if (scheme == "chaotic") {
    cfg.scheme = SdScheme::chaotic;
    cfg.rho = 1.0;
    cfg.expansion = expansion;
    cfg.quantizer = ScalarQuantizerSpec::four_level(1.0);
  } else if (scheme == "hybrid") {
    cfg.scheme = SdScheme::hybrid;
    cfg.rho = 1.0;
    cfg.expansion = expansion;
    cfg.quantizer = ScalarQuantizerSpec::four_level(1.0);
  } else {
    throw UsageError("unknown scheme '" + scheme +
                     "' (plain, finite, asymmetric, chaotic, hybrid)");
  }
  try {
    cfg.validate();
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

void quiet_map(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const double r_lo = p.real("rho_lo"), r_hi = p.real("rho_hi");
  const double u_lo = p.real("u_lo"), u_hi = p.real("u_hi");
  const int r_steps = p.positive("rho_steps"), u_steps = p.positive("u_steps");
  const double gamma = p.real("gamma");
  const double tau = p.real("tau");
  const auto steps = static_cast<std::size_t>(p.positive("steps"));
  const auto max_period = static_cast<std::size_t>(p.positive("max_period"));
  const auto tail = 10 * max_period;
  if (steps < tail) throw UsageError("steps must be at least 10 * max_period");

  out.table.header = {"rho", "u0", "converged", "period", "final_u", "final_v", "diverged"};
  int converged = 0;
  std::size_t cell = 0;
  for (int i = 0; i < r_steps; ++i) {
    const double rho = r_steps == 1 ? r_lo : r_lo + (r_hi - r_lo) * i / (r_steps - 1);
    const SdConfig cfg = scheme_config("finite", rho, gamma, 0.0, tau, false);
    for (int j = 0; j < u_steps; ++j, ++cell) {
      const double u0 = u_steps == 1 ? u_lo : u_lo + (u_hi - u_lo) * j / (u_steps - 1);
      Rng rng(Rng::derive(seed, cell));
      const OrbitTrace tr = sd_run(cfg, {}, SdState{u0, 0.0}, steps, rng);
      bool conv = false;
      std::string period;
      if (!tr.diverged_at) {
        conv = std::all_of(tr.bits.end() - static_cast<std::ptrdiff_t>(tail), tr.bits.end(),
                           [](const QuantizerOutput& q) { return q.b == 0; });
        const std::vector<int> codes = output_codes(tr);
        const IdleToneResult idle = idle_tone_detect(codes, max_period);
        if (idle.period) period = fmt(*idle.period);
      }
      converged += conv;
      const SdState last = tr.states.empty() ? tr.initial : tr.states.back();
      out.table.rows.push_back({fmt(rho), fmt(u0), conv ? "1" : "0", period,
                                fmt(last.u), fmt(last.v), tr.diverged_at ? "1" : "0"});
    }
  }
  out.summary["cells"] = r_steps * u_steps;
  out.summary["converged"] = converged;
}

void orbit(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const std::string scheme = p.str("scheme");
  const double rho = p.real("rho"), gamma = p.real("gamma");
  const SdConfig cfg = scheme_config(scheme, rho, gamma, p.real("expansion"),
                                     p.real("tri_tau"), p.integer("symmetric_q4") != 0);
  const auto steps = static_cast<std::size_t>(p.positive("steps"));
  const double input = p.real("input");
  const std::vector<double> f(steps, input);
  const SdState start{p.real("u0"), p.real("v0")};
  Rng rng(seed);
  const OrbitTrace tr = sd_run(cfg, f, start, steps, rng);

  const RegionSpec t = RegionSpec::of(RegionKind::t, gamma);
  out.table.header = {"n", "u", "v", "b", "q", "in_T"};
  out.table.rows.push_back({"0", fmt(start.u), fmt(start.v), "", "",
                            region_contains(t, start) ? "1" : "0"});
  std::optional<std::size_t> entry;
  if (region_contains(t, start)) entry = 0;
  for (std::size_t n = 0; n < tr.states.size(); ++n) {
    const SdState& s = tr.states[n];
    const bool in_t = region_contains(t, s);
    if (in_t && !entry) entry = n + 1;
    out.table.rows.push_back({fmt(n + 1), fmt(s.u), fmt(s.v), fmt(tr.bits[n].b),
                              fmt(tr.bits[n].q), in_t ? "1" : "0"});
  }
  const QuietnessResult qr = quietness_test(tr, 0, std::min<std::size_t>(1000, steps / 2));
  out.summary["scheme"] = scheme;
  out.summary["entry_index_T"] = entry ? json(*entry) : json(nullptr);
  out.summary["diverged_at"] = tr.diverged_at ? json(*tr.diverged_at) : json(nullptr);
  out.summary["quiet"] = decision_name(qr.quiet);
  out.summary["settle_index"] = qr.settle_index ? json(*qr.settle_index) : json(nullptr);
  if (qr.quiet == Decision::yes) out.summary["settled_output"] = {qr.settled.b, qr.settled.q};
}

void chaos_compare(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const auto steps = static_cast<std::size_t>(p.positive("steps"));
  const double input = p.real("input");
  const double gamma = p.real("gamma");
  const double tri_tau = p.real("tri_tau");
  const int stride = p.positive("stride");
  const auto max_period = static_cast<std::size_t>(p.positive("max_period"));
  const int cells = p.positive("cells");

  struct Case {
    std::string label;
    SdConfig cfg;
  };
  const std::vector<Case> cases = {
      {"finite_rho1", scheme_config("finite", 1.0, gamma, 0.0, tri_tau, false)},
      {"finite_rho.995", scheme_config("finite", p.real("rho"), gamma, 0.0, tri_tau, false)},
      {"asymmetric_rho.995", scheme_config("asymmetric", p.real("rho"), gamma, 0.0, tri_tau, false)},
      {"chaotic", scheme_config("chaotic", 1.0, gamma, p.real("expansion"), tri_tau, false)},
  };
  const std::vector<double> f(steps, input);
  out.table.header = {"scheme", "n", "u", "v", "b"};
  json per = json::object();
  for (std::size_t c = 0; c < cases.size(); ++c) {
    Rng rng(Rng::derive(seed, c));
    const OrbitTrace tr = sd_run(cases[c].cfg, f, SdState{}, steps, rng);
    double umin = INFINITY, umax = -INFINITY, vmin = INFINITY, vmax = -INFINITY;
    for (std::size_t n = 0; n < tr.states.size(); ++n) {
      const SdState& s = tr.states[n];
      umin = std::min(umin, s.u);
      umax = std::max(umax, s.u);
      vmin = std::min(vmin, s.v);
      vmax = std::max(vmax, s.v);
      if (n % static_cast<std::size_t>(stride) == 0) {
        out.table.rows.push_back({cases[c].label, fmt(n + 1), fmt(s.u), fmt(s.v),
                                  fmt(tr.bits[n].b)});
      }
    }
    // Box count on the orbit's own bounding box.
    std::vector<char> grid(static_cast<std::size_t>(cells) * cells, 0);
    const double du = umax > umin ? umax - umin : 1.0;
    const double dv = vmax > vmin ? vmax - vmin : 1.0;
    for (const SdState& s : tr.states) {
      const int i = std::min(cells - 1, static_cast<int>((s.u - umin) / du * cells));
      const int j = std::min(cells - 1, static_cast<int>((s.v - vmin) / dv * cells));
      grid[static_cast<std::size_t>(i) * cells + j] = 1;
    }
    const long occupied = std::count(grid.begin(), grid.end(), 1);
    const IdleToneResult idle = idle_tone_detect(output_codes(tr), max_period);
    per[cases[c].label] = {
        {"periodic", decision_name(idle.periodic)},
        {"period", idle.period ? json(*idle.period) : json(nullptr)},
        {"occupied_cells", occupied},
        {"u_range", {num(umin), num(umax)}},
        {"v_range", {num(vmin), num(vmax)}},
        {"diverged_at", tr.diverged_at ? json(*tr.diverged_at) : json(nullptr)}};
  }
  out.summary["schemes"] = per;
}

// ---------------------------------------------------------------- sampling

void sd_accuracy(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  std::vector<Pipeline> pipes;
  for (const auto& w : p.words("pipelines")) {
    try {
      pipes.push_back(parse_pipeline(w));
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
  }
  DistortionOptions opt;
  opt.lambda = p.real("lambda");
  opt.beta = p.real("beta");
  opt.sd_gamma = p.real("sd_gamma");
  opt.tri_tau = p.real("tri_tau");
  opt.half_window = p.real("half_window");
  opt.grid_points = p.positive("grid");
  opt.stopband = p.real("stopband_over_pi") * std::numbers::pi;
  opt.seed = seed;

  Rng rng(seed);
  std::vector<TestSignal::Term> terms;
  const int nterms = p.positive("terms");
  for (int i = 0; i < nterms; ++i) {
    const double a = rng.uniform(-1.0, 1.0);
    const double w = rng.uniform(0.0, 0.95 * std::numbers::pi);
    terms.push_back({a, w, rng.uniform(0.0, 2.0 * std::numbers::pi)});
  }
  const TestSignal f = TestSignal::trig_polynomial(terms, p.real("peak"));

  out.table.header = {"pipeline", "budget", "sup_error", "diverged"};
  json slopes = json::object();
  for (Pipeline pipe : pipes) {
    const bool sd = pipe != Pipeline::pcm && pipe != Pipeline::beta;
    std::vector<double> budgets = sd ? p.reals("lambdas") : p.reals("bits");
    std::sort(budgets.begin(), budgets.end());
    std::vector<DistortionPoint> curve;
    try {
      curve = distortion_curve(pipe, f, budgets, opt);
    } catch (const DomainError& e) {
      throw UsageError(e.what());
    }
    bool diverged = false;
    for (const auto& pt : curve) {
      out.table.rows.push_back({pipeline_name(pipe), fmt(pt.budget), fmt(pt.sup_error),
                                pt.diverged ? "1" : "0"});
      diverged |= pt.diverged;
    }
    if (sd && curve.size() >= 2 && !diverged) {
      slopes[pipeline_name(pipe)] = num(log2_slope(curve));
    } else if (!sd && curve.size() >= 2) {
      // error ratio per 8 bits against β^-8
      const double per_bit = std::pow(curve.back().sup_error / curve.front().sup_error,
                                      1.0 / (curve.back().budget - curve.front().budget));
      slopes[pipeline_name(pipe)] = {{"ratio_per_8_bits", num(std::pow(per_bit, 8.0))}};
    }
  }
  out.summary["slopes"] = slopes;
}

// ---------------------------------------------------------------- cs

void omp_cv(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  OmpCvConfig cfg;
  cfg.n = p.positive("N");
  cfg.m = p.positive("m");
  cfg.k = p.positive("k");
  cfg.d = static_cast<int>(p.integer("d"));
  cfg.noise = p.real("noise");
  cfg.realizations = p.positive("realizations");
  cfg.xi = p.real("xi");
  cfg.c = p.real("C");
  cfg.seed = seed;

  out.table.header = {"r", "mean_eta_cv", "std_eta_cv", "eta_or", "eta_omp", "sigma_d",
                      "eps_theory", "coverage", "cv_beats_omp", "mean_selected"};
  json per_r = json::array();
  for (int r : p.integers("r")) {
    cfg.r = r;
    try {
      cfg.validate();
    } catch (const ConfigError& e) {
      throw UsageError(e.what());
    }
    const OmpCvResult res = run_omp_cv(cfg);
    double mean = 0.0, sel = 0.0;
    for (std::size_t i = 0; i < res.eta_cv.size(); ++i) {
      mean += res.eta_cv[i];
      sel += res.selected[i] + 1;
    }
    const double nr = static_cast<double>(res.eta_cv.size());
    mean /= nr;
    sel /= nr;
    double var = 0.0;
    for (double e : res.eta_cv) var += (e - mean) * (e - mean);
    const double sd = res.eta_cv.size() > 1 ? std::sqrt(var / (nr - 1.0)) : 0.0;
    out.table.rows.push_back({fmt(r), fmt(mean), fmt(sd), fmt(res.eta_or), fmt(res.eta_omp),
                              fmt(res.sigma_d), fmt(res.eps), fmt(res.coverage),
                              fmt(res.beats_omp), fmt(sel)});
    per_r.push_back({{"r", r}, {"sigma_d", res.sigma_d}, {"eps", res.eps},
                     {"coverage", res.coverage}, {"cv_beats_omp", res.beats_omp},
                     {"oracle_index", res.oracle_index + 1}});
  }
  out.summary["runs"] = per_r;
}

void jl_check(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const int npoints = p.positive("points");
  const int dim = p.positive("N");
  const double eps = p.real("eps"), xi = p.real("xi"), c = p.real("C");
  const int draws = p.positive("draws");
  const std::string ens = p.str("ensemble");
  if (!(eps > 0.0 && eps < 1.0)) throw UsageError("eps must lie in (0,1)");
  if (!(xi > 0.0 && xi < 1.0)) throw UsageError("xi must lie in (0,1)");
  EnsembleSpec spec;
  if (ens == "gaussian") spec.kind = EnsembleKind::gaussian;
  else if (ens == "bernoulli") spec.kind = EnsembleKind::bernoulli;
  else throw UsageError("ensemble must be gaussian or bernoulli");
  spec.rows = r_of_epsilon(eps, npoints, xi, c);
  spec.cols = dim;
  spec.seed = seed ^ 0x31c0000000000000ULL;

  Rng rng(seed);
  std::vector<Eigen::VectorXd> points;
  for (int i = 0; i < npoints; ++i) {
    Eigen::VectorXd x(dim);
    for (int j = 0; j < dim; ++j) x(j) = rng.normal();
    points.push_back(x);
  }
  out.table.header = {"draw", "violations"};
  JlStats st;
  for (int d = 0; d < draws; ++d) {
    EnsembleSpec s = spec;
    s.seed = Rng::derive(spec.seed, static_cast<std::uint64_t>(d));
    const int bad = jl_violations(draw_ensemble(s), points, eps);
    ++st.draws;
    st.draws_with_violation += bad > 0;
    st.point_violations += bad;
    st.point_checks += npoints;
    out.table.rows.push_back({fmt(d), fmt(bad)});
  }
  const Interval w = wilson_interval(st.draws_with_violation, st.draws);
  out.summary["rows"] = spec.rows;
  out.summary["event_rate"] = st.event_rate();
  out.summary["wilson_95"] = {w.lo, w.hi};
  out.summary["point_violation_rate"] =
      static_cast<double>(st.point_violations) / static_cast<double>(st.point_checks);
  out.summary["consistent_with_xi"] = w.lo <= xi;
}

void adaptive_demo(const Params& p, std::uint64_t seed, ExperimentResult& out) {
  const int n = p.positive("N"), m = p.positive("m"), k = p.positive("k");
  const int d = static_cast<int>(p.integer("d"));
  const double tau = p.real("tau");
  const std::vector<int> ladder = p.integers("ladder");
  const bool dense = p.integer("dense") != 0;
  if (d < 0 || d > n) throw UsageError("need 0 <= d <= N");

  Rng rng(seed);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (dense) {
    for (int i = 0; i < n; ++i) x(i) = rng.normal();
  } else {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
    for (int i = 0; i < d; ++i) {  // partial Fisher-Yates
      const int j = i + static_cast<int>(rng.uniform() * (n - i));
      std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
      x(idx[static_cast<std::size_t>(i)]) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    }
  }
  x /= x.norm();
  const Eigen::MatrixXd phi = draw_ensemble(
      {EnsembleKind::gaussian, m, n, Normalization::row_variance, seed ^ 0xada0000000000000ULL});
  const Eigen::VectorXd y = phi * x;
  AdaptiveResult res;
  try {
    res = adaptive_decode(phi, y, ladder, k, tau);
  } catch (const ConfigError& e) {
    throw UsageError(e.what());
  }
  out.table.header = {"stage", "m_j", "r_j", "statistic", "true_relative_error"};
  for (std::size_t j = 0; j < res.statistics.size(); ++j) {
    const OmpRun run = omp(phi.topRows(ladder[j]), y.head(ladder[j]), k);
    const double err = (x - run.estimates.back().dense(n)).norm();
    out.table.rows.push_back({fmt(j + 1), fmt(ladder[j]), fmt(m - ladder[j]),
                              fmt(res.statistics[j]), fmt(err)});
  }
  out.summary["stop_index"] = res.stop_index;
  out.summary["too_dense"] = res.too_dense;
  out.summary["final_relative_error"] = (x - res.estimate).norm();
}

// ---------------------------------------------------------------- registry

using Runner = std::function<void(const Params&, std::uint64_t, ExperimentResult&)>;

struct Entry {
  ExperimentInfo info;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> reg = {
      {{"gamma-recovery",
        "worst-case error of the recovered GRE base over random pairs (x,-x)",
        {{"N", "8,16,24,32,40,48", "polynomial degrees"},
         {"trials", "100", "pairs per N"},
         {"gamma_lo", "0.618", "lower end of the gamma draw (clamped to 1/phi)"},
         {"gamma_hi", "0.63", "upper end of the gamma draw"},
         {"nu", "0.3", "quantizer tolerance"},
         {"alpha_lo", "1.7", "amplifier gain range"},
         {"alpha_hi", "2", ""},
         {"newton_steps", "10", ""},
         {"x0", "0.618", "Newton start"}}},
       gamma_recovery},
      {{"gamma-polys", "values of the pair-difference polynomials on [0,1]",
        {{"gamma", "0.64575", "true base"},
         {"N", "8,16,32", "degrees"},
         {"pairs", "5", "number of (x,-x) pairs"},
         {"grid", "200", "grid intervals on [0,1]"},
         {"nu", "0.3", ""},
         {"alpha", "2", ""}}},
       gamma_polys},
      {{"gre-stability-sweep", "leaky GRE state bounds and decode error over random configs",
        {{"configs", "200", ""},
         {"lambda_lo", "0.9", "leaks drawn from [lambda_lo, 1]"},
         {"eps", "0.3", "nu drawn from [0, eps]; alpha from the admissible range"},
         {"steps", "10000", "encoder steps for the state bound"},
         {"bits", "40", "decode length N"},
         {"state_bound", "10", ""}}},
       gre_stability_sweep},
      {{"quiet-map", "zero-input convergence of the finite-memory scheme over (rho, u0)",
        {{"rho_lo", "0.96", ""},
         {"rho_hi", "1", ""},
         {"rho_steps", "21", ""},
         {"u_lo", "-2", ""},
         {"u_hi", "0", ""},
         {"u_steps", "21", ""},
         {"gamma", "0.2", "linear-rule weight"},
         {"tau", "0.3333333333333333", "tri-level threshold"},
         {"steps", "20000", ""},
         {"max_period", "100", "idle-tone search bound"}}},
       quiet_map},
      {{"orbit", "one orbit of a second-order scheme with T membership",
        {{"scheme", "asymmetric", "plain, finite, asymmetric, chaotic, hybrid"},
         {"rho", "0.98", ""},
         {"gamma", "0.2", ""},
         {"u0", "-3.4", ""},
         {"v0", "12.7", ""},
         {"steps", "2000", ""},
         {"input", "0", "constant input"},
         {"expansion", "0.01", "chaotic and hybrid schemes"},
         {"tri_tau", "0.5", "tri-level threshold for plain and finite"},
         {"symmetric_q4", "0", "1: four-level thresholds +-1/2 instead of tau = rho"}}},
       orbit},
      {{"chaos-compare", "orbits of four schemes under small constant input",
        {{"steps", "100000", ""},
         {"input", "-0.001", ""},
         {"gamma", "0.2", ""},
         {"rho", "0.995", "damping of the finite and asymmetric runs"},
         {"expansion", "0.01", "chaotic expansion"},
         {"tri_tau", "0.5", ""},
         {"stride", "10", "CSV keeps every stride-th state"},
         {"max_period", "100", ""},
         {"cells", "200", "box-count grid per axis"}}},
       chaos_compare},
      {{"sd-accuracy", "sup-norm reconstruction error against bit budget",
        {{"pipelines", "sd1,sd2-finite,sd2-asymmetric,pcm,beta", ""},
         {"lambdas", "8,16,32,64", "oversampling ratios for the sigma-delta pipelines"},
         {"bits", "8,16,24", "bits per sample for pcm and beta"},
         {"lambda", "8", "oversampling for pcm and beta"},
         {"beta", "1.8", ""},
         {"sd_gamma", "0.5", ""},
         {"tri_tau", "0.5", ""},
         {"peak", "0.5", "signal sup-norm bound"},
         {"terms", "4", "trig terms in the test signal"},
         {"half_window", "8", ""},
         {"grid", "1000", "evaluation points"},
         {"stopband_over_pi", "4", "filter stopband in units of pi"}}},
       sd_accuracy},
      {{"omp-cv", "OMP with cross validation on a noisy sparse signal",
        {{"N", "3600", ""},
         {"m", "800", "total measurements"},
         {"k", "200", "OMP iterations"},
         {"d", "100", "sparsity of the clean signal"},
         {"noise", "0.05", "noise standard deviation"},
         {"r", "30", "CV rows, comma list"},
         {"realizations", "100", "Psi draws per r"},
         {"xi", "0.01", ""},
         {"C", "1", "JL constant in eps(r)"}}},
       omp_cv},
      {{"jl-check", "all-points JL violation rate at the dimensioned row count",
        {{"points", "200", ""},
         {"N", "500", "ambient dimension"},
         {"eps", "0.5", ""},
         {"xi", "0.01", ""},
         {"C", "8", ""},
         {"draws", "200", ""},
         {"ensemble", "gaussian", "gaussian or bernoulli"}}},
       jl_check},
      {{"adaptive-demo", "adaptive measurement allocation with a CV stopping rule",
        {{"N", "1000", ""},
         {"m", "400", ""},
         {"ladder", "100,150,200,250,300", "decode row counts m_1 < ... < m_p"},
         {"k", "20", "OMP iterations"},
         {"d", "10", "sparsity"},
         {"tau", "0.2", "relative error threshold"},
         {"dense", "0", "1: dense Gaussian signal"}}},
       adaptive_demo},
  };
  return reg;
}

const Entry& find_entry(const std::string& name) {
  for (const auto& e : registry()) {
    if (e.info.name == name) return e;
  }
  throw UsageError("unknown experiment '" + name + "'");
}

}  // namespace

const std::vector<ExperimentInfo>& experiments() {
  static const std::vector<ExperimentInfo> infos = [] {
    std::vector<ExperimentInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

const ExperimentInfo& find_experiment(const std::string& name) {
  return find_entry(name).info;
}

ParamMap resolve_params(const std::string& name, const ParamMap& config,
                        const ParamMap& overrides) {
  const ExperimentInfo& info = find_experiment(name);
  ParamMap out;
  for (const auto& p : info.params) out[p.key] = p.default_value;
  for (const ParamMap* layer : {&config, &overrides}) {
    for (const auto& [k, v] : *layer) {
      if (!out.count(k)) {
        throw UsageError("unknown parameter '" + k + "' for experiment " + name);
      }
      out[k] = v;
    }
  }
  return out;
}

std::pair<std::string, std::string> split_assignment(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError("expected key=value, got '" + kv + "'");
  }
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  return {trim(kv.substr(0, eq)), trim(kv.substr(eq + 1))};
}

ParamMap parse_key_values(std::istream& in) {
  ParamMap out;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto [k, v] = split_assignment(line);
    out[k] = v;
  }
  return out;
}

std::string to_csv(const Table& table) {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  };
  std::string out;
  auto row = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += cell(r[i]);
    }
    out += '\n';
  };
  row(table.header);
  for (const auto& r : table.rows) row(r);
  return out;
}

ExperimentResult run_experiment(const std::string& name, const ParamMap& overrides,
                                std::uint64_t seed) {
  const Entry& entry = find_entry(name);
  ExperimentResult res;
  res.name = name;
  res.seed = seed;
  res.params = resolve_params(name, {}, overrides);
  const Params params(res.params);
  entry.run(params, seed, res);
  return res;
}

nlohmann::ordered_json summary_document(const ExperimentResult& result) {
  json doc;
  doc["schema_version"] = kSchemaVersion;
  json manifest;
  manifest["experiment"] = result.name;
  manifest["seed"] = result.seed;
  json params = json::object();
  for (const auto& [k, v] : result.params) params[k] = v;
  manifest["params"] = params;
  manifest["csv"] = result.name + ".csv";
  manifest["columns"] = result.table.header;
  manifest["rows"] = result.table.rows.size();
  doc["manifest"] = manifest;
  doc["summary"] = result.summary;
  return doc;
}

std::filesystem::path write_outputs(const ExperimentResult& result,
                                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto csv_path = dir / (result.name + ".csv");
  const auto json_path = dir / (result.name + ".json");
  {
    std::ofstream out(csv_path, std::ios::binary);
    out << to_csv(result.table);
    if (!out) throw std::runtime_error("cannot write " + csv_path.string());
  }
  {
    std::ofstream out(json_path, std::ios::binary);
    out << summary_document(result).dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + json_path.string());
  }
  return csv_path;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"adq: experiment runner"};
  std::string name;
  std::vector<std::string> assignments;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string config_path;
  bool list = false;
  app.add_option("experiment", name, "experiment name");
  app.add_option("--param,-p", assignments, "parameter override key=value (repeatable)");
  app.add_option("--seed", seed, "base seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--config", config_path, "key=value file merged under --param");
  app.add_flag("--list", list, "list experiments and their parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (list) {
      for (const auto& info : experiments()) {
        std::cout << info.name << "  " << info.description << '\n';
        for (const auto& p : info.params) {
          std::cout << "    " << p.key << " = " << p.default_value;
          if (!p.help.empty()) std::cout << "    # " << p.help;
          std::cout << '\n';
        }
      }
      return 0;
    }
    if (name.empty()) throw UsageError("missing experiment name (try --list)");
    find_experiment(name);

    ParamMap config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw UsageError("cannot read config file " + config_path);
      config = parse_key_values(in);
    }
    ParamMap cli;
    for (const auto& a : assignments) {
      auto [k, v] = split_assignment(a);
      cli[k] = v;
    }
    const ParamMap merged = resolve_params(name, config, cli);
    const ExperimentResult res = run_experiment(name, merged, seed);
    const auto path = write_outputs(res, out_dir);
    std::cout << "wrote " << path.string() << '\n';
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace adq
