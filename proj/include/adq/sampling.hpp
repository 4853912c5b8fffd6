#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace adq {

// Test signals with spectrum inside [-π, π] (angular frequency), scaled so
// that the sum of |amplitudes| is at most `peak`, hence ‖f‖∞ ≤ peak.
class TestSignal {
 public:
  struct Term {
    double amplitude;
    double omega_or_shift;  // trig: angular frequency in [0, π); sinc: shift
    double phase;           // trig only
  };
  enum class Kind { trig_polynomial, sinc_sum };

  static TestSignal trig_polynomial(std::vector<Term> terms, double peak);
  static TestSignal sinc_sum(std::vector<Term> terms, double peak);
  static TestSignal zero();

  double operator()(double t) const;
  Kind kind() const { return kind_; }
  double peak() const { return peak_; }

 private:
  TestSignal(Kind kind, std::vector<Term> terms, double peak);

  Kind kind_;
  std::vector<Term> terms_;
  double peak_;
};

// f(n/λ) for n = first .. first + count - 1.
std::vector<double> sample(const TestSignal& f, double lambda,
                           std::int64_t first, std::size_t count);

// Raised-cosine low-pass: ĝ = 1 on |ω| ≤ π, cosine roll-off to 0 at
// |ω| = stopband, zero beyond. Needs stopband ≤ λπ for the sampling rate λ.
class ReconstructionFilter {
 public:
  ReconstructionFilter(double stopband, double tolerance = 1e-8);

  double spectrum(double omega) const;
  double operator()(double t) const;  // time-domain kernel

  double stopband() const { return stopband_; }
  double radius() const { return radius_; }
  // Bound on ∫_{|t|>R} |g| for a radius R.
  double tail_bound(double radius) const;

 private:
  double center_;     // (π + stopband) / 2
  double halfwidth_;  // (stopband - π) / 2
  double stopband_;
  double radius_;
};

struct Reconstruction {
  double value;
  double truncation_bound;  // ‖c‖∞ times the kernel tail beyond the radius
};

// (1/λ) Σ c_n g(t - n/λ) over |t - n/λ| ≤ radius; coefficient n sits at
// coeffs[n - first]. Throws RangeError when the window misses part of the
// radius around t.
Reconstruction reconstruct(const std::vector<double>& coeffs,
                           std::int64_t first, const ReconstructionFilter& g,
                           double lambda, double t);

enum class Pipeline { pcm, beta, sd1, sd2_finite, sd2_asymmetric };

Pipeline parse_pipeline(const std::string& name);
std::string pipeline_name(Pipeline p);

struct DistortionOptions {
  double lambda = 8.0;        // oversampling for pcm / beta
  double beta = 1.8;          // beta pipeline base
  double sd_gamma = 0.5;      // second-order linear-rule weight
  double tri_tau = 0.5;       // tri-level threshold for sd2-finite
  double half_window = 8.0;   // errors measured on [-half_window/2, half_window/2]
  int grid_points = 1000;
  double stopband = 4.0 * 3.14159265358979323846;  // needs λ ≥ 4
  std::uint64_t seed = 1;
};

struct DistortionPoint {
  double budget;
  double sup_error;
  bool diverged = false;
};

// budget is λ for the Σ∆ pipelines and bits per sample for pcm / beta.
std::vector<DistortionPoint> distortion_curve(Pipeline pipeline,
                                              const TestSignal& f,
                                              const std::vector<double>& budgets,
                                              const DistortionOptions& opt = {});

// Least-squares slope of log2(error) against log2(budget).
double log2_slope(const std::vector<DistortionPoint>& curve);

}  // namespace adq
