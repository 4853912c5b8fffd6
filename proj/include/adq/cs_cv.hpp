#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adq/rng.hpp"

namespace adq {

enum class EnsembleKind { gaussian, bernoulli };

// row_variance: entries have variance 1/rows, so columns have expected norm 1.
// unit_column: every column rescaled to norm exactly 1 after drawing.
enum class Normalization { row_variance, unit_column };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::gaussian;
  int rows = 1;
  int cols = 1;
  Normalization normalization = Normalization::row_variance;
  std::uint64_t seed = 0;

  void validate() const;
};

// Entries are drawn row by row from Rng(spec.seed).
Eigen::MatrixXd draw_ensemble(const EnsembleSpec& spec);

// A vector with explicit support; indices in the order OMP picked them.
struct SparseEstimate {
  std::vector<int> support;
  std::vector<double> values;

  Eigen::VectorXd dense(int n) const;
};

struct OmpRun {
  std::vector<int> chosen;               // Λ in pick order
  std::vector<SparseEstimate> estimates;  // x̂_1 .. x̂_k
  std::vector<double> residual_norms;     // ‖r_j‖, j = 0 .. k
  std::vector<std::string> warnings;      // skipped near-dependent columns
};

// Orthogonal matching pursuit with an incrementally grown QR factor of the
// chosen columns. argmax ties go to the lowest index.
OmpRun omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, int k);

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

struct CvReport {
  std::vector<double> eta_hat;  // ‖y_Ψ - Ψ x̂_j‖
  int selected = 0;             // 0-based argmin, lowest index on ties
  double eta_cv = 0.0;
  std::optional<double> eps;
  std::vector<Interval> error_intervals;  // ‖x - x̂_j‖ ∈ [η̂_j/(1+ε), η̂_j/(1-ε)]
  std::vector<Interval> relative_intervals;  // ‖x - x̂_j‖/‖x‖
  std::optional<Interval> oracle_interval;   // η_or ∈ [η̂_cv/(1+ε), η̂_cv/(1-ε)]
};

// Multipliers of the normalized-ratio bound: ratio_j times these brackets
// ‖x - x̂_j‖/‖x‖, where ratio_j = η̂_j/‖y_Ψ‖.
Interval relative_multipliers(double eps);

CvReport cv_select(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y_psi,
                   const std::vector<SparseEstimate>& estimates,
                   std::optional<double> eps = std::nullopt);

// ε = √(C log(p/(2ξ))/r) and its inverse r = ⌈C ε⁻² log(p/(2ξ))⌉.
double epsilon_of_r(double r, double p, double xi, double c);
int r_of_epsilon(double eps, double p, double xi, double c);

// (1-ε)‖x‖ ≤ ‖Mx‖ ≤ (1+ε)‖x‖ failures for one matrix.
int jl_violations(const Eigen::MatrixXd& m, const std::vector<Eigen::VectorXd>& points,
                  double eps);

struct JlStats {
  int draws = 0;
  int draws_with_violation = 0;  // at least one point outside the band
  long point_violations = 0;
  long point_checks = 0;
  double event_rate() const { return draws ? double(draws_with_violation) / draws : 0.0; }
};

// Ensemble draw d uses seed Rng::derive(spec.seed, d).
JlStats jl_violation_rate(const EnsembleSpec& spec,
                          const std::vector<Eigen::VectorXd>& points, double eps,
                          int draws);

// Wilson score interval for k successes in n trials.
Interval wilson_interval(long k, long n, double z = 1.96);

struct AdaptiveResult {
  Eigen::VectorXd estimate;
  int stop_index = 0;              // 1-based ladder stage, p + 1 for the fallback
  std::vector<double> statistics;  // stopping statistic per visited stage
  bool too_dense = false;
};

// phi holds m rows with entry variance 1/m. Stage j decodes with the first
// ladder[j] rows and cross-validates with the remaining r_j rows rescaled to
// variance 1/r_j.
AdaptiveResult adaptive_decode(const Eigen::MatrixXd& phi,
                               const Eigen::VectorXd& y,
                               const std::vector<int>& ladder, int k,
                               double tau);

struct ResidualBounds {
  double lower;
  std::optional<double> upper;  // only for k-sparse estimates
};

// Bounds on σ_k(x) from η̂ = ‖Ψ(x - x̂)‖ when ‖x - x̂‖ ≤ c σ_k(x).
// A re-sparsified estimate carries the constant 3c.
ResidualBounds k_term_residual_bounds(double eta_hat, double eps, double c,
                                      bool estimate_is_k_sparse,
                                      bool resparsified = false);

// (1+ε)η̂; throws ConfigError unless the estimate is k-sparse.
double sigma_k_upper_bound(double eta_hat, double eps, bool estimate_is_k_sparse);

// ℓ2 error of the best k-term approximation.
double best_k_term_error(const Eigen::VectorXd& x, int k);

// x_0 = 1 on the first d entries, plus N(0, σ²) noise on every entry,
// renormalized to unit norm.
Eigen::VectorXd noisy_sparse_signal(int n, int d, double sigma, Rng& rng);

struct OmpCvConfig {
  int n = 3600;        // signal length N
  int m = 800;         // total measurements
  int k = 200;         // OMP iterations
  int d = 100;         // sparsity of the clean signal
  double noise = 0.05;
  int r = 30;          // CV rows; OMP gets m - r
  int realizations = 100;
  double xi = 0.01;
  double c = 1.0;      // JL constant for ε(r)
  std::uint64_t seed = 1;

  void validate() const;
};

struct OmpCvResult {
  double sigma_d = 0.0;
  double eta_or = 0.0;
  int oracle_index = 0;  // 0-based
  double eta_omp = 0.0;
  double eps = 0.0;
  std::vector<double> eta_cv;  // one per Ψ realization
  std::vector<int> selected;
  double coverage = 0.0;        // fraction with (1-ε)η_or ≤ η̂_cv ≤ (1+ε)η_or
  double beats_omp = 0.0;       // fraction with η̂_cv ≤ η_omp
  double true_cv_beats_omp = 0.0;  // fraction with ‖x - x̂_cv‖ ≤ η_omp
};

// Signal, Φ and each Ψ_q come from disjoint seed lineages.
OmpCvResult run_omp_cv(const OmpCvConfig& cfg);

}  // namespace adq
