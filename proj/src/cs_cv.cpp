#include "adq/cs_cv.hpp"

#include <algorithm>
#include <cmath>

#include "adq/errors.hpp"

namespace adq {

namespace {

// Seed lineages for the experiment; the salts sit far above any trial index.
constexpr std::uint64_t kSignalSalt = 0x5167000000000000ULL;
constexpr std::uint64_t kPhiSalt = 0x9e11000000000000ULL;
constexpr std::uint64_t kPsiSalt = 0x7a5b000000000000ULL;

}  // namespace

void EnsembleSpec::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("ensemble needs positive dimensions");
}

Eigen::MatrixXd draw_ensemble(const EnsembleSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  Eigen::MatrixXd m(spec.rows, spec.cols);
  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.rows));
  for (int i = 0; i < spec.rows; ++i) {
    for (int j = 0; j < spec.cols; ++j) {
      const double z = spec.kind == EnsembleKind::gaussian
                           ? rng.normal()
                           : ((rng.next() >> 63) ? 1.0 : -1.0);
      m(i, j) = scale * z;
    }
  }
  if (spec.normalization == Normalization::unit_column) {
    for (int j = 0; j < spec.cols; ++j) {
      const double norm = m.col(j).norm();
      if (norm > 0.0) m.col(j) /= norm;
    }
  }
  return m;
}

Eigen::VectorXd SparseEstimate::dense(int n) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < support.size(); ++i) x(support[i]) = values[i];
  return x;
}

OmpRun omp(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, int k) {
  const int rows = static_cast<int>(phi.rows());
  const int cols = static_cast<int>(phi.cols());
  if (y.size() != rows) throw ConfigError("measurement length does not match rows");
  if (k < 1 || k > rows) throw ConfigError("need 1 <= k <= rows");

  OmpRun run;
  Eigen::MatrixXd q(rows, k);
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd qty(k);  // Qᵀy
  Eigen::VectorXd resid = y;
  std::vector<char> excluded(static_cast<std::size_t>(cols), 0);
  run.residual_norms.push_back(resid.norm());

  int j = 0;
  while (j < k) {
    const Eigen::VectorXd corr = phi.transpose() * resid;
    int best = -1;
    double best_val = -1.0;
    for (int i = 0; i < cols; ++i) {
      if (excluded[static_cast<std::size_t>(i)]) continue;
      const double a = std::abs(corr(i));
      if (a > best_val) {
        best_val = a;
        best = i;
      }
    }
    if (best < 0) {
      run.warnings.push_back("no admissible columns left after " +
                             std::to_string(j) + " iterations");
      break;
    }

    // Gram-Schmidt against the current basis, applied twice.
    Eigen::VectorXd a = phi.col(best);
    const double a_norm = a.norm();
    Eigen::VectorXd coeff = Eigen::VectorXd::Zero(j);
    for (int pass = 0; pass < 2 && j > 0; ++pass) {
      const Eigen::VectorXd c = q.leftCols(j).transpose() * a;
      a -= q.leftCols(j) * c;
      coeff += c;
    }
    const double nu = a.norm();
    excluded[static_cast<std::size_t>(best)] = 1;
    if (!(nu > 1e-10 * a_norm) || a_norm == 0.0) {
      run.warnings.push_back("column " + std::to_string(best) +
                             " is numerically dependent on the chosen set; skipped");
      continue;
    }
    q.col(j) = a / nu;
    r.col(j).head(j) = coeff;
    r(j, j) = nu;
    qty(j) = q.col(j).dot(y);
    resid -= q.col(j) * q.col(j).dot(resid);
    run.chosen.push_back(best);
    ++j;

    const Eigen::VectorXd s = r.topLeftCorner(j, j)
                                  .triangularView<Eigen::Upper>()
                                  .solve(qty.head(j));
    SparseEstimate est;
    est.support = run.chosen;
    est.values.assign(s.data(), s.data() + j);
    run.estimates.push_back(std::move(est));
    run.residual_norms.push_back(resid.norm());
  }
  return run;
}

Interval relative_multipliers(double eps) {
  return {(1.0 - 3.0 * eps) / ((1.0 + eps) * (1.0 - eps) * (1.0 - eps)),
          1.0 / ((1.0 - eps) * (1.0 - eps))};
}

CvReport cv_select(const Eigen::MatrixXd& psi, const Eigen::VectorXd& y_psi,
                   const std::vector<SparseEstimate>& estimates,
                   std::optional<double> eps) {
  if (estimates.empty()) throw ConfigError("cv_select needs at least one estimate");
  if (y_psi.size() != psi.rows()) throw ConfigError("CV measurement length mismatch");
  if (eps && !(*eps > 0.0 && *eps < 1.0)) throw DomainError("eps must lie in (0,1)");

  CvReport rep;
  rep.eps = eps;
  rep.eta_hat.reserve(estimates.size());
  for (const auto& est : estimates) {
    Eigen::VectorXd diff = y_psi;
    for (std::size_t i = 0; i < est.support.size(); ++i) {
      diff -= est.values[i] * psi.col(est.support[i]);
    }
    rep.eta_hat.push_back(diff.norm());
  }
  const auto it = std::min_element(rep.eta_hat.begin(), rep.eta_hat.end());
  rep.selected = static_cast<int>(it - rep.eta_hat.begin());
  rep.eta_cv = *it;

  if (eps) {
    const double e = *eps;
    const double y_norm = y_psi.norm();
    const Interval mult = relative_multipliers(e);
    for (double eta : rep.eta_hat) {
      rep.error_intervals.push_back({eta / (1.0 + e), eta / (1.0 - e)});
      const double ratio = y_norm > 0.0 ? eta / y_norm : 0.0;
      rep.relative_intervals.push_back({ratio * mult.lo, ratio * mult.hi});
    }
    rep.oracle_interval = Interval{rep.eta_cv / (1.0 + e), rep.eta_cv / (1.0 - e)};
  }
  return rep;
}

double epsilon_of_r(double r, double p, double xi, double c) {
  if (!(r > 0 && p > 0 && xi > 0 && c > 0)) throw DomainError("arguments must be positive");
  return std::sqrt(c * std::log(p / (2.0 * xi)) / r);
}

int r_of_epsilon(double eps, double p, double xi, double c) {
  if (!(eps > 0 && p > 0 && xi > 0 && c > 0)) throw DomainError("arguments must be positive");
  return static_cast<int>(std::ceil(c * std::log(p / (2.0 * xi)) / (eps * eps)));
}

int jl_violations(const Eigen::MatrixXd& m, const std::vector<Eigen::VectorXd>& points,
                  double eps) {
  int bad = 0;
  for (const auto& x : points) {
    const double nx = x.norm();
    if (nx == 0.0) throw DomainError("JL points must be nonzero");
    const double nm = (m * x).norm();
    if (nm < (1.0 - eps) * nx || nm > (1.0 + eps) * nx) ++bad;
  }
  return bad;
}

JlStats jl_violation_rate(const EnsembleSpec& spec,
                          const std::vector<Eigen::VectorXd>& points, double eps,
                          int draws) {
  if (draws < 1) throw ConfigError("need at least one draw");
  JlStats st;
  for (int d = 0; d < draws; ++d) {
    EnsembleSpec s = spec;
    s.seed = Rng::derive(spec.seed, static_cast<std::uint64_t>(d));
    const int bad = jl_violations(draw_ensemble(s), points, eps);
    ++st.draws;
    if (bad > 0) ++st.draws_with_violation;
    st.point_violations += bad;
    st.point_checks += static_cast<long>(points.size());
  }
  return st;
}

Interval wilson_interval(long k, long n, double z) {
  if (n <= 0 || k < 0 || k > n) throw DomainError("need 0 <= k <= n, n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double centre = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

AdaptiveResult adaptive_decode(const Eigen::MatrixXd& phi,
                               const Eigen::VectorXd& y,
                               const std::vector<int>& ladder, int k,
                               double tau) {
  const int m = static_cast<int>(phi.rows());
  const int n = static_cast<int>(phi.cols());
  if (ladder.empty()) throw ConfigError("ladder must not be empty");
  if (y.size() != m) throw ConfigError("measurement length does not match rows");
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    if (ladder[j] < k || ladder[j] >= m || (j > 0 && ladder[j] <= ladder[j - 1])) {
      throw ConfigError("ladder must increase strictly within [k, m)");
    }
  }
  const double p = static_cast<double>(ladder.size());
  const double shift = 3.0 * std::log(p);
  for (int mj : ladder) {
    if (!(std::sqrt(static_cast<double>(m - mj)) > shift)) {
      throw ConfigError("stopping rule undefined: sqrt(r_j) <= 3 log p");
    }
  }

  AdaptiveResult res;
  const double y_norm = y.norm();
  for (std::size_t j = 0; j < ladder.size(); ++j) {
    const int mj = ladder[j];
    const int rj = m - mj;
    const OmpRun run = omp(phi.topRows(mj), y.head(mj), k);
    const double rescale = std::sqrt(static_cast<double>(m) / rj);
    const Eigen::MatrixXd psi = rescale * phi.bottomRows(rj);
    const Eigen::VectorXd y_psi = rescale * y.tail(rj);
    const CvReport rep = cv_select(psi, y_psi, {run.estimates.back()});
    const double sr = std::sqrt(static_cast<double>(rj));
    const double stat = y_norm > 0.0 ? (sr * rep.eta_cv / y_norm) / (sr - shift) : 0.0;
    res.statistics.push_back(stat);
    if (stat <= tau) {
      res.estimate = run.estimates.back().dense(n);
      res.stop_index = static_cast<int>(j) + 1;
      return res;
    }
  }
  const OmpRun full = omp(phi, y, k);
  res.estimate = full.estimates.back().dense(n);
  res.stop_index = static_cast<int>(ladder.size()) + 1;
  res.too_dense = true;
  return res;
}

ResidualBounds k_term_residual_bounds(double eta_hat, double eps, double c,
                                      bool estimate_is_k_sparse, bool resparsified) {
  if (!(eta_hat >= 0.0)) throw DomainError("eta_hat must be nonnegative");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("eps must lie in (0,1)");
  if (!(c > 0.0)) throw DomainError("c must be positive");
  const double cc = resparsified ? 3.0 * c : c;
  ResidualBounds b{(1.0 - eps) * eta_hat / cc, std::nullopt};
  if (estimate_is_k_sparse || resparsified) b.upper = (1.0 + eps) * eta_hat;
  return b;
}

double sigma_k_upper_bound(double eta_hat, double eps, bool estimate_is_k_sparse) {
  if (!estimate_is_k_sparse) {
    throw ConfigError("upper bound on sigma_k needs a k-sparse estimate");
  }
  return (1.0 + eps) * eta_hat;
}

double best_k_term_error(const Eigen::VectorXd& x, int k) {
  std::vector<double> sq(static_cast<std::size_t>(x.size()));
  for (Eigen::Index i = 0; i < x.size(); ++i) sq[static_cast<std::size_t>(i)] = x(i) * x(i);
  if (k >= static_cast<int>(sq.size())) return 0.0;
  std::nth_element(sq.begin(), sq.begin() + k, sq.end(), std::greater<>());
  double tail = 0.0;
  for (std::size_t i = static_cast<std::size_t>(k); i < sq.size(); ++i) tail += sq[i];
  return std::sqrt(tail);
}

Eigen::VectorXd noisy_sparse_signal(int n, int d, double sigma, Rng& rng) {
  if (n < 1 || d < 0 || d > n) throw ConfigError("need 0 <= d <= n");
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = (i < d ? 1.0 : 0.0) + sigma * rng.normal();
  return x / x.norm();
}

void OmpCvConfig::validate() const {
  if (n < 1 || m < 2 || m > n) throw ConfigError("need 2 <= m <= N");
  if (r < 1 || r >= m) throw ConfigError("need 1 <= r < m");
  if (k < 1 || k > m - r) throw ConfigError("need 1 <= k <= m - r");
  if (d < 0 || d > n) throw ConfigError("need 0 <= d <= N");
  if (!(noise >= 0.0)) throw ConfigError("noise must be nonnegative");
  if (realizations < 1) throw ConfigError("need at least one realization");
  if (!(xi > 0.0 && xi < 1.0)) throw ConfigError("xi must lie in (0,1)");
  if (!(c > 0.0)) throw ConfigError("JL constant must be positive");
}

OmpCvResult run_omp_cv(const OmpCvConfig& cfg) {
  cfg.validate();
  Rng signal_rng(cfg.seed ^ kSignalSalt);
  const Eigen::VectorXd x = noisy_sparse_signal(cfg.n, cfg.d, cfg.noise, signal_rng);

  const int rows = cfg.m - cfg.r;
  const Eigen::MatrixXd phi =
      draw_ensemble({EnsembleKind::gaussian, rows, cfg.n, Normalization::row_variance,
                     cfg.seed ^ kPhiSalt});
  const OmpRun run = omp(phi, phi * x, cfg.k);

  OmpCvResult res;
  res.sigma_d = best_k_term_error(x, cfg.d);
  std::vector<double> true_err;
  true_err.reserve(run.estimates.size());
  for (const auto& est : run.estimates) true_err.push_back((x - est.dense(cfg.n)).norm());
  const auto best = std::min_element(true_err.begin(), true_err.end());
  res.eta_or = *best;
  res.oracle_index = static_cast<int>(best - true_err.begin());
  res.eta_omp = true_err.back();
  res.eps = epsilon_of_r(cfg.r, cfg.k, cfg.xi, cfg.c);

  int covered = 0, beats = 0, true_beats = 0;
  for (int q = 0; q < cfg.realizations; ++q) {
    const Eigen::MatrixXd psi = draw_ensemble(
        {EnsembleKind::gaussian, cfg.r, cfg.n, Normalization::row_variance,
         Rng::derive(cfg.seed ^ kPsiSalt, static_cast<std::uint64_t>(q))});
    const CvReport rep = cv_select(psi, psi * x, run.estimates, res.eps);
    res.eta_cv.push_back(rep.eta_cv);
    res.selected.push_back(rep.selected);
    if ((1.0 - res.eps) * res.eta_or <= rep.eta_cv &&
        rep.eta_cv <= (1.0 + res.eps) * res.eta_or) {
      ++covered;
    }
    if (rep.eta_cv <= res.eta_omp) ++beats;
    if (true_err[static_cast<std::size_t>(rep.selected)] <= res.eta_omp) ++true_beats;
  }
  const double nr = static_cast<double>(cfg.realizations);
  res.coverage = covered / nr;
  res.beats_omp = beats / nr;
  res.true_cv_beats_omp = true_beats / nr;
  return res;
}

}  // namespace adq
