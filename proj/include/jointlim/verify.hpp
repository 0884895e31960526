#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "jointlim/dgp.hpp"
#include "jointlim/estimate.hpp"
#include "jointlim/lrv.hpp"

namespace jointlim {

// Bounded test function of the conditioning shock, used in the stable
// convergence diagnostics (stability is convergence against every bounded
// function of nu_1, so the diagnostics sweep a few representatives).
enum class ZetaKind { one, indicator, bounded_smooth };

struct Zeta {
  ZetaKind kind = ZetaKind::one;
  double threshold = 0.0;  // indicator: 1(nu1 > threshold)

  double operator()(double nu1) const;
  std::string name() const;
  static Zeta parse(const std::string& text);  // "one" | "indicator:<c>" | "tanh"
};

struct CfPoint {
  double s = 0.0;
  double t = 0.0;
};

// The default grid {-2,-1,0,1,2}^2 covering the informative range of the
// characteristic functions when the variances are around 4.
std::vector<CfPoint> default_cf_grid();

// Monte Carlo configuration. n_grid and tau_grid are parallel; single-point
// runs use the first entry, the expansion-residual check uses all of them.
struct McConfig {
  std::int64_t replications = 0;
  std::vector<std::int64_t> n_grid;
  std::vector<std::int64_t> tau_grid;
  ProcessSpec proc;
  CrossSectionSpec cs;
  std::uint64_t master_seed = 0;
  std::vector<CfPoint> cf_grid = default_cf_grid();
  Zeta zeta;
  LrvConfig lrv;
  double alpha = 0.05;
  KappaPolicy kappa_policy = KappaPolicy::realized;
  double declared_kappa = 0.0;
  // Diagnostic Y_n: influence average n^{-1/2} sum Upsilon(nu_1, u_i, d_i) by
  // default; true switches to the raw sqrt(n)(pi1_hat - pi1).
  bool use_raw_estimator_yn = false;
  int workers = 1;

  void validate() const;
};

// Replication-level output of run_mc. Per-replication vectors are in
// replication order with degenerate draws removed; cf vectors are over the
// config's cf_grid.
struct McReport {
  std::vector<double> wald_draws;
  std::vector<double> beta_hats;
  std::vector<double> eta_hats;
  std::vector<double> nu1_hats;
  std::vector<std::uint8_t> covered;
  double ks_stat = 0.0;
  double coverage = 0.0;
  std::vector<std::complex<double>> cf_empirical;
  std::vector<std::complex<double>> cf_target;
  double cf_max_deviation = 0.0;
  std::int64_t excluded_degenerate = 0;
  double runtime_seconds = 0.0;
  std::int64_t n_used = 0;
  std::int64_t tau_used = 0;
  double beta_true = 0.0;
  double eta_true = 0.0;
};

// Full-pipeline Monte Carlo at (n_grid[0], tau_grid[0]): per replication a
// joint sample, the estimate set, the HAC estimate and the t-ratio against the
// true beta, plus the characteristic-function terms zeta(nu_1) exp(i(s Z_tau +
// t Y_n)) on the grid. Replication r uses the seed stream derive_seed(
// master_seed, r); execution is a parallel map with a fixed-order reduction,
// so results are identical for any worker count.
McReport run_mc(const McConfig& cfg);

// Conditional CLT diagnostic: with nu_1 held fixed, R normalized
// cross-section averages Y_n compared against N(0, sigma^2(nu_1)).
struct ConditionalCltReport {
  double variance_ratio = 0.0;  // sample variance of Y_n over sigma^2(nu_1)
  double ks = 0.0;              // KS distance of Y_n / sigma(nu_1) to N(0,1)
  double sigma2 = 0.0;
  std::int64_t n = 0;
  std::int64_t replications = 0;
};

ConditionalCltReport conditional_clt_check(const CrossSectionSpec& cs, double nu1_fixed,
                                           std::int64_t n, std::int64_t R,
                                           std::uint64_t seed, int workers = 1);

// Panel variant: shocks nu_1..nu_T are drawn once and held fixed, each
// replication redraws the cross-section, and Y_n aggregates the per-period
// shock-coupled values through q (q_tag "coord:<k>" 1-based, or "mean").
ConditionalCltReport panel_clt_check(const ProcessSpec& proc, const CrossSectionSpec& cs,
                                     std::int64_t T, const std::string& q_tag,
                                     std::int64_t n, std::int64_t R, std::uint64_t seed,
                                     int workers = 1);

// Time-series stable CLT diagnostic: R draws of Z_tau = sqrt(tau) * mean(nu),
// compared against N(0, eta), plus an independence check between zeta(nu_1)
// and exp(i s Z_tau) over a grid of s values (empirical covariance, exactly
// zero at s = 0).
struct StableTsReport {
  double sample_variance = 0.0;
  double eta_true = 0.0;
  double ks = 0.0;  // Z_tau / sqrt(eta) against N(0,1)
  std::vector<double> s_grid;
  std::vector<double> independence_deviation;  // |cov(zeta, e^{isZ})| per s
  double max_independence_deviation = 0.0;
  std::int64_t replications = 0;
};

StableTsReport stable_ts_check(const ProcessSpec& proc, std::int64_t tau, std::int64_t R,
                               std::uint64_t seed, const Zeta& zeta = {ZetaKind::indicator, 0.0},
                               int workers = 1);

// Joint stable convergence diagnostic: over the cf grid,
//   cf_empirical(s,t) = R^{-1} sum_r zeta(nu_1^r) exp(i(s Z^r + t Y^r))
//   cf_target(s,t)    = e^{-s^2 eta/2} R^{-1} sum_r zeta(nu_1^r) e^{-t^2 sigma^2(nu_1^r)/2}
// and the max modulus deviation between them. The (0,0) deviation is exactly
// zero by construction.
struct JointStableReport {
  std::vector<CfPoint> grid;
  std::vector<std::complex<double>> cf_empirical;
  std::vector<std::complex<double>> cf_target;
  double max_deviation = 0.0;
  std::int64_t replications = 0;
  double eta_true = 0.0;
};

JointStableReport joint_stable_check(const McConfig& cfg);

// Linearization remainder across the n grid (kappa fixed): per grid point the
// median over replications of
//   | sqrt(n)(beta_hat - beta) - [(1+nu1^2) sqrt(n)(pi1_hat - pi1)
//                                 - 2 pi1 nu1 sqrt(n/tau) sqrt(tau)(phi_hat - phi)] |.
struct ExpansionResidualReport {
  std::vector<std::int64_t> n_grid;
  std::vector<double> median_abs_residual;
  std::vector<double> ratios;  // consecutive medians, m[i+1]/m[i]
};

ExpansionResidualReport expansion_residual_check(const McConfig& cfg);

// Sup distance between the empirical CDF of the sample and the standard
// normal CDF. Throws parameter_error on an empty sample.
double ks_distance(std::span<const double> sample);

// Asymptotic 5% KS critical value 1.358 / sqrt(R).
double ks_critical_5pct(std::int64_t R);

}  // namespace jointlim
