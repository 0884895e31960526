#include <cmath>
#include <random>

#include "doctest.h"
#include "jointlim/errors.hpp"
#include "jointlim/infer.hpp"

using namespace jointlim;

namespace {

// Bisection on the erfc-based CDF: an oracle for the quantile that shares no
// code with the rational approximation.
double quantile_by_bisection(double p) {
  double lo = -10.0, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gaussian_cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

EstimateSet hand_estimates() {
  EstimateSet est;
  est.n = 100;
  est.beta_hat = 2.0;
  est.nu1_hat = 1.0;
  est.sigma_u2_hat = 1.0;
  est.pi1_hat = 0.5;
  est.kappa = 1.0;
  return est;
}

}  // namespace

TEST_CASE("gaussian quantile reference points") {
  CHECK(gaussian_quantile(0.5) == 0.0);
  CHECK(gaussian_quantile(0.975) == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK(gaussian_quantile(0.84134) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_THROWS_AS(gaussian_quantile(0.0), parameter_error);
  CHECK_THROWS_AS(gaussian_quantile(1.0), parameter_error);
  CHECK_THROWS_AS(gaussian_quantile(-0.2), parameter_error);
}

TEST_CASE("gaussian quantile agrees with the bisection oracle") {
  // The erfc-based CDF (and with it the bisection oracle) carries full
  // precision in the lower half; the upper half is covered by the exact
  // reflection.
  for (double p : {1e-9, 1e-6, 1e-3, 0.02, 0.1, 0.3, 0.5}) {
    const double x = gaussian_quantile(p);
    CHECK(std::abs(x - quantile_by_bisection(p)) < 1e-9);
    CHECK(gaussian_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
  // At dyadic p the complement 1 - p is exact, so reflection is bitwise.
  for (double p : {0.0625, 0.125, 0.25, 0.375}) {
    CHECK(gaussian_quantile(1.0 - p) == -gaussian_quantile(p));
  }
}

TEST_CASE("limit variance formula") {
  CHECK(limit_variance(0.0, 1.0, 0.33, 1.0, 4.0) == 4.0);
  CHECK(limit_variance(1.0, 1.0, 0.5, 1.0, 4.0) == 20.0);
  CHECK(limit_variance(2.0, 0.0, 0.0, 1.0, 4.0) == 0.0);
  CHECK_THROWS_AS(limit_variance(0.0, -1.0, 0.0, 1.0, 1.0), parameter_error);
  CHECK_THROWS_AS(limit_variance(0.0, 1.0, 0.0, 0.0, 1.0), parameter_error);
  CHECK_THROWS_AS(limit_variance(0.0, 1.0, 0.0, 1.0, -1.0), parameter_error);
}

TEST_CASE("limit variance is even in nu1 and monotone in its scale inputs") {
  std::mt19937_64 engine(4);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  for (int i = 0; i < 200; ++i) {
    const double nu1 = unif(engine), s2 = unif(engine), pi1 = unif(engine);
    const double kappa = unif(engine), eta = unif(engine);
    const double v = limit_variance(nu1, s2, pi1, kappa, eta);
    CHECK(limit_variance(-nu1, s2, pi1, kappa, eta) == v);
    CHECK(limit_variance(nu1, s2 + 0.5, pi1, kappa, eta) >= v);
    CHECK(limit_variance(nu1, s2, pi1 + 0.5, kappa, eta) >= v);
    CHECK(limit_variance(nu1, s2, pi1, kappa + 0.5, eta) >= v);
    CHECK(limit_variance(nu1, s2, pi1, kappa, eta + 0.5) >= v);
  }
}

TEST_CASE("wald hand case") {
  const InferenceResult res = wald(hand_estimates(), 4.0, 1.0, 0.05);
  // denominator 2 sqrt(5), statistic 10 / (2 sqrt(5)) = sqrt(5)
  CHECK(res.statistic == doctest::Approx(2.2360679).epsilon(1e-6));
  CHECK(res.reject);
  CHECK(res.ci_low == doctest::Approx(1.123487).epsilon(1e-5));
  CHECK(res.ci_high == doctest::Approx(2.876513).epsilon(1e-5));
  CHECK(res.se == doctest::Approx(0.4472136).epsilon(1e-6));
  CHECK(res.estimate == 2.0);
}

TEST_CASE("wald basics and edge cases") {
  EstimateSet est = hand_estimates();
  const InferenceResult at_null = wald(est, 4.0, est.beta_hat, 0.05);
  CHECK(at_null.statistic == 0.0);
  CHECK_FALSE(at_null.reject);

  // alpha = 1 collapses the interval onto the estimate and rejects any
  // non-trivial null.
  const InferenceResult collapsed = wald(est, 4.0, 1.0, 1.0);
  CHECK(collapsed.ci_low == est.beta_hat);
  CHECK(collapsed.ci_high == est.beta_hat);
  CHECK(collapsed.reject);
  CHECK_FALSE(wald(est, 4.0, est.beta_hat, 1.0).reject);

  EstimateSet degenerate = est;
  degenerate.sigma_u2_hat = 0.0;
  degenerate.pi1_hat = 0.0;
  CHECK_THROWS_AS(wald(degenerate, 4.0, 1.0, 0.05), degenerate_variance_error);
  CHECK_THROWS_AS(wald(est, 4.0, 1.0, 0.0), parameter_error);
}

TEST_CASE("coverage duality: beta0 inside the interval iff not rejected") {
  std::mt19937_64 engine(11);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.1, 2.0);
  for (int i = 0; i < 300; ++i) {
    EstimateSet est;
    est.n = 50 + (i % 200);
    est.beta_hat = normal(engine);
    est.nu1_hat = normal(engine);
    est.sigma_u2_hat = unif(engine);
    est.pi1_hat = normal(engine);
    est.kappa = unif(engine);
    const double beta0 = normal(engine);
    const InferenceResult res = wald(est, unif(engine), beta0, 0.05);
    const bool inside = res.ci_low <= beta0 && beta0 <= res.ci_high;
    CHECK(inside == !res.reject);
    CHECK(res.ci_low <= res.estimate);
    CHECK(res.estimate <= res.ci_high);
  }
}

TEST_CASE("rescaling both variance estimates rescales the statistic") {
  EstimateSet est = hand_estimates();
  const InferenceResult base = wald(est, 4.0, 1.0, 0.05);
  // c = 2: exact in floating point
  EstimateSet scaled = est;
  scaled.sigma_u2_hat *= 4.0;
  const InferenceResult res = wald(scaled, 16.0, 1.0, 0.05);
  CHECK(res.se == 2.0 * base.se);
  CHECK(res.statistic == 0.5 * base.statistic);
}

TEST_CASE("counterfactual inference rescales the interval, not the decision") {
  const EstimateSet est = hand_estimates();
  const InferenceResult base = wald(est, 4.0, 1.0, 0.05);

  const InferenceResult same = counterfactual_inference(base, est, 0.0);
  CHECK(same.estimate == base.estimate);
  CHECK(same.ci_low == base.ci_low);
  CHECK(same.ci_high == base.ci_high);

  const InferenceResult half = counterfactual_inference(base, est, 1.0);
  CHECK(half.estimate == doctest::Approx(base.estimate / 2.0));
  CHECK(half.ci_low == doctest::Approx(base.ci_low / 2.0));
  CHECK(half.ci_high == doctest::Approx(base.ci_high / 2.0));
  CHECK(half.statistic == base.statistic);
  CHECK(half.reject == base.reject);

  const InferenceResult quarter = counterfactual_inference(base, est, std::sqrt(3.0));
  CHECK(quarter.ci_low == doctest::Approx(0.280872).epsilon(1e-4));
  CHECK(quarter.ci_high == doctest::Approx(0.719128).epsilon(1e-4));
}
