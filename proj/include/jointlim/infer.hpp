#pragma once

#include "jointlim/estimate.hpp"

namespace jointlim {

// Two-sided Wald test and confidence interval for the structural parameter.
struct InferenceResult {
  double estimate = 0.0;   // point estimate the interval is centered on
  double statistic = 0.0;  // t-ratio
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.0;
  bool reject = false;
  double beta0 = 0.0;
};

// Standard normal CDF (via erfc).
double gaussian_cdf(double x);

// Standard normal quantile. Acklam's rational approximation refined by one
// Halley step against the erfc-based CDF; absolute error is below 1e-13 on
// (0,1), comfortably inside the 1e-9 documented bound. Throws parameter_error
// outside (0,1).
double gaussian_quantile(double p);

// Limiting variance of sqrt(n)(beta_hat - beta):
//   4 ((1 + nu1^2)^2 sigma_u2 + kappa eta pi1^2 nu1^2).
// Throws parameter_error for negative variances or kappa <= 0.
double limit_variance(double nu1, double sigma_u2, double pi1, double kappa, double eta);

// t-ratio sqrt(n)(beta_hat - beta0) / (2 ((1+nu1_hat^2)^2 sigma_u2_hat +
// kappa eta_hat pi1_hat^2 nu1_hat^2)^{1/2}), with the matching two-sided
// decision at level alpha and the level-(1-alpha) interval. Throws
// degenerate_variance_error when the plug-in variance is exactly zero.
InferenceResult wald(const EstimateSet& est, double eta_hat, double beta0, double alpha);

// Inference for the counterfactual effect at shock value nu: the t-ratio and
// decision carry over; estimate, se, interval endpoints and the null scale by
// 1/(1 + nu^2).
InferenceResult counterfactual_inference(const InferenceResult& res,
                                         const EstimateSet& est, double nu);

}  // namespace jointlim
