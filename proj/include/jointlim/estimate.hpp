#pragma once

#include <cstdint>
#include <span>

#include "jointlim/dgp.hpp"

namespace jointlim {

// Point estimates combining the two samples, with the sample sizes that
// produced them. nu1_hat = z_1 - phi_hat always.
struct EstimateSet {
  double pi1_hat = 0.0;
  double phi_hat = 0.0;
  double beta_hat = 0.0;
  double nu1_hat = 0.0;
  double sigma_u2_hat = 0.0;
  std::int64_t n = 0;
  std::int64_t tau = 0;
  double kappa = 0.0;
};

// Whether kappa in the plug-in variance is the realized n/tau or a declared
// limit value.
enum class KappaPolicy { realized, declared };

// Treated-mean minus control-mean. Throws degenerate_design_error when either
// arm is empty (the weights d/sum(d) - (1-d)/sum(1-d) are undefined).
double estimate_pi1(std::span<const UnitRecord> cross);

// Time-series sample mean. Throws parameter_error on an empty series.
double estimate_phi(std::span<const double> z);

// beta_hat = pi1_hat * (1 + (z_1 - phi_hat)^2).
double estimate_beta(double pi1_hat, double phi_hat, double z1);

// Counterfactual effect at shock value nu: beta_hat / (1 + nu^2).
double estimate_pi_at(double beta_hat, double nu);

// Mean squared residual with u_hat_i = y~_i - pi1_hat d_i.
double estimate_sigma_u2(std::span<const UnitRecord> cross, double pi1_hat);

// Full pipeline on a joint sample. Under KappaPolicy::declared the caller's
// kappa is stored instead of the realized n/tau.
EstimateSet estimate_all(const JointSample& sample,
                         KappaPolicy policy = KappaPolicy::realized,
                         double declared_kappa = 0.0);

}  // namespace jointlim
