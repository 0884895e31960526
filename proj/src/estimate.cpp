#include "jointlim/estimate.hpp"

#include <cmath>

#include "jointlim/errors.hpp"

namespace jointlim {

double estimate_pi1(std::span<const UnitRecord> cross) {
  double sum1 = 0.0, sum0 = 0.0;
  std::int64_t n1 = 0, n0 = 0;
  for (const auto& rec : cross) {
    if (rec.d) {
      sum1 += rec.y_tilde;
      ++n1;
    } else {
      sum0 += rec.y_tilde;
      ++n0;
    }
  }
  if (n1 == 0 || n0 == 0) {
    throw degenerate_design_error("all units in one arm; difference-in-means undefined");
  }
  return sum1 / n1 - sum0 / n0;
}

double estimate_phi(std::span<const double> z) {
  if (z.empty()) throw parameter_error("cannot average an empty series");
  double sum = 0.0;
  for (double v : z) sum += v;
  return sum / static_cast<double>(z.size());
}

double estimate_beta(double pi1_hat, double phi_hat, double z1) {
  const double nu1_hat = z1 - phi_hat;
  return pi1_hat * (1.0 + nu1_hat * nu1_hat);
}

double estimate_pi_at(double beta_hat, double nu) {
  return beta_hat / (1.0 + nu * nu);
}

double estimate_sigma_u2(std::span<const UnitRecord> cross, double pi1_hat) {
  if (cross.empty()) throw parameter_error("cannot take residuals of an empty cross-section");
  double acc = 0.0;
  for (const auto& rec : cross) {
    const double u_hat = rec.y_tilde - pi1_hat * rec.d;
    acc += u_hat * u_hat;
  }
  return acc / static_cast<double>(cross.size());
}

EstimateSet estimate_all(const JointSample& sample, KappaPolicy policy,
                         double declared_kappa) {
  EstimateSet est;
  est.n = static_cast<std::int64_t>(sample.cross.size());
  est.tau = static_cast<std::int64_t>(sample.z.size());
  est.pi1_hat = estimate_pi1(sample.cross);
  est.phi_hat = estimate_phi(sample.z);
  est.nu1_hat = sample.z.front() - est.phi_hat;
  est.beta_hat = estimate_beta(est.pi1_hat, est.phi_hat, sample.z.front());
  est.sigma_u2_hat = estimate_sigma_u2(sample.cross, est.pi1_hat);
  if (policy == KappaPolicy::declared) {
    if (!(declared_kappa > 0.0)) throw parameter_error("declared kappa must be positive");
    est.kappa = declared_kappa;
  } else {
    est.kappa = static_cast<double>(est.n) / static_cast<double>(est.tau);
  }
  return est;
}

}  // namespace jointlim
