#pragma once

#include <cstdint>
#include <vector>

namespace jointlim {

// Stationary time-series laws with closed-form second-moment structure.
enum class Family { iid, ar1, ma };

// A strictly stationary shock process nu_s with Gaussian innovations.
//
// Families:
//   iid  - nu_s = eps_s
//   ar1  - nu_s = theta * nu_{s-1} + eps_s, |theta| < 1; params = {theta}
//   ma   - nu_s = eps_s + sum_j psi_j eps_{s-j}; params = {psi_1..psi_q}
// eps_s ~ N(0, innovation_sd^2). `mean` is the level phi of the observed
// series z_s = mean + nu_s; the nu process itself is centered.
struct ProcessSpec {
  Family family = Family::iid;
  std::vector<double> params;
  double innovation_sd = 1.0;
  double mean = 0.0;

  double theta() const;                        // ar1 only
  const std::vector<double>& ma_weights() const;  // ma only
  std::int64_t ma_order() const { return static_cast<std::int64_t>(params.size()); }

  // Throws parameter_error on |theta| >= 1, sd <= 0, non-finite or misshapen params.
  void validate() const;
};

// One simulated path nu_1..nu_tau together with everything needed to
// regenerate it bit-exactly.
struct ShockPath {
  std::vector<double> values;
  ProcessSpec spec;
  std::uint64_t seed = 0;
  std::int64_t burn_in = 0;
};

// Draw a strictly stationary path of length tau.
//
// Initialization is exact: ar1 starts from nu_0 ~ N(0, sd^2/(1-theta^2)), ma
// pre-draws its q lagged innovations, iid needs nothing, so the first emitted
// value already follows the stationary law and burn_in (extra discarded steps
// before emission) defaults to 0. The same (spec, tau, seed, burn_in)
// reproduces the same values bit-exactly.
ShockPath generate_shocks(const ProcessSpec& spec, std::int64_t tau,
                          std::uint64_t seed, std::int64_t burn_in = 0);

// Exact autocovariance E[nu_0 nu_k].
// ar1: theta^k sd^2/(1-theta^2); iid: sd^2 at k=0 else 0;
// ma: sd^2 sum_j psi_j psi_{j+k} with psi_0 = 1.
double autocovariance(const ProcessSpec& spec, std::int64_t k);

// Exact long-run variance eta = E[nu_0^2] + 2 sum_{s>=1} E[nu_0 nu_s].
// ar1: sd^2/(1-theta)^2; iid: sd^2; ma: sd^2 (1 + sum_j psi_j)^2.
double long_run_variance_true(const ProcessSpec& spec);

// Exact mixingale coefficient gamma_k = || E[nu_k | M_0] - E[nu_k] ||_1 under
// Gaussian innovations, where M_0 is the natural filtration at time 0.
// ar1: |theta|^k E|nu_0| with E|nu_0| = sqrt(2 sd^2 / ((1-theta^2) pi));
// iid: E|nu_0| at k=0, 0 for k>=1; ma: sqrt(2/pi) sd sqrt(sum_{j>=k} psi_j^2),
// zero once k exceeds the MA order.
double mixingale_coefficient_true(const ProcessSpec& spec, std::int64_t k);

// Which clauses of the dependence/moment trade-off hold for the spec. The
// three clauses trade tail thickness of nu against decay of gamma_k:
//   polynomial_tail   - P(|nu|>x) polynomially bounded and sum (gamma_k/2)^{(r-2)/(r-1)} finite
//   finite_moment     - ||nu||_r finite for some r>2 and sum k^{1/(r-2)} gamma_k finite
//   geometric_decay   - E[nu^2 ln(1+|nu|)] finite and gamma_k = O(a^k), a < 1
// With Gaussian innovations all three hold for every supported family;
// geometric_rate reports the a of the third clause (|theta| for ar1, 0 for
// finite-memory families).
struct Condition2Report {
  bool polynomial_tail = false;
  bool finite_moment = false;
  bool geometric_decay = false;
  double geometric_rate = 0.0;
};

Condition2Report check_condition2(const ProcessSpec& spec);

}  // namespace jointlim
