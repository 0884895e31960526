#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "jointlim/process.hpp"

namespace jointlim {

// How the aggregate shock enters the individual outcome.
//
//   potential_outcomes - observed y~ = pi_1 d + u; the difference-in-means
//                        influence value is 2(2d-1)u, so the conditional
//                        variance 4 Var(u) does not depend on nu_1.
//   scaled_shock       - error term nu_1 * u; the bare shock-coupled value
//                        nu_1 * u has conditional variance nu_1^2 Var(u),
//                        which is genuinely random across shock draws.
//   custom             - user hook f(nu_1, u); no analytic moments.
enum class Upsilon { potential_outcomes, scaled_shock, custom };

// Marginal law of the individual heterogeneity u_i (variance u_sd^2 either way).
enum class NoiseLaw { gaussian, uniform };

struct CrossSectionSpec {
  std::int64_t n = 0;
  Upsilon upsilon = Upsilon::potential_outcomes;
  double u_sd = 1.0;
  double beta = 0.0;
  double treat_prob = 0.5;
  NoiseLaw u_law = NoiseLaw::gaussian;
  std::string custom_tag;
  std::function<double(double nu1, double u)> custom_fn;

  void validate() const;
};

struct UnitRecord {
  double y_tilde = 0.0;
  std::uint8_t d = 0;
};

struct SampleMeta {
  ProcessSpec proc;
  CrossSectionSpec cs;
  std::uint64_t master_seed = 0;
  std::uint64_t shock_seed = 0;
  std::uint64_t u_seed = 0;
  std::uint64_t d_seed = 0;
};

// One synthetic joint dataset: the observed series z_s = phi + nu_s and a
// cross-section drawn conditional on nu_1 (the shock at the observation date).
struct JointSample {
  ShockPath shocks;
  std::vector<double> z;
  std::vector<UnitRecord> cross;
  double nu1 = 0.0;
  double kappa = 0.0;  // realized n / tau
  SampleMeta meta;
};

// T-period panel: per-period treatment effects pi_t = beta / (1 + nu_t^2),
// observed outcomes y_{i,t} = pi_t d_{i,t} + e(nu_t, u_i) with unit
// heterogeneity u_i shared across periods and fresh assignments each period.
struct PanelSample {
  ShockPath shocks;
  std::int64_t T = 0;
  std::vector<std::vector<double>> y;        // n rows of length T
  std::vector<std::vector<std::uint8_t>> d;  // n rows of length T
  std::vector<double> pi;                    // pi_1..pi_T
  std::string q_tag;
  SampleMeta meta;
};

// Raw heterogeneity draws behind a cross-section: n values of u and n*periods
// treatment indicators, from two independent streams.
struct CrossDraw {
  std::vector<double> u;
  std::vector<std::uint8_t> d;  // unit-major, period-minor
};

CrossDraw draw_heterogeneity(const CrossSectionSpec& cs, std::int64_t n,
                             std::uint64_t u_seed, std::uint64_t d_seed,
                             std::int64_t periods = 1);

// The error term e in the outcome equation y~ = pi_1 d + e.
double error_term(const CrossSectionSpec& cs, double nu1, double u);

// The shock-coupled value Upsilon(nu_1, heterogeneity) whose normalized
// cross-sectional average the limit theory is about.
double upsilon_value(const CrossSectionSpec& cs, double nu1, double u, int d);

// Recover the shock-coupled value from an observed record given the true
// parameters: e = y~ - pi_1 d, then 2(2d-1)e for potential outcomes and e
// itself for the other families.
double influence_from_record(const CrossSectionSpec& cs, double pi1_true,
                             const UnitRecord& rec);

// Conditional mean and variance of upsilon_value given nu_1, for the analytic
// built-ins. Throws not_implemented_error for the custom hook.
std::pair<double, double> conditional_moments(const CrossSectionSpec& cs, double nu1);

// Draw a joint dataset. The master seed is split into disjoint shock / u / d
// streams, so conditional on nu_1 the two samples are independent by
// construction and re-seeding one stream never perturbs another.
JointSample generate_joint(const ProcessSpec& proc, const CrossSectionSpec& cs,
                           std::int64_t tau, std::uint64_t seed);

// Draw a T-period panel over the same split-stream layout (2 <= T <= tau).
PanelSample generate_panel(const ProcessSpec& proc, const CrossSectionSpec& cs,
                           std::int64_t T, std::int64_t tau, std::uint64_t seed);

}  // namespace jointlim
