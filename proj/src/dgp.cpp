#include "jointlim/dgp.hpp"

#include <cmath>
#include <random>

#include "jointlim/errors.hpp"
#include "jointlim/rng.hpp"

namespace jointlim {

namespace {

// Sub-stream indices under a sample's master seed.
constexpr std::uint64_t kShockStream = 0;
constexpr std::uint64_t kUStream = 1;
constexpr std::uint64_t kDStream = 2;

}  // namespace

void CrossSectionSpec::validate() const {
  if (n < 2) throw parameter_error("cross-section n must be >= 2");
  if (!(u_sd > 0.0) || !std::isfinite(u_sd)) {
    throw parameter_error("u_sd must be positive and finite");
  }
  if (!std::isfinite(beta)) throw parameter_error("beta must be finite");
  if (!(treat_prob > 0.0 && treat_prob < 1.0)) {
    throw parameter_error("treat_prob must lie in (0,1)");
  }
  if (upsilon == Upsilon::custom && !custom_fn) {
    throw parameter_error("custom upsilon requires a custom_fn");
  }
}

CrossDraw draw_heterogeneity(const CrossSectionSpec& cs, std::int64_t n,
                             std::uint64_t u_seed, std::uint64_t d_seed,
                             std::int64_t periods) {
  if (n < 1) throw parameter_error("n must be >= 1");
  if (periods < 1) throw parameter_error("periods must be >= 1");

  CrossDraw draw;
  draw.u.resize(static_cast<std::size_t>(n));
  draw.d.resize(static_cast<std::size_t>(n * periods));

  std::mt19937_64 u_engine = make_engine(u_seed);
  if (cs.u_law == NoiseLaw::gaussian) {
    std::normal_distribution<double> law(0.0, cs.u_sd);
    for (auto& u : draw.u) u = law(u_engine);
  } else {
    // Uniform on [-a, a] with a = sd * sqrt(3), matching the variance.
    const double a = cs.u_sd * std::sqrt(3.0);
    std::uniform_real_distribution<double> law(-a, a);
    for (auto& u : draw.u) u = law(u_engine);
  }

  std::mt19937_64 d_engine = make_engine(d_seed);
  std::bernoulli_distribution assign(cs.treat_prob);
  for (auto& d : draw.d) d = assign(d_engine) ? 1 : 0;
  return draw;
}

double error_term(const CrossSectionSpec& cs, double nu1, double u) {
  switch (cs.upsilon) {
    case Upsilon::potential_outcomes:
      return u;
    case Upsilon::scaled_shock:
      return nu1 * u;
    case Upsilon::custom:
      return cs.custom_fn(nu1, u);
  }
  throw parameter_error("unknown upsilon");
}

double upsilon_value(const CrossSectionSpec& cs, double nu1, double u, int d) {
  switch (cs.upsilon) {
    case Upsilon::potential_outcomes:
      return 2.0 * (2.0 * d - 1.0) * u;
    case Upsilon::scaled_shock:
      return nu1 * u;
    case Upsilon::custom:
      return cs.custom_fn(nu1, u);
  }
  throw parameter_error("unknown upsilon");
}

double influence_from_record(const CrossSectionSpec& cs, double pi1_true,
                             const UnitRecord& rec) {
  const double e = rec.y_tilde - pi1_true * rec.d;
  if (cs.upsilon == Upsilon::potential_outcomes) {
    return 2.0 * (2.0 * rec.d - 1.0) * e;
  }
  return e;
}

std::pair<double, double> conditional_moments(const CrossSectionSpec& cs, double nu1) {
  const double v = cs.u_sd * cs.u_sd;
  switch (cs.upsilon) {
    case Upsilon::potential_outcomes:
      return {0.0, 4.0 * v};
    case Upsilon::scaled_shock:
      return {0.0, nu1 * nu1 * v};
    case Upsilon::custom:
      throw not_implemented_error(
          "conditional moments of a custom upsilon are not analytic; "
          "estimate them by simulation");
  }
  throw parameter_error("unknown upsilon");
}

JointSample generate_joint(const ProcessSpec& proc, const CrossSectionSpec& cs,
                           std::int64_t tau, std::uint64_t seed) {
  proc.validate();
  cs.validate();
  if (tau < 1) throw parameter_error("tau must be >= 1");

  JointSample sample;
  sample.meta.proc = proc;
  sample.meta.cs = cs;
  sample.meta.master_seed = seed;
  sample.meta.shock_seed = derive_seed(seed, kShockStream);
  sample.meta.u_seed = derive_seed(seed, kUStream);
  sample.meta.d_seed = derive_seed(seed, kDStream);

  sample.shocks = generate_shocks(proc, tau, sample.meta.shock_seed);
  sample.z.resize(sample.shocks.values.size());
  for (std::size_t s = 0; s < sample.z.size(); ++s) {
    sample.z[s] = proc.mean + sample.shocks.values[s];
    // Store the centered series as seen through z, so z[s] - mean equals the
    // stored shock bit-exactly even when the addition rounded.
    sample.shocks.values[s] = sample.z[s] - proc.mean;
  }
  sample.nu1 = sample.shocks.values.front();

  const double pi1 = cs.beta / (1.0 + sample.nu1 * sample.nu1);
  CrossDraw draw = draw_heterogeneity(cs, cs.n, sample.meta.u_seed, sample.meta.d_seed);
  sample.cross.resize(static_cast<std::size_t>(cs.n));
  for (std::size_t i = 0; i < sample.cross.size(); ++i) {
    const int d = draw.d[i];
    sample.cross[i].d = static_cast<std::uint8_t>(d);
    sample.cross[i].y_tilde = pi1 * d + error_term(cs, sample.nu1, draw.u[i]);
  }
  sample.kappa = static_cast<double>(cs.n) / static_cast<double>(tau);
  return sample;
}

PanelSample generate_panel(const ProcessSpec& proc, const CrossSectionSpec& cs,
                           std::int64_t T, std::int64_t tau, std::uint64_t seed) {
  proc.validate();
  cs.validate();
  if (T < 2) throw parameter_error("panel requires T >= 2");
  if (T > tau) throw parameter_error("panel requires T <= tau");

  PanelSample panel;
  panel.T = T;
  panel.meta.proc = proc;
  panel.meta.cs = cs;
  panel.meta.master_seed = seed;
  panel.meta.shock_seed = derive_seed(seed, kShockStream);
  panel.meta.u_seed = derive_seed(seed, kUStream);
  panel.meta.d_seed = derive_seed(seed, kDStream);

  panel.shocks = generate_shocks(proc, tau, panel.meta.shock_seed);
  panel.pi.resize(static_cast<std::size_t>(T));
  for (std::int64_t t = 0; t < T; ++t) {
    const double nu_t = panel.shocks.values[static_cast<std::size_t>(t)];
    panel.pi[static_cast<std::size_t>(t)] = cs.beta / (1.0 + nu_t * nu_t);
  }

  CrossDraw draw = draw_heterogeneity(cs, cs.n, panel.meta.u_seed, panel.meta.d_seed, T);
  panel.y.resize(static_cast<std::size_t>(cs.n));
  panel.d.resize(static_cast<std::size_t>(cs.n));
  for (std::int64_t i = 0; i < cs.n; ++i) {
    auto& yi = panel.y[static_cast<std::size_t>(i)];
    auto& di = panel.d[static_cast<std::size_t>(i)];
    yi.resize(static_cast<std::size_t>(T));
    di.resize(static_cast<std::size_t>(T));
    for (std::int64_t t = 0; t < T; ++t) {
      const double nu_t = panel.shocks.values[static_cast<std::size_t>(t)];
      const int d = draw.d[static_cast<std::size_t>(i * T + t)];
      di[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(d);
      yi[static_cast<std::size_t>(t)] =
          panel.pi[static_cast<std::size_t>(t)] * d +
          error_term(cs, nu_t, draw.u[static_cast<std::size_t>(i)]);
    }
  }
  return panel;
}

}  // namespace jointlim
