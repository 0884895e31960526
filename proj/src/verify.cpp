#include "jointlim/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include "jointlim/errors.hpp"
#include "jointlim/infer.hpp"
#include "jointlim/rng.hpp"

namespace jointlim {

namespace {

// Replication r pulls its own derived seed, so the schedule below is free to
// hand indices to workers in any order; determinism comes from reducing the
// per-replication slots in index order afterwards.
template <typename Fn>
void parallel_map(std::int64_t count, int workers, Fn&& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || count < 2) {
    for (std::int64_t r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    while (true) {
      const std::int64_t r = next.fetch_add(1, std::memory_order_relaxed);
      if (r >= count) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

double sample_variance(std::span<const double> x) {
  const std::size_t m = x.size();
  if (m < 2) throw parameter_error("sample variance needs at least two values");
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(m);
  double acc = 0.0;
  for (double v : x) acc += (v - mean) * (v - mean);
  return acc / static_cast<double>(m - 1);
}

double median_abs(std::vector<double>& values) {
  if (values.empty()) throw parameter_error("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                   values.end());
  double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// "coord:<k>" with 1-based k in [1, T]; returns the 0-based index.
std::int64_t parse_coord_tag(const std::string& q_tag, std::int64_t T) {
  std::int64_t k = 0;
  try {
    k = std::stoll(q_tag.substr(6));
  } catch (const std::exception&) {
    throw parameter_error("q coordinate must be an integer, got '" + q_tag + "'");
  }
  if (k < 1 || k > T) {
    throw parameter_error("q coordinate out of range 1.." + std::to_string(T));
  }
  return k - 1;
}

}  // namespace

double Zeta::operator()(double nu1) const {
  switch (kind) {
    case ZetaKind::one:
      return 1.0;
    case ZetaKind::indicator:
      return nu1 > threshold ? 1.0 : 0.0;
    case ZetaKind::bounded_smooth:
      return std::tanh(nu1);
  }
  throw parameter_error("unknown zeta kind");
}

std::string Zeta::name() const {
  switch (kind) {
    case ZetaKind::one:
      return "one";
    case ZetaKind::indicator:
      return "indicator:" + std::to_string(threshold);
    case ZetaKind::bounded_smooth:
      return "tanh";
  }
  return "?";
}

Zeta Zeta::parse(const std::string& text) {
  if (text == "one") return {ZetaKind::one, 0.0};
  if (text == "tanh") return {ZetaKind::bounded_smooth, 0.0};
  if (text.rfind("indicator", 0) == 0) {
    Zeta z{ZetaKind::indicator, 0.0};
    if (text.size() > 9) {
      if (text[9] != ':') throw parameter_error("zeta: expected indicator:<threshold>");
      z.threshold = std::stod(text.substr(10));
    }
    return z;
  }
  throw parameter_error("zeta must be one | indicator[:<c>] | tanh, got '" + text + "'");
}

std::vector<CfPoint> default_cf_grid() {
  std::vector<CfPoint> grid;
  for (int s = -2; s <= 2; ++s) {
    for (int t = -2; t <= 2; ++t) {
      grid.push_back({static_cast<double>(s), static_cast<double>(t)});
    }
  }
  return grid;
}

void McConfig::validate() const {
  if (replications < 1) throw parameter_error("mc replications must be >= 1");
  if (n_grid.empty() || tau_grid.empty()) {
    throw parameter_error("mc n_grid and tau_grid must be non-empty");
  }
  if (n_grid.size() != tau_grid.size()) {
    throw parameter_error("mc n_grid and tau_grid must have equal length");
  }
  for (auto n : n_grid) {
    if (n < 2) throw parameter_error("mc n_grid entries must be >= 2");
  }
  for (auto t : tau_grid) {
    if (t < 2) throw parameter_error("mc tau_grid entries must be >= 2");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) throw parameter_error("alpha must lie in (0,1]");
  if (workers < 1) throw parameter_error("workers must be >= 1");
  if (kappa_policy == KappaPolicy::declared && !(declared_kappa > 0.0)) {
    throw parameter_error("declared kappa must be positive");
  }
  proc.validate();
  cs.validate();
}

namespace {

struct RepOut {
  bool degenerate = false;
  double wald_draw = 0.0;
  double beta_hat = 0.0;
  double eta_hat = 0.0;
  double nu1_hat = 0.0;
  std::uint8_t covered = 0;
  double Z = 0.0;
  double Y = 0.0;
  double nu1_true = 0.0;
  double sigma2_true = 0.0;
  double zeta_val = 0.0;
};

// Shared per-replication worker for run_mc and the joint cf diagnostic.
RepOut simulate_replication(const McConfig& cfg, std::int64_t n, std::int64_t tau,
                            std::int64_t r, bool with_estimation) {
  RepOut out;
  CrossSectionSpec cs = cfg.cs;
  cs.n = n;
  const JointSample sample =
      generate_joint(cfg.proc, cs, tau, derive_seed(cfg.master_seed, static_cast<std::uint64_t>(r)));
  out.nu1_true = sample.nu1;
  out.zeta_val = cfg.zeta(sample.nu1);
  // Only the cf targets need the analytic conditional variance.
  out.sigma2_true = cfg.cf_grid.empty() ? 0.0 : conditional_moments(cs, sample.nu1).second;

  const double pi1_true = cs.beta / (1.0 + sample.nu1 * sample.nu1);
  const double phi_hat = estimate_phi(sample.z);
  out.Z = std::sqrt(static_cast<double>(tau)) * (phi_hat - cfg.proc.mean);

  if (cfg.use_raw_estimator_yn) {
    out.Y = std::sqrt(static_cast<double>(n)) * (estimate_pi1(sample.cross) - pi1_true);
  } else {
    double acc = 0.0;
    for (const auto& rec : sample.cross) acc += influence_from_record(cs, pi1_true, rec);
    out.Y = acc / std::sqrt(static_cast<double>(n));
  }

  if (with_estimation) {
    const EstimateSet est =
        estimate_all(sample, cfg.kappa_policy, cfg.declared_kappa);
    const LrvEstimate eta = hac(sample.z, cfg.lrv);
    const InferenceResult res = wald(est, eta.value, cs.beta, cfg.alpha);
    out.wald_draw = res.statistic;
    out.beta_hat = est.beta_hat;
    out.eta_hat = eta.value;
    out.nu1_hat = est.nu1_hat;
    out.covered = (res.ci_low <= cs.beta && cs.beta <= res.ci_high) ? 1 : 0;
  }
  return out;
}

}  // namespace

McReport run_mc(const McConfig& cfg) {
  cfg.validate();
  if (cfg.cs.upsilon == Upsilon::custom && !cfg.cf_grid.empty()) {
    throw not_implemented_error(
        "cf diagnostics need analytic conditional moments; clear cf_grid for a custom upsilon");
  }
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t n = cfg.n_grid.front();
  const std::int64_t tau = cfg.tau_grid.front();
  const std::int64_t R = cfg.replications;

  std::vector<RepOut> slots(static_cast<std::size_t>(R));
  parallel_map(R, cfg.workers, [&](std::int64_t r) {
    try {
      slots[static_cast<std::size_t>(r)] = simulate_replication(cfg, n, tau, r, true);
    } catch (const degenerate_design_error&) {
      slots[static_cast<std::size_t>(r)].degenerate = true;
    }
  });

  McReport report;
  report.n_used = n;
  report.tau_used = tau;
  report.beta_true = cfg.cs.beta;
  report.eta_true = long_run_variance_true(cfg.proc);

  const std::size_t g_count = cfg.cf_grid.size();
  std::vector<std::complex<double>> emp_sum(g_count, {0.0, 0.0});
  std::vector<double> target_inner(g_count, 0.0);

  std::int64_t valid = 0;
  std::int64_t covered_count = 0;
  for (const auto& rep : slots) {
    if (rep.degenerate) {
      ++report.excluded_degenerate;
      continue;
    }
    ++valid;
    report.wald_draws.push_back(rep.wald_draw);
    report.beta_hats.push_back(rep.beta_hat);
    report.eta_hats.push_back(rep.eta_hat);
    report.nu1_hats.push_back(rep.nu1_hat);
    report.covered.push_back(rep.covered);
    covered_count += rep.covered;
    for (std::size_t g = 0; g < g_count; ++g) {
      const double ang = cfg.cf_grid[g].s * rep.Z + cfg.cf_grid[g].t * rep.Y;
      emp_sum[g] += std::complex<double>(rep.zeta_val * std::cos(ang),
                                         rep.zeta_val * std::sin(ang));
      target_inner[g] +=
          rep.zeta_val * std::exp(-0.5 * cfg.cf_grid[g].t * cfg.cf_grid[g].t * rep.sigma2_true);
    }
  }
  if (valid == 0) throw degenerate_design_error("every replication was degenerate");

  report.coverage = static_cast<double>(covered_count) / static_cast<double>(valid);
  report.ks_stat = ks_distance(report.wald_draws);
  report.cf_empirical.resize(g_count);
  report.cf_target.resize(g_count);
  for (std::size_t g = 0; g < g_count; ++g) {
    report.cf_empirical[g] = emp_sum[g] / static_cast<double>(valid);
    report.cf_target[g] =
        std::exp(-0.5 * cfg.cf_grid[g].s * cfg.cf_grid[g].s * report.eta_true) *
        (target_inner[g] / static_cast<double>(valid));
    report.cf_max_deviation =
        std::max(report.cf_max_deviation, std::abs(report.cf_empirical[g] - report.cf_target[g]));
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

JointStableReport joint_stable_check(const McConfig& cfg) {
  cfg.validate();
  if (cfg.cs.upsilon == Upsilon::custom) {
    throw not_implemented_error("cf diagnostics need analytic conditional moments");
  }
  const std::int64_t n = cfg.n_grid.front();
  const std::int64_t tau = cfg.tau_grid.front();
  const std::int64_t R = cfg.replications;

  std::vector<RepOut> slots(static_cast<std::size_t>(R));
  parallel_map(R, cfg.workers, [&](std::int64_t r) {
    slots[static_cast<std::size_t>(r)] = simulate_replication(cfg, n, tau, r, false);
  });

  JointStableReport report;
  report.grid = cfg.cf_grid;
  report.replications = R;
  report.eta_true = long_run_variance_true(cfg.proc);

  const std::size_t g_count = cfg.cf_grid.size();
  std::vector<std::complex<double>> emp_sum(g_count, {0.0, 0.0});
  std::vector<double> target_inner(g_count, 0.0);
  for (const auto& rep : slots) {
    for (std::size_t g = 0; g < g_count; ++g) {
      const double ang = cfg.cf_grid[g].s * rep.Z + cfg.cf_grid[g].t * rep.Y;
      emp_sum[g] += std::complex<double>(rep.zeta_val * std::cos(ang),
                                         rep.zeta_val * std::sin(ang));
      target_inner[g] +=
          rep.zeta_val * std::exp(-0.5 * cfg.cf_grid[g].t * cfg.cf_grid[g].t * rep.sigma2_true);
    }
  }
  report.cf_empirical.resize(g_count);
  report.cf_target.resize(g_count);
  for (std::size_t g = 0; g < g_count; ++g) {
    report.cf_empirical[g] = emp_sum[g] / static_cast<double>(R);
    report.cf_target[g] =
        std::exp(-0.5 * cfg.cf_grid[g].s * cfg.cf_grid[g].s * report.eta_true) *
        (target_inner[g] / static_cast<double>(R));
    report.max_deviation =
        std::max(report.max_deviation, std::abs(report.cf_empirical[g] - report.cf_target[g]));
  }
  return report;
}

ConditionalCltReport conditional_clt_check(const CrossSectionSpec& cs_in, double nu1_fixed,
                                           std::int64_t n, std::int64_t R,
                                           std::uint64_t seed, int workers) {
  if (n < 1) throw parameter_error("n must be >= 1");
  if (R < 2) throw parameter_error("need at least two replications");
  CrossSectionSpec cs = cs_in;
  cs.n = std::max<std::int64_t>(n, 2);  // the check's n overrides the spec field
  cs.validate();
  const double sigma2 = conditional_moments(cs, nu1_fixed).second;
  if (sigma2 == 0.0) {
    throw degenerate_variance_error("sigma^2(nu1) = 0; the normalized average is degenerate");
  }

  std::vector<double> y(static_cast<std::size_t>(R));
  parallel_map(R, workers, [&](std::int64_t r) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const CrossDraw draw =
        draw_heterogeneity(cs, n, derive_seed(rep_seed, 1), derive_seed(rep_seed, 2));
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      acc += upsilon_value(cs, nu1_fixed, draw.u[static_cast<std::size_t>(i)],
                           draw.d[static_cast<std::size_t>(i)]);
    }
    y[static_cast<std::size_t>(r)] = acc / std::sqrt(static_cast<double>(n));
  });

  ConditionalCltReport report;
  report.n = n;
  report.replications = R;
  report.sigma2 = sigma2;
  report.variance_ratio = sample_variance(y) / sigma2;
  const double sigma = std::sqrt(sigma2);
  for (auto& v : y) v /= sigma;
  report.ks = ks_distance(y);
  return report;
}

ConditionalCltReport panel_clt_check(const ProcessSpec& proc, const CrossSectionSpec& cs_in,
                                     std::int64_t T, const std::string& q_tag,
                                     std::int64_t n, std::int64_t R, std::uint64_t seed,
                                     int workers) {
  proc.validate();
  if (n < 1) throw parameter_error("n must be >= 1");
  CrossSectionSpec cs = cs_in;
  cs.n = std::max<std::int64_t>(n, 2);
  cs.validate();
  if (T < 2) throw parameter_error("panel requires T >= 2");

  std::int64_t coord = -1;  // -1 = mean of coordinates
  if (q_tag.rfind("coord:", 0) == 0) {
    coord = parse_coord_tag(q_tag, T);
  } else if (q_tag != "mean") {
    throw parameter_error("q must be coord:<k> or mean, got '" + q_tag + "'");
  }
  if (coord < 0 && std::abs(cs.treat_prob - 0.5) > 1e-12) {
    throw parameter_error("q = mean requires treat_prob = 1/2 for a centered aggregate");
  }

  // One fixed shock draw conditions the whole experiment.
  const ShockPath shocks = generate_shocks(proc, T, derive_seed(seed, 0));

  // Conditional variance of q applied to the per-period shock-coupled values.
  double sigma2 = 0.0;
  if (coord >= 0) {
    sigma2 = conditional_moments(cs, shocks.values[static_cast<std::size_t>(coord)]).second;
  } else {
    switch (cs.upsilon) {
      case Upsilon::potential_outcomes:
        // Averaging T independent sign flips shrinks the variance by 1/T.
        sigma2 = 4.0 * cs.u_sd * cs.u_sd / static_cast<double>(T);
        break;
      case Upsilon::scaled_shock: {
        double m = 0.0;
        for (double v : shocks.values) m += v;
        m /= static_cast<double>(T);
        sigma2 = m * m * cs.u_sd * cs.u_sd;
        break;
      }
      case Upsilon::custom:
        throw not_implemented_error("panel q-variance is analytic only for built-ins");
    }
  }
  if (sigma2 == 0.0) {
    throw degenerate_variance_error("sigma^2(nu_1..nu_T) = 0 under q");
  }

  std::vector<double> y(static_cast<std::size_t>(R));
  parallel_map(R, workers, [&](std::int64_t r) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r) + 1);
    const CrossDraw draw =
        draw_heterogeneity(cs, n, derive_seed(rep_seed, 1), derive_seed(rep_seed, 2), T);
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      double q_val = 0.0;
      if (coord >= 0) {
        const std::int64_t t = coord;
        q_val = upsilon_value(cs, shocks.values[static_cast<std::size_t>(t)],
                              draw.u[static_cast<std::size_t>(i)],
                              draw.d[static_cast<std::size_t>(i * T + t)]);
      } else {
        for (std::int64_t t = 0; t < T; ++t) {
          q_val += upsilon_value(cs, shocks.values[static_cast<std::size_t>(t)],
                                 draw.u[static_cast<std::size_t>(i)],
                                 draw.d[static_cast<std::size_t>(i * T + t)]);
        }
        q_val /= static_cast<double>(T);
      }
      acc += q_val;
    }
    y[static_cast<std::size_t>(r)] = acc / std::sqrt(static_cast<double>(n));
  });

  ConditionalCltReport report;
  report.n = n;
  report.replications = R;
  report.sigma2 = sigma2;
  report.variance_ratio = sample_variance(y) / sigma2;
  const double sigma = std::sqrt(sigma2);
  for (auto& v : y) v /= sigma;
  report.ks = ks_distance(y);
  return report;
}

StableTsReport stable_ts_check(const ProcessSpec& proc, std::int64_t tau, std::int64_t R,
                               std::uint64_t seed, const Zeta& zeta, int workers) {
  proc.validate();
  if (tau < 1) throw parameter_error("tau must be >= 1");
  if (R < 2) throw parameter_error("need at least two replications");

  struct Slot {
    double Z = 0.0;
    double zeta_val = 0.0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(R));
  parallel_map(R, workers, [&](std::int64_t r) {
    const ShockPath path =
        generate_shocks(proc, tau, derive_seed(seed, static_cast<std::uint64_t>(r)));
    double mean = 0.0;
    for (double v : path.values) mean += v;
    mean /= static_cast<double>(tau);
    slots[static_cast<std::size_t>(r)].Z = std::sqrt(static_cast<double>(tau)) * mean;
    slots[static_cast<std::size_t>(r)].zeta_val = zeta(path.values.front());
  });

  StableTsReport report;
  report.replications = R;
  report.eta_true = long_run_variance_true(proc);
  report.s_grid = {-2.0, -1.0, 0.0, 1.0, 2.0};

  std::vector<double> z(static_cast<std::size_t>(R));
  for (std::size_t r = 0; r < z.size(); ++r) z[r] = slots[r].Z;
  report.sample_variance = sample_variance(z);
  const double root_eta = std::sqrt(report.eta_true);
  std::vector<double> standardized = z;
  for (auto& v : standardized) v /= root_eta;
  report.ks = ks_distance(standardized);

  // Empirical covariance between zeta(nu_1) and e^{isZ}: a stable limit makes
  // the exponential asymptotically uncorrelated with every bounded function of
  // nu_1.
  for (double s : report.s_grid) {
    std::complex<double> joint{0.0, 0.0};
    std::complex<double> cf{0.0, 0.0};
    double zeta_mean = 0.0;
    for (const auto& slot : slots) {
      const std::complex<double> e(std::cos(s * slot.Z), std::sin(s * slot.Z));
      joint += slot.zeta_val * e;
      cf += e;
      zeta_mean += slot.zeta_val;
    }
    joint /= static_cast<double>(R);
    cf /= static_cast<double>(R);
    zeta_mean /= static_cast<double>(R);
    const double dev = std::abs(joint - zeta_mean * cf);
    report.independence_deviation.push_back(dev);
    report.max_independence_deviation = std::max(report.max_independence_deviation, dev);
  }
  return report;
}

ExpansionResidualReport expansion_residual_check(const McConfig& cfg) {
  cfg.validate();
  const std::size_t points = cfg.n_grid.size();
  const double kappa0 =
      static_cast<double>(cfg.n_grid[0]) / static_cast<double>(cfg.tau_grid[0]);
  for (std::size_t g = 1; g < points; ++g) {
    const double k =
        static_cast<double>(cfg.n_grid[g]) / static_cast<double>(cfg.tau_grid[g]);
    if (std::abs(k - kappa0) > 1e-9 * kappa0) {
      throw parameter_error("expansion residual check needs a constant n/tau across the grid");
    }
  }

  ExpansionResidualReport report;
  report.n_grid = cfg.n_grid;
  for (std::size_t g = 0; g < points; ++g) {
    const std::int64_t n = cfg.n_grid[g];
    const std::int64_t tau = cfg.tau_grid[g];
    const std::uint64_t point_seed = derive_seed(cfg.master_seed, static_cast<std::uint64_t>(g));
    std::vector<double> residuals(static_cast<std::size_t>(cfg.replications));
    parallel_map(cfg.replications, cfg.workers, [&](std::int64_t r) {
      CrossSectionSpec cs = cfg.cs;
      cs.n = n;
      const JointSample sample = generate_joint(
          cfg.proc, cs, tau, derive_seed(point_seed, static_cast<std::uint64_t>(r)));
      const double nu1 = sample.nu1;
      const double pi1 = cs.beta / (1.0 + nu1 * nu1);
      const double pi1_hat = estimate_pi1(sample.cross);
      const double phi_hat = estimate_phi(sample.z);
      const double beta_hat = estimate_beta(pi1_hat, phi_hat, sample.z.front());
      const double root_n = std::sqrt(static_cast<double>(n));
      const double root_tau = std::sqrt(static_cast<double>(tau));
      const double linear = (1.0 + nu1 * nu1) * root_n * (pi1_hat - pi1) -
                            2.0 * pi1 * nu1 * (root_n / root_tau) *
                                (root_tau * (phi_hat - cfg.proc.mean));
      residuals[static_cast<std::size_t>(r)] =
          std::abs(root_n * (beta_hat - cs.beta) - linear);
    });
    report.median_abs_residual.push_back(median_abs(residuals));
  }
  for (std::size_t g = 0; g + 1 < points; ++g) {
    report.ratios.push_back(report.median_abs_residual[g + 1] / report.median_abs_residual[g]);
  }
  return report;
}

double ks_distance(std::span<const double> sample) {
  if (sample.empty()) throw parameter_error("ks distance of an empty sample");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double m = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = gaussian_cdf(sorted[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / m - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / m);
  }
  return d;
}

double ks_critical_5pct(std::int64_t R) {
  if (R < 1) throw parameter_error("ks critical value needs R >= 1");
  return 1.358 / std::sqrt(static_cast<double>(R));
}

}  // namespace jointlim
