#include <cmath>
#include <random>

#include "doctest.h"
#include "jointlim/dgp.hpp"
#include "jointlim/errors.hpp"
#include "jointlim/estimate.hpp"
#include "jointlim/rng.hpp"

using namespace jointlim;

namespace {

ProcessSpec ar1(double theta, double sd = 1.0, double mean = 0.0) {
  ProcessSpec spec;
  spec.family = Family::ar1;
  spec.params = {theta};
  spec.innovation_sd = sd;
  spec.mean = mean;
  return spec;
}

CrossSectionSpec cross_spec(Upsilon upsilon, std::int64_t n, double beta = 1.0,
                            double u_sd = 1.0) {
  CrossSectionSpec cs;
  cs.n = n;
  cs.upsilon = upsilon;
  cs.beta = beta;
  cs.u_sd = u_sd;
  return cs;
}

}  // namespace

TEST_CASE("cross-section spec validation") {
  CHECK_THROWS_AS(cross_spec(Upsilon::potential_outcomes, 1).validate(), parameter_error);
  CHECK_THROWS_AS(cross_spec(Upsilon::potential_outcomes, 100, 1.0, 0.0).validate(),
                  parameter_error);
  CrossSectionSpec bad = cross_spec(Upsilon::potential_outcomes, 100);
  bad.treat_prob = 1.0;
  CHECK_THROWS_AS(bad.validate(), parameter_error);
  CrossSectionSpec custom = cross_spec(Upsilon::custom, 100);
  CHECK_THROWS_AS(custom.validate(), parameter_error);  // no hook attached
  custom.custom_fn = [](double nu1, double u) { return nu1 + u; };
  CHECK_NOTHROW(custom.validate());
}

TEST_CASE("conditional moments of the built-ins") {
  const auto po = conditional_moments(cross_spec(Upsilon::potential_outcomes, 10), 1.7);
  CHECK(po.first == 0.0);
  CHECK(po.second == 4.0);

  const auto degenerate = conditional_moments(cross_spec(Upsilon::scaled_shock, 10), 0.0);
  CHECK(degenerate.first == 0.0);
  CHECK(degenerate.second == 0.0);

  const auto ss = conditional_moments(cross_spec(Upsilon::scaled_shock, 10, 1.0, 2.0), 3.0);
  CHECK(ss.first == 0.0);
  CHECK(ss.second == 36.0);

  CrossSectionSpec custom = cross_spec(Upsilon::custom, 10);
  custom.custom_fn = [](double, double u) { return u; };
  CHECK_THROWS_AS(conditional_moments(custom, 1.0), not_implemented_error);
}

TEST_CASE("scaled-shock variance against a brute-force sample") {
  // sigma^2(nu1) = nu1^2 u_sd^2 checked against 10^6 draws of nu1 * u.
  const CrossSectionSpec cs = cross_spec(Upsilon::scaled_shock, 10, 1.0, 2.0);
  const double nu1 = 3.0;
  auto engine = make_engine(77);
  std::normal_distribution<double> law(0.0, cs.u_sd);
  double acc = 0.0;
  const int m = 1000000;
  for (int i = 0; i < m; ++i) {
    const double y = upsilon_value(cs, nu1, law(engine), 0);
    acc += y * y;
  }
  const double mc = acc / m;
  CHECK(mc == doctest::Approx(conditional_moments(cs, nu1).second).epsilon(0.01));
}

TEST_CASE("difference in arm means recovers pi_1 on a large sample") {
  const auto sample = generate_joint(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 10000),
                                     10000, 31);
  const double pi1 = 1.0 / (1.0 + sample.nu1 * sample.nu1);
  // asymptotic sd of the difference in means is 2 u_sd / sqrt(n)
  CHECK(std::abs(estimate_pi1(sample.cross) - pi1) < 4.0 * 2.0 / std::sqrt(10000.0));
}

TEST_CASE("joint sample basic identities") {
  const ProcessSpec proc = ar1(0.5, 1.0, 2.5);
  const auto sample = generate_joint(proc, cross_spec(Upsilon::potential_outcomes, 500), 800, 9);
  CHECK(sample.z.size() == 800);
  CHECK(sample.cross.size() == 500);
  CHECK(sample.nu1 == sample.shocks.values.front());
  for (std::size_t s = 0; s < sample.z.size(); ++s) {
    CHECK(sample.z[s] - proc.mean == sample.shocks.values[s]);
  }
  CHECK(sample.kappa == doctest::Approx(500.0 / 800.0));
}

TEST_CASE("joint generation is reproducible") {
  const auto a = generate_joint(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 200), 300, 11);
  const auto b = generate_joint(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 200), 300, 11);
  CHECK(a.shocks.values == b.shocks.values);
  REQUIRE(a.cross.size() == b.cross.size());
  for (std::size_t i = 0; i < a.cross.size(); ++i) {
    CHECK(a.cross[i].y_tilde == b.cross[i].y_tilde);
    CHECK(a.cross[i].d == b.cross[i].d);
  }
}

TEST_CASE("streams are disjoint: the u draw never touches the shock or d stream") {
  const auto narrow = generate_joint(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 200, 1.0, 1.0),
                                     300, 13);
  const auto wide = generate_joint(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 200, 1.0, 2.0),
                                   300, 13);
  CHECK(narrow.shocks.values == wide.shocks.values);
  bool y_differs = false;
  for (std::size_t i = 0; i < narrow.cross.size(); ++i) {
    CHECK(narrow.cross[i].d == wide.cross[i].d);
    y_differs = y_differs || narrow.cross[i].y_tilde != wide.cross[i].y_tilde;
  }
  CHECK(y_differs);
  // The shock path equals a direct draw from its own derived stream.
  const auto direct = generate_shocks(ar1(0.5), 300, derive_seed(13, 0));
  CHECK(narrow.shocks.values == direct.values);
}

TEST_CASE("conditional independence of the two samples given nu_1") {
  // Hold nu_1 fixed, condition the remaining path on it, and redraw the
  // cross-section each replication: Y_n and Z_tau should be uncorrelated.
  const double nu1 = 0.8;
  const double theta = 0.5;
  const std::int64_t tau = 200;
  const std::int64_t n = 200;
  const int R = 2000;
  const CrossSectionSpec cs = cross_spec(Upsilon::potential_outcomes, n);

  std::vector<double> Y(R), Z(R);
  for (int r = 0; r < R; ++r) {
    const std::uint64_t seed = derive_seed(4242, static_cast<std::uint64_t>(r));
    auto engine = make_engine(derive_seed(seed, 0));
    std::normal_distribution<double> innov(0.0, 1.0);
    double nu = nu1;
    double sum = nu1;
    for (std::int64_t s = 1; s < tau; ++s) {
      nu = theta * nu + innov(engine);
      sum += nu;
    }
    Z[r] = sum / std::sqrt(static_cast<double>(tau));
    const CrossDraw draw = draw_heterogeneity(cs, n, derive_seed(seed, 1), derive_seed(seed, 2));
    double acc = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      acc += upsilon_value(cs, nu1, draw.u[static_cast<std::size_t>(i)],
                           draw.d[static_cast<std::size_t>(i)]);
    }
    Y[r] = acc / std::sqrt(static_cast<double>(n));
  }
  double my = 0.0, mz = 0.0;
  for (int r = 0; r < R; ++r) {
    my += Y[r];
    mz += Z[r];
  }
  my /= R;
  mz /= R;
  double syz = 0.0, sy = 0.0, sz = 0.0;
  for (int r = 0; r < R; ++r) {
    syz += (Y[r] - my) * (Z[r] - mz);
    sy += (Y[r] - my) * (Y[r] - my);
    sz += (Z[r] - mz) * (Z[r] - mz);
  }
  const double corr = syz / std::sqrt(sy * sz);
  CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(R)));
}

TEST_CASE("influence values are conditionally centered") {
  for (auto upsilon : {Upsilon::potential_outcomes, Upsilon::scaled_shock}) {
    const CrossSectionSpec cs = cross_spec(upsilon, 40000);
    const double nu1 = 1.3;
    const CrossDraw draw = draw_heterogeneity(cs, cs.n, 21, 22);
    double acc = 0.0;
    for (std::int64_t i = 0; i < cs.n; ++i) {
      acc += upsilon_value(cs, nu1, draw.u[static_cast<std::size_t>(i)],
                           draw.d[static_cast<std::size_t>(i)]);
    }
    const double sigma = std::sqrt(conditional_moments(cs, nu1).second);
    // |sample mean| * sqrt(n) stays bounded when mu(nu1) = 0
    CHECK(std::abs(acc / std::sqrt(static_cast<double>(cs.n))) < 4.0 * sigma);
  }
}

TEST_CASE("influence_from_record inverts the outcome equation") {
  for (auto upsilon : {Upsilon::potential_outcomes, Upsilon::scaled_shock}) {
    const CrossSectionSpec cs = cross_spec(upsilon, 100, 1.0, 1.5);
    const auto sample = generate_joint(ar1(0.5), cs, 50, 17);
    const double pi1 = cs.beta / (1.0 + sample.nu1 * sample.nu1);
    const CrossDraw draw = draw_heterogeneity(cs, cs.n, sample.meta.u_seed, sample.meta.d_seed);
    for (std::size_t i = 0; i < sample.cross.size(); ++i) {
      const double direct = upsilon_value(cs, sample.nu1, draw.u[i], sample.cross[i].d);
      const double recovered = influence_from_record(cs, pi1, sample.cross[i]);
      CHECK(recovered == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform heterogeneity keeps the variance contract") {
  CrossSectionSpec cs = cross_spec(Upsilon::potential_outcomes, 200000, 1.0, 1.5);
  cs.u_law = NoiseLaw::uniform;
  const CrossDraw draw = draw_heterogeneity(cs, cs.n, 5, 6);
  double acc = 0.0, mean = 0.0;
  for (double u : draw.u) mean += u;
  mean /= static_cast<double>(cs.n);
  for (double u : draw.u) acc += (u - mean) * (u - mean);
  const double var = acc / static_cast<double>(cs.n - 1);
  CHECK(var == doctest::Approx(2.25).epsilon(0.02));
  // bounded support
  for (double u : draw.u) CHECK(std::abs(u) <= 1.5 * std::sqrt(3.0) + 1e-12);
}

TEST_CASE("panel: pi values, beta = 0 noise case, and shape") {
  const ProcessSpec proc = ar1(0.5);
  const auto panel = generate_panel(proc, cross_spec(Upsilon::potential_outcomes, 50), 3, 100, 23);
  CHECK(panel.T == 3);
  CHECK(panel.y.size() == 50);
  CHECK(panel.pi.size() == 3);
  for (std::int64_t t = 0; t < 3; ++t) {
    const double nu_t = panel.shocks.values[static_cast<std::size_t>(t)];
    CHECK(panel.pi[static_cast<std::size_t>(t)] == 1.0 / (1.0 + nu_t * nu_t));
  }

  // beta = 0 kills every pi_t; outcomes reduce to the pure u_i noise, equal
  // across periods.
  const auto noise = generate_panel(proc, cross_spec(Upsilon::potential_outcomes, 50, 0.0), 2, 100, 23);
  for (const auto& pi_t : noise.pi) CHECK(pi_t == 0.0);
  for (const auto& yi : noise.y) CHECK(yi[0] == yi[1]);
}

TEST_CASE("panel first coordinate matches the single-period conditional law") {
  // Conditional on the shocks, var(y_{i,1}) = pi_1^2 p(1-p) + u_sd^2, the same
  // as the single-period observable.
  const auto panel = generate_panel(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 200000), 3,
                                    100, 29);
  const double pi1 = panel.pi[0];
  const double target = pi1 * pi1 * 0.25 + 1.0;
  double mean = 0.0;
  for (const auto& yi : panel.y) mean += yi[0];
  mean /= static_cast<double>(panel.y.size());
  double acc = 0.0;
  for (const auto& yi : panel.y) acc += (yi[0] - mean) * (yi[0] - mean);
  const double var = acc / static_cast<double>(panel.y.size() - 1);
  CHECK(var == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("panel rejects bad T") {
  CHECK_THROWS_AS(generate_panel(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 50), 1, 100, 1),
                  parameter_error);
  CHECK_THROWS_AS(generate_panel(ar1(0.5), cross_spec(Upsilon::potential_outcomes, 50), 20, 10, 1),
                  parameter_error);
}
