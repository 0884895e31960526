#include "jointlim/lrv.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "jointlim/errors.hpp"

namespace jointlim {

namespace {

// Parzen window on z in [0, 1].
double parzen_weight(double z) {
  if (z <= 0.5) return 1.0 - 6.0 * z * z + 6.0 * z * z * z;
  if (z <= 1.0) {
    const double c = 1.0 - z;
    return 2.0 * c * c * c;
  }
  return 0.0;
}

// Quadratic spectral window; k(0) = 1, support unbounded.
double qs_weight(double z) {
  if (z == 0.0) return 1.0;
  const double a = 6.0 * std::numbers::pi * z / 5.0;
  return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * z * z) *
         (std::sin(a) / a - std::cos(a));
}

}  // namespace

std::int64_t auto_bandwidth(std::int64_t tau) {
  if (tau < 2) throw parameter_error("auto bandwidth requires tau >= 2");
  return static_cast<std::int64_t>(
      std::floor(4.0 * std::pow(static_cast<double>(tau) / 100.0, 2.0 / 9.0)));
}

LrvEstimate hac(std::span<const double> series, const LrvConfig& cfg) {
  const std::int64_t tau = static_cast<std::int64_t>(series.size());
  if (tau < 2) throw parameter_error("hac requires tau >= 2");
  if (cfg.bandwidth && *cfg.bandwidth < 0) {
    throw parameter_error("fixed bandwidth must be non-negative");
  }

  LrvEstimate est;
  est.kernel = cfg.kernel;
  est.tau = tau;

  std::int64_t b = cfg.bandwidth ? *cfg.bandwidth : auto_bandwidth(tau);
  if (b >= tau) {
    b = tau - 1;
    est.bandwidth_clipped = true;
  }
  est.bandwidth_used = b;

  std::vector<double> x(series.begin(), series.end());
  if (cfg.demean) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(tau);
    for (double& v : x) v -= mean;
  }

  auto gamma_hat = [&](std::int64_t j) {
    double acc = 0.0;
    for (std::int64_t s = j; s < tau; ++s) {
      acc += x[static_cast<std::size_t>(s)] * x[static_cast<std::size_t>(s - j)];
    }
    return acc / static_cast<double>(tau);
  };

  double value = gamma_hat(0);
  if (b > 0) {
    // QS has unbounded support, so it weights every available lag; the
    // truncating kernels stop at the bandwidth.
    const std::int64_t last =
        cfg.kernel == Kernel::quadratic_spectral ? tau - 1 : b;
    for (std::int64_t j = 1; j <= last; ++j) {
      const double z = static_cast<double>(j) / static_cast<double>(b + 1);
      double w = 0.0;
      switch (cfg.kernel) {
        case Kernel::bartlett:
          w = 1.0 - z;
          break;
        case Kernel::parzen:
          w = parzen_weight(z);
          break;
        case Kernel::quadratic_spectral:
          w = qs_weight(z);
          break;
      }
      if (w != 0.0) value += 2.0 * w * gamma_hat(j);
    }
  }
  est.value = value;
  return est;
}

}  // namespace jointlim
