#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace jointlim {

enum class Kernel { bartlett, parzen, quadratic_spectral };

// Kernel/bandwidth knobs for the long-run variance estimator. An empty
// bandwidth means the deterministic fixed rule of auto_bandwidth(). With
// demean on (the default) the sample mean is removed first, so the series
// handed in may be the observed z rather than the centered shocks.
struct LrvConfig {
  Kernel kernel = Kernel::bartlett;
  std::optional<std::int64_t> bandwidth;  // nullopt = auto rule
  bool demean = true;
};

struct LrvEstimate {
  double value = 0.0;
  Kernel kernel = Kernel::bartlett;
  std::int64_t bandwidth_used = 0;
  std::int64_t tau = 0;
  bool bandwidth_clipped = false;  // requested bandwidth >= tau, clipped to tau-1
};

// Fixed bandwidth rule b = floor(4 (tau/100)^{2/9}).
std::int64_t auto_bandwidth(std::int64_t tau);

// Kernel-weighted sum of sample autocovariances
//   eta_hat = g_0 + 2 sum_{j>=1} w(j, b) g_j,
//   g_j = tau^{-1} sum_{s=j+1}^{tau} x_s x_{s-j}
// on the (optionally demeaned) series. The tau divisor (rather than tau - j)
// keeps the estimate positive semidefinite for these kernels. Weight
// conventions, pinned because texts differ:
//   bartlett            w = 1 - j/(b+1), lags 1..b; b = 0 means lag 0 only
//   parzen              standard Parzen window in z = j/(b+1), lags 1..b
//   quadratic_spectral  QS window in z = j/(b+1), summed over all lags < tau
//                       (unbounded support); b = 0 means lag 0 only
// Throws parameter_error for tau < 2.
LrvEstimate hac(std::span<const double> series, const LrvConfig& cfg = {});

}  // namespace jointlim
