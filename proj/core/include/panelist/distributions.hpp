#pragma once

namespace panelist {

/// Regularized incomplete beta I_x(a, b) for a, b > 0 and x in [0, 1].
double regularized_beta(double x, double a, double b);

/// CDF of the F distribution with (d1, d2) degrees of freedom.
/// Throws StatsError for x < 0 or d1, d2 < 1.
double f_cdf(double x, double d1, double d2);

/// Upper tail 1 - f_cdf, computed without cancellation.
double f_sf(double x, double d1, double d2);

}  // namespace panelist

namespace panelist {

/// Standard normal quantile (inverse CDF) for p in (0, 1).
double normal_quantile(double p);

/// Standard normal upper tail P(Z > z).
double normal_sf(double z);

}  // namespace panelist
