#pragma once

namespace pricekit {

// Regularized upper incomplete gamma Q(a, x); series/continued-fraction
// evaluation, absolute accuracy better than 1e-13 over the tested range.
double regularized_gamma_q(double a, double x);

// Survival function of the chi-square distribution with df degrees of freedom.
double chi2_sf(double x, double df);

// Standard normal CDF and survival function via erfc.
double normal_cdf(double z);
double normal_sf(double z);

}  // namespace pricekit
