#pragma once

namespace msd {

/// Upper-tail probability of the chi-square distribution, absolute error
/// below 1e-10 (regularized incomplete gamma via series/continued fraction).
double chi2_sf(double x, int df);

/// Inverse of 1 - chi2_sf in its first argument; q must lie in (0, 1).
double chi2_quantile(double q, int df);

/// P(chi2_df(lambda_nc) > chi2_quantile(1 - alpha, df)): the power of a
/// level-alpha chi-square test under a noncentral alternative, computed from
/// the Poisson-mixture series truncated when the remaining mass is < 1e-12.
double noncentral_chi2_power(double lambda_nc, int df, double alpha);

/// Survival function of the Kolmogorov distribution,
/// Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_sf(double t);

}  // namespace msd
