#pragma once

#include <vector>

namespace mnap::stats {

double normal_pdf(double x);
double normal_cdf(double x);
// Upper tail P(Z > x), accurate for large x where 1 - cdf cancels.
double normal_sf(double x);
// Inverse of normal_cdf (Wichura AS 241, ~1e-15 relative accuracy).
double normal_quantile(double p);

// Moments of Normal(mu, sd^2) truncated to [lower, inf).
double tnorm_lower_mean(double mu, double sd, double lower);
double tnorm_lower_var(double mu, double sd, double lower);
// Truncated to (-inf, upper].
double tnorm_upper_mean(double mu, double sd, double upper);
double tnorm_upper_var(double mu, double sd, double upper);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int n = 0;
};

// One-sample Kolmogorov-Smirnov test against Uniform(0,1).
// Exact small-sample p-value (Marsaglia-Tsang-Wang evaluation of the
// Kolmogorov distribution); asymptotic series for huge n.
KsResult ks_uniform_test(std::vector<double> values);

// P(D_n < d) for the one-sample KS statistic, exact.
double ks_cdf(int n, double d);

// Asymptotic survival function Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
double kolmogorov_asymptotic_sf(double t);

double mean(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);
// Empirical quantile with linear interpolation between order statistics.
double quantile(std::vector<double> xs, double p);

}  // namespace mnap::stats
