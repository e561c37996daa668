#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace svevt::stats {

double mean(std::span<const double> x);

// Sample variance with n-1 denominator.
double variance(std::span<const double> x);
double sd(std::span<const double> x);

// Standardized third/fourth moments with n denominators (moment convention);
// kurtosis is reported in excess of the normal's 3.
double skewness(std::span<const double> x);
double excess_kurtosis(std::span<const double> x);

// Sample autocorrelation at lag k (autocovariance ratio, centered once).
double acf(std::span<const double> x, std::size_t lag);

// Linear-interpolation sample quantile (the R type-7 rule), q in [0,1].
double quantile(std::span<const double> sorted_x, double q);
double quantile_unsorted(std::span<const double> x, double q);

// Standard normal density / CDF / inverse CDF. The inverse uses a rational
// approximation polished by one Halley step; |error| < 1e-13 over (0,1).
double norm_pdf(double z);
double norm_cdf(double z);
double norm_ppf(double p);

// Regularized incomplete beta I_x(a, b) by continued fraction.
double inc_beta(double a, double b, double x);

// Student-t CDF / inverse CDF (nu dof, unit scale, not standardized).
double t_cdf(double x, double nu);
double t_ppf(double p, double nu);

// log-density of the variance-one (standardized) Student-t.
double log_std_t_pdf(double z, double nu);

// chi-square upper critical values used by the likelihood-ratio tests
inline constexpr double kChi2Crit1Df5Pct = 3.841458820694124;
inline constexpr double kChi2Crit2Df5Pct = 5.991464547107979;

}  // namespace svevt::stats
