#include "svevt/stats.hpp"

#include <algorithm>
#include <cmath>

#include "svevt/errors.hpp"

namespace svevt::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw NumericError("mean of empty span");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    if (x.size() < 2) throw NumericError("variance needs at least 2 points");
    double m = mean(x);
    double s = 0.0;
    for (double v : x) s += (v - m) * (v - m);
    return s / static_cast<double>(x.size() - 1);
}

double sd(std::span<const double> x) { return std::sqrt(variance(x)); }

namespace {

// central moments with n denominator
void central_moments(std::span<const double> x, double& m2, double& m3, double& m4) {
    double m = mean(x);
    m2 = m3 = m4 = 0.0;
    for (double v : x) {
        double d = v - m;
        double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    double n = static_cast<double>(x.size());
    m2 /= n;
    m3 /= n;
    m4 /= n;
}

}  // namespace

double skewness(std::span<const double> x) {
    double m2, m3, m4;
    central_moments(x, m2, m3, m4);
    if (m2 <= 0.0) throw NumericError("skewness undefined for zero-variance sample");
    return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> x) {
    double m2, m3, m4;
    central_moments(x, m2, m3, m4);
    if (m2 <= 0.0) throw NumericError("kurtosis undefined for zero-variance sample");
    return m4 / (m2 * m2) - 3.0;
}

double acf(std::span<const double> x, std::size_t lag) {
    if (lag >= x.size()) throw NumericError("acf lag exceeds series length");
    double m = mean(x);
    double c0 = 0.0, ck = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) c0 += (x[t] - m) * (x[t] - m);
    for (std::size_t t = lag; t < x.size(); ++t) ck += (x[t] - m) * (x[t - lag] - m);
    if (c0 <= 0.0) throw NumericError("acf undefined for zero-variance sample");
    return ck / c0;
}

double quantile(std::span<const double> sorted_x, double q) {
    if (sorted_x.empty()) throw NumericError("quantile of empty span");
    if (q <= 0.0) return sorted_x.front();
    if (q >= 1.0) return sorted_x.back();
    double h = (static_cast<double>(sorted_x.size()) - 1.0) * q;
    auto lo = static_cast<std::size_t>(std::floor(h));
    double frac = h - static_cast<double>(lo);
    if (lo + 1 >= sorted_x.size()) return sorted_x.back();
    return sorted_x[lo] + frac * (sorted_x[lo + 1] - sorted_x[lo]);
}

double quantile_unsorted(std::span<const double> x, double q) {
    std::vector<double> tmp(x.begin(), x.end());
    std::sort(tmp.begin(), tmp.end());
    return quantile(tmp, q);
}

double norm_pdf(double z) {
    static const double kInvSqrt2Pi = 0.3989422804014327;
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double norm_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double norm_ppf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw NumericError("norm_ppf requires p in (0,1)");
    // Acklam's rational approximation
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // one Halley refinement
    double e = norm_cdf(x) - p;
    double u = e / norm_pdf(x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

namespace {

double betacf(double a, double b, double x) {
    const int kMaxIter = 300;
    const double kEps = 3e-16, kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NumericError("incomplete beta continued fraction did not converge");
}

}  // namespace

double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double t_cdf(double x, double nu) {
    if (nu <= 0.0) throw NumericError("t_cdf requires nu > 0");
    double p = 0.5 * inc_beta(nu / 2.0, 0.5, nu / (nu + x * x));
    return x > 0.0 ? 1.0 - p : p;
}

double t_ppf(double p, double nu) {
    if (!(p > 0.0 && p < 1.0)) throw NumericError("t_ppf requires p in (0,1)");
    if (p == 0.5) return 0.0;
    // bisection from a generous normal-based bracket, then Newton polish
    double lo = -1.0, hi = 1.0;
    while (t_cdf(lo, nu) > p) lo *= 2.0;
    while (t_cdf(hi, nu) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (t_cdf(mid, nu) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * std::max(1.0, std::fabs(hi))) break;
    }
    return 0.5 * (lo + hi);
}

double log_std_t_pdf(double z, double nu) {
    if (!(nu > 2.0)) throw NumericError("log_std_t_pdf requires nu > 2");
    // the lgamma difference cancels catastrophically for huge nu; the density is
    // within O(1/nu) of the standard normal there, so switch to the limit
    if (nu > 1e8) return -0.9189385332046727 - 0.5 * z * z;
    const double kLogPi = 1.1447298858494002;
    double c = std::lgamma((nu + 1.0) / 2.0) - std::lgamma(nu / 2.0) -
               0.5 * (kLogPi + std::log(nu - 2.0));
    return c - 0.5 * (nu + 1.0) * std::log1p(z * z / (nu - 2.0));
}

}  // namespace svevt::stats
