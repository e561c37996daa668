#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace svevt {

struct MeanExcessCurve {
    std::vector<double> u_grid;
    std::vector<double> e_values;
    std::vector<std::size_t> counts;
};

struct GpdTailModel {
    double u = 0.0;       // threshold
    double xi = 0.0;      // shape
    double beta = 1.0;    // scale
    std::size_t n_total = 0;
    std::size_t n_exceed = 0;
    double loglik = 0.0;

    double exceed_frac() const { return static_cast<double>(n_exceed) / n_total; }
};

struct GofResult {
    double w2 = 0.0;
    double a2 = 0.0;
    double w2_crit = 0.0;
    double a2_crit = 0.0;
    bool w2_pass = false;
    bool a2_pass = false;
};

struct ThresholdQuantile {
    double q = 0.95;
};
struct ThresholdFixed {
    double u = 0.0;
};
using ThresholdMode = std::variant<ThresholdQuantile, ThresholdFixed>;

// e(u) = mean excess over u at quantile-spaced u between the 50% and 99%
// sample quantiles; entries with fewer than 5 exceedances are dropped.
MeanExcessCurve mean_excess_curve(const std::vector<double>& z, std::size_t grid_size);

double select_threshold(const std::vector<double>& z, const ThresholdMode& mode);

// GPD MLE on excesses z_i - u via the profile likelihood in tau = xi/beta,
// polished in (xi, log beta). |xi| < 1e-4 is treated as the exponential limit.
GpdTailModel fit_gpd(const std::vector<double>& z, double u);

// log-likelihood of excesses y under GPD(xi, beta)
double gpd_loglik(double xi, double beta, const std::vector<double>& y);

double tail_cdf(const GpdTailModel& m, double z);
double tail_quantile(const GpdTailModel& m, double alpha);

// GPD CDF of a single excess y >= 0
double gpd_cdf(double xi, double beta, double y);
double gpd_quantile(double xi, double beta, double p);

GofResult goodness_of_fit(const GpdTailModel& m, const std::vector<double>& z,
                          double level = 0.10);

// critical value interpolated in xi from the embedded asymptotic table
double gof_critical_value(bool anderson_darling, double xi, double level);

std::vector<double> simulate_gpd(double xi, double beta, std::size_t n, std::uint64_t seed);

void write_mean_excess_csv(const std::string& path, const MeanExcessCurve& c);
std::string gpd_fit_to_json(const GpdTailModel& m, const GofResult* gof);

}  // namespace svevt
