#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "svevt/evt.hpp"
#include "svevt/garch.hpp"
#include "svevt/mcmc.hpp"
#include "svevt/rng.hpp"
#include "svevt/series.hpp"
#include "svevt/sv_models.hpp"

namespace svevt {

struct ResidualSeries {
    std::vector<Date> dates;
    std::vector<double> z;
    std::vector<double> mu_hat;
    std::vector<double> sigma_hat;
};

struct VarSeries {
    std::vector<Date> dates;
    double alpha = 0.95;
    std::vector<double> var_values;  // positive loss magnitudes
    std::vector<double> mu_fore;
    std::vector<double> sigma_fore;
    std::string model_tag;
};

struct Forecast {
    std::vector<double> mu_fore;
    std::vector<double> sigma_fore;
};

ResidualSeries standardize(const ReturnSeries& y, const std::vector<double>& mu_hat,
                           const std::vector<double>& sigma_hat);

// Bootstrap particle filter with parameters pinned at posterior means. The
// filter runs through the training series, then alternates forecast/absorb
// over the test days; sigma_fore is the weighted particle mean of exp(h/2)
// one step ahead.
class ParticleFilter {
public:
    ParticleFilter(SvVariant v, const SvParams& params, std::size_t n_particles,
                   std::uint64_t seed);

    void update(double y);

    double next_sigma_fore() const { return next_sigma_fore_; }
    double next_mu_fore() const;
    // weighted mean of exp(h_t/2) after absorbing y_t
    double last_filtered_vol() const { return filtered_vol_; }

private:
    void systematic_resample();

    SvVariant variant_;
    SvParams params_;
    std::size_t n_;
    Rng rng_;
    bool has_t_, has_lev_;
    std::vector<double> h_, w_;
    double next_sigma_fore_ = 0.0;
    double filtered_vol_ = 0.0;
    int degenerate_streak_ = 0;
};

Forecast sv_forecast(const SvPosterior& post, const ReturnSeries& train,
                     const ReturnSeries& test, std::size_t n_particles, std::uint64_t seed);

// day-by-day GARCH recursion with fixed fitted parameters
Forecast garch_forecast(const GarchFit& fit, const ReturnSeries& train,
                        const ReturnSeries& test);

// var_t = sigma_fore * q_alpha - mu_fore with q_alpha the standardized-residual
// loss quantile
VarSeries var_from_quantile(const Forecast& fore, const std::vector<Date>& dates,
                            double q_alpha, double alpha, const std::string& tag);

// q_alpha from the fitted GPD tail of negated (loss-side) residuals
VarSeries dynamic_var(const Forecast& fore, const std::vector<Date>& dates,
                      const GpdTailModel& tail, double alpha, const std::string& tag);

VarSeries empirical_var(const ReturnSeries& history, const ReturnSeries& test, double alpha,
                        std::size_t window = 252);

struct QqData {
    std::vector<double> theoretical;
    std::vector<double> sample;

    double sum_sq_dev() const;
};

// normal Q-Q data of the z-scored input
QqData qq_points(const std::vector<double>& x);

void write_var_csv(const std::string& path, const VarSeries& v);
VarSeries load_var_csv(const std::string& path);
void write_qq_csv(const std::string& path, const QqData& q);

}  // namespace svevt
