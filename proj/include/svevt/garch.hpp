#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "svevt/series.hpp"

namespace svevt {

struct GarchParams {
    double alpha0 = 0.05;
    double alpha1 = 0.1;
    double beta1 = 0.8;
    double nu = 8.0;

    // throws NumericError / BoundaryError on invariant failure
    void validate() const;
};

struct GarchFit {
    GarchParams params;
    std::array<double, 4> std_errors{};  // alpha0, alpha1, beta1, nu
    std::array<double, 4> t_values{};
    std::array<double, 4> p_values{};
    std::vector<double> sigma2_path;
    double loglik = 0.0;
    double mean = 0.0;      // sample mean removed before fitting
    double sigma2_1 = 0.0;  // presample variance used by the recursion
};

// log-likelihood of demeaned data under standardized-t GARCH(1,1) with the
// recursion seeded at sigma2_1
double garch_loglik(const GarchParams& p, const std::vector<double>& y, double sigma2_1);

// filtered conditional variances and the one-step-ahead forecast
// sigma2_next = alpha0 + alpha1 y_n^2 + beta1 sigma2_n
std::pair<std::vector<double>, double> garch_filter(const GarchParams& p,
                                                    const std::vector<double>& y,
                                                    double sigma2_1);

// MLE via transformed-parameter quasi-Newton search with multistarts.
// Throws BoundaryError when the optimum sits on alpha1 + beta1 >= 1 - 1e-6.
GarchFit fit_garch(const ReturnSeries& y);

std::pair<std::vector<double>, double> filter_and_forecast(const GarchFit& f,
                                                           const ReturnSeries& y);

// stationary-start simulation used by the recovery tests
ReturnSeries simulate_garch(const GarchParams& p, std::size_t n, std::uint64_t seed);

std::string garch_fit_to_json(const GarchFit& f);

}  // namespace svevt
