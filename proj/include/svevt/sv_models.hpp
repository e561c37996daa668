#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svevt/series.hpp"

namespace svevt {

enum class SvVariant { Vanilla, T, Leverage, TLeverage };

bool variant_has_t(SvVariant v);
bool variant_has_leverage(SvVariant v);
std::string variant_name(SvVariant v);
SvVariant variant_from_name(const std::string& name);

using Matrix = std::vector<std::vector<double>>;  // row-major, n x K

struct SvParams {
    double mu = 0.0;
    double phi = 0.9;
    double sigma = 0.2;
    std::optional<double> nu;   // t variants
    std::optional<double> rho;  // leverage variants
    std::vector<double> beta{0.0};

    // throws NumericError when an invariant needed by the variant fails
    void validate(SvVariant v) const;
};

struct SvPath {
    std::vector<double> h;
    std::vector<double> y;
    std::uint64_t seed = 0;
};

// h_{t+1} = mu + phi (h_t - mu) + sigma eta_t, h_0 stationary;
// y_t = x_t beta + exp(h_t/2) eps_t. For t variants eps is the normal-inverse
// -gamma mixture scaled to variance one; for leverage variants the Gaussian
// kernel z_t of eps_t has corr(z_t, eta_t) = rho.
SvPath simulate(SvVariant v, const SvParams& p, std::size_t n, const Matrix* x,
                std::uint64_t seed);

// iid standardized Student-t draws (variance one), synthetic weekday dates
ReturnSeries simulate_student_t_returns(std::size_t n, double nu, std::uint64_t seed);

void write_path_csv(const std::string& path, const SvPath& sp);

}  // namespace svevt
