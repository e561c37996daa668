#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "svevt/errors.hpp"

namespace svevt {

// The single generator family used across the project: mt19937_64 behind a
// thin wrapper. Every stochastic routine takes an explicit seed or an Rng&;
// split() derives an independent stream so parallel work stays reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_seed_(seed), engine_(seed_with(seed, stream)) {}

    Rng split(std::uint64_t stream) const {
        return Rng(base_seed_, stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
    }

    double uniform() { return unif_(engine_); }

    double normal() { return norm_(engine_); }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Gamma(shape, scale).
    double gamma(double shape, double scale) {
        std::gamma_distribution<double> g(shape, scale);
        return g(engine_);
    }

    double exponential(double rate) {
        std::exponential_distribution<double> e(rate);
        return e(engine_);
    }

    double chi_squared(double df) { return gamma(df / 2.0, 2.0); }

    // Inverse gamma with shape a, scale b: b / Gamma(a, 1).
    double inverse_gamma(double shape, double scale) { return scale / gamma(shape, 1.0); }

    double beta(double a, double b) {
        double x = gamma(a, 1.0);
        double y = gamma(b, 1.0);
        return x / (x + y);
    }

    // Student-t with nu dof, scaled to unit variance (requires nu > 2).
    double student_t_std(double nu) {
        if (!(nu > 2.0)) throw NumericError("student_t_std requires nu > 2");
        double z = normal();
        double v = chi_squared(nu);
        return z / std::sqrt(v / nu) * std::sqrt((nu - 2.0) / nu);
    }

    std::uint64_t integer() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    static std::mt19937_64 seed_with(std::uint64_t seed, std::uint64_t stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        return std::mt19937_64(seq);
    }

    std::uint64_t base_seed_;
    std::mt19937_64 engine_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace svevt
