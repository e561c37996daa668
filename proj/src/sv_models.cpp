#include "svevt/sv_models.hpp"

#include <cmath>
#include <fstream>

#include "svevt/errors.hpp"
#include "svevt/rng.hpp"

namespace svevt {

bool variant_has_t(SvVariant v) { return v == SvVariant::T || v == SvVariant::TLeverage; }

bool variant_has_leverage(SvVariant v) {
    return v == SvVariant::Leverage || v == SvVariant::TLeverage;
}

std::string variant_name(SvVariant v) {
    switch (v) {
        case SvVariant::Vanilla: return "sv";
        case SvVariant::T: return "svt";
        case SvVariant::Leverage: return "svl";
        case SvVariant::TLeverage: return "svtl";
    }
    return "sv";
}

SvVariant variant_from_name(const std::string& name) {
    if (name == "sv") return SvVariant::Vanilla;
    if (name == "svt") return SvVariant::T;
    if (name == "svl") return SvVariant::Leverage;
    if (name == "svtl") return SvVariant::TLeverage;
    throw DataError("unknown SV variant: " + name);
}

void SvParams::validate(SvVariant v) const {
    if (!(std::fabs(phi) < 1.0)) throw DataError("SV requires |phi| < 1");
    if (!(sigma > 0.0)) throw DataError("SV requires sigma > 0");
    if (variant_has_t(v)) {
        if (!nu || !(*nu > 2.0)) throw DataError("t variants require nu > 2");
    }
    if (variant_has_leverage(v)) {
        if (!rho || !(std::fabs(*rho) < 1.0))
            throw DataError("leverage variants require rho in (-1, 1)");
    }
    if (beta.empty()) throw DataError("beta must have at least one coefficient");
}

SvPath simulate(SvVariant v, const SvParams& p, std::size_t n, const Matrix* x,
                std::uint64_t seed) {
    p.validate(v);
    if (n < 1) throw DataError("simulate requires n >= 1");
    std::size_t k = p.beta.size();
    if (x) {
        if (x->size() != n) throw DataError("regressor matrix must have n rows");
        for (const auto& row : *x)
            if (row.size() != k) throw DataError("regressor matrix column count != beta length");
    } else if (k != 1) {
        throw DataError("default constant regressor needs scalar beta");
    }

    Rng rng(seed);
    double rho = variant_has_leverage(v) ? *p.rho : 0.0;
    double rho_c = std::sqrt(1.0 - rho * rho);
    bool has_t = variant_has_t(v);
    double nu = has_t ? *p.nu : 0.0;

    SvPath path;
    path.seed = seed;
    path.h.resize(n);
    path.y.resize(n);

    double h = p.mu + rng.normal() * p.sigma / std::sqrt(1.0 - p.phi * p.phi);
    for (std::size_t t = 0; t < n; ++t) {
        path.h[t] = h;
        double z = rng.normal();
        double lambda = has_t ? rng.inverse_gamma(nu / 2.0, nu / 2.0) : 1.0;
        double scale = has_t ? std::sqrt(lambda * (nu - 2.0) / nu) : 1.0;
        double mean_y = x ? 0.0 : p.beta[0];
        if (x) {
            const auto& row = (*x)[t];
            for (std::size_t j = 0; j < k; ++j) mean_y += row[j] * p.beta[j];
        }
        path.y[t] = mean_y + std::exp(h / 2.0) * scale * z;
        double eta = rho * z + rho_c * rng.normal();
        h = p.mu + p.phi * (h - p.mu) + p.sigma * eta;
    }
    return path;
}

ReturnSeries simulate_student_t_returns(std::size_t n, double nu, std::uint64_t seed) {
    if (n < 1) throw DataError("simulate_student_t_returns requires n >= 1");
    if (!(nu > 2.0)) throw DataError("standardized t requires nu > 2");
    Rng rng(seed);
    ReturnSeries r;
    r.label = "simulated-t";
    r.dates = synthetic_dates(n);
    r.returns.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.returns[i] = rng.student_t_std(nu);
    return r;
}

void write_path_csv(const std::string& path, const SvPath& sp) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "t,h,y\n";
    out.precision(15);
    for (std::size_t t = 0; t < sp.h.size(); ++t)
        out << t << "," << sp.h[t] << "," << sp.y[t] << "\n";
}

}  // namespace svevt
