#include "svevt/garch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "svevt/errors.hpp"
#include "svevt/optim.hpp"
#include "svevt/rng.hpp"
#include "svevt/stats.hpp"

namespace svevt {

void GarchParams::validate() const {
    if (!(alpha0 > 0.0)) throw NumericError("GARCH requires alpha0 > 0");
    if (alpha1 < 0.0 || beta1 < 0.0) throw NumericError("GARCH requires alpha1, beta1 >= 0");
    if (alpha1 + beta1 >= 1.0 - 1e-6)
        throw BoundaryError("GARCH persistence alpha1 + beta1 at the stationarity boundary");
    if (!(nu > 2.0)) throw NumericError("GARCH-t requires nu > 2");
}

std::pair<std::vector<double>, double> garch_filter(const GarchParams& p,
                                                    const std::vector<double>& y,
                                                    double sigma2_1) {
    std::size_t n = y.size();
    std::vector<double> s2(n);
    s2[0] = sigma2_1;
    for (std::size_t t = 1; t < n; ++t)
        s2[t] = p.alpha0 + p.alpha1 * y[t - 1] * y[t - 1] + p.beta1 * s2[t - 1];
    double next = p.alpha0 + p.alpha1 * y[n - 1] * y[n - 1] + p.beta1 * s2[n - 1];
    return {std::move(s2), next};
}

double garch_loglik(const GarchParams& p, const std::vector<double>& y, double sigma2_1) {
    auto [s2, next] = garch_filter(p, y, sigma2_1);
    (void)next;
    double ll = 0.0;
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (!(s2[t] > 0.0)) return -std::numeric_limits<double>::infinity();
        double sd = std::sqrt(s2[t]);
        ll += stats::log_std_t_pdf(y[t] / sd, p.nu) - std::log(sd);
    }
    return ll;
}

namespace {

// unconstrained <-> natural maps: theta = (log a0, logit persistence,
// logit alpha-share, log(nu - 2))
GarchParams from_theta(const std::vector<double>& th) {
    GarchParams p;
    p.alpha0 = std::exp(th[0]);
    double s = 1.0 / (1.0 + std::exp(-th[1]));
    double w = 1.0 / (1.0 + std::exp(-th[2]));
    p.alpha1 = s * w;
    p.beta1 = s * (1.0 - w);
    p.nu = 2.0 + std::exp(th[3]);
    return p;
}

std::vector<double> to_theta(const GarchParams& p) {
    double s = p.alpha1 + p.beta1;
    double w = p.alpha1 / s;
    auto logit = [](double u) { return std::log(u / (1.0 - u)); };
    return {std::log(p.alpha0), logit(s), logit(w), std::log(p.nu - 2.0)};
}

}  // namespace

GarchFit fit_garch(const ReturnSeries& y) {
    y.validate();
    if (y.size() < 250) throw DataError("fit_garch needs at least 250 observations");

    double mu = stats::mean(y.returns);
    std::vector<double> x(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) x[t] = y.returns[t] - mu;
    double s2_1 = stats::variance(x);

    auto nll = [&](const std::vector<double>& th) {
        GarchParams p = from_theta(th);
        if (!(p.nu > 2.0) || !(p.alpha0 > 0.0)) return 1e12;  // exp underflow in the map
        double ll = garch_loglik(p, x, s2_1);
        return std::isfinite(ll) ? -ll : 1e12;
    };

    // deterministic multistarts around common GARCH shapes
    Rng rng(20240901);
    std::vector<std::vector<double>> starts;
    GarchParams base{0.05 * s2_1, 0.1, 0.8, 8.0};
    starts.push_back(to_theta(base));
    for (int i = 0; i < 5; ++i) {
        GarchParams q;
        q.alpha0 = s2_1 * std::exp(rng.normal(-2.5, 0.8));
        double s = 0.5 + 0.45 * rng.uniform();
        double w = 0.05 + 0.4 * rng.uniform();
        q.alpha1 = s * w;
        q.beta1 = s * (1.0 - w);
        q.nu = 4.0 + 8.0 * rng.uniform();
        starts.push_back(to_theta(q));
    }

    // keep the best interior optimum: with alpha1 near 0 the persistence is
    // unidentified and some starts wander onto the alpha1 + beta1 = 1
    // boundary along a flat ridge; those are not evidence of explosiveness
    auto interior = [&](const std::vector<double>& th) {
        GarchParams q = from_theta(th);
        return q.alpha1 + q.beta1 < 1.0 - 1e-6;
    };
    optim::MinResult best;
    best.fval = std::numeric_limits<double>::infinity();
    bool any = false;
    for (const auto& th0 : starts) {
        optim::MinResult r = optim::bfgs(nll, th0, 600, 1e-7);
        if (r.fval < best.fval && std::isfinite(r.fval) && interior(r.x)) {
            best = std::move(r);
            any = true;
        }
    }
    if (!any) throw BoundaryError("GARCH fit hit the stationarity boundary alpha1 + beta1 >= 1");
    // polish with a simplex pass in case BFGS stalled on a kink
    optim::MinResult nm = optim::nelder_mead(nll, best.x, 3000, 1e-12, 0.05);
    if (nm.fval < best.fval && interior(nm.x)) best = std::move(nm);

    GarchParams p = from_theta(best.x);
    if (p.alpha1 + p.beta1 >= 1.0 - 1e-6)
        throw BoundaryError("GARCH fit hit the stationarity boundary alpha1 + beta1 >= 1");
    p.validate();

    GarchFit fit;
    fit.params = p;
    fit.mean = mu;
    fit.sigma2_1 = s2_1;
    fit.loglik = -best.fval;
    auto [s2_path, next] = garch_filter(p, x, s2_1);
    (void)next;
    fit.sigma2_path = std::move(s2_path);

    // standard errors from the inverse Hessian of the negative log-likelihood
    // in the natural parameterization
    auto nll_nat = [&](const std::vector<double>& v) {
        GarchParams q{v[0], v[1], v[2], v[3]};
        if (!(q.alpha0 > 0.0) || q.alpha1 < 0.0 || q.beta1 < 0.0 || !(q.nu > 2.0)) return 1e12;
        double ll = garch_loglik(q, x, s2_1);
        return std::isfinite(ll) ? -ll : 1e12;
    };
    std::vector<double> at{p.alpha0, p.alpha1, p.beta1, p.nu};
    auto hess = optim::num_hessian(nll_nat, at, 1e-4);
    // boundary optima (alpha1 near 0 on calm data) can leave the Hessian
    // numerically singular; a small ridge keeps the errors finite instead of
    // failing the whole fit
    std::vector<std::vector<double>> cov;
    for (double ridge : {0.0, 1e-8, 1e-5, 1e-2, 1.0}) {
        auto h2 = hess;
        for (int i = 0; i < 4; ++i) h2[i][i] += ridge * std::max(1.0, std::fabs(hess[i][i]));
        try {
            cov = optim::spd_inverse(h2);
            break;
        } catch (const NumericError&) {
            if (ridge == 1.0) throw;
        }
    }
    for (int i = 0; i < 4; ++i) {
        double v = cov[i][i];
        if (!(v > 0.0)) throw NumericError("GARCH Hessian not positive definite at optimum");
        fit.std_errors[i] = std::sqrt(v);
        fit.t_values[i] = at[i] / fit.std_errors[i];
        fit.p_values[i] = 2.0 * (1.0 - stats::norm_cdf(std::fabs(fit.t_values[i])));
    }
    return fit;
}

std::pair<std::vector<double>, double> filter_and_forecast(const GarchFit& f,
                                                           const ReturnSeries& y) {
    y.validate();
    std::vector<double> x(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) x[t] = y.returns[t] - f.mean;
    return garch_filter(f.params, x, f.sigma2_1);
}

ReturnSeries simulate_garch(const GarchParams& p, std::size_t n, std::uint64_t seed) {
    p.validate();
    if (n < 1) throw NumericError("simulate_garch requires n >= 1");
    Rng rng(seed);
    ReturnSeries r;
    r.label = "simulated-garch";
    r.dates = synthetic_dates(n);
    r.returns.resize(n);
    double s2 = p.alpha0 / (1.0 - p.alpha1 - p.beta1);
    for (std::size_t t = 0; t < n; ++t) {
        double x = std::sqrt(s2) * rng.student_t_std(p.nu);
        r.returns[t] = x;
        s2 = p.alpha0 + p.alpha1 * x * x + p.beta1 * s2;
    }
    return r;
}

std::string garch_fit_to_json(const GarchFit& f) {
    nlohmann::json j;
    const char* names[4] = {"alpha0", "alpha1", "beta1", "nu"};
    double est[4] = {f.params.alpha0, f.params.alpha1, f.params.beta1, f.params.nu};
    for (int i = 0; i < 4; ++i) {
        j[names[i]] = {{"estimate", est[i]},
                       {"std_error", f.std_errors[i]},
                       {"t_value", f.t_values[i]},
                       {"p_value", f.p_values[i]}};
    }
    j["loglik"] = f.loglik;
    j["mean"] = f.mean;
    j["sigma2_1"] = f.sigma2_1;
    return j.dump(2);
}

}  // namespace svevt
