#include "svevt/evt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "svevt/errors.hpp"
#include "svevt/gof_critical_values.hpp"
#include "svevt/optim.hpp"
#include "svevt/rng.hpp"
#include "svevt/stats.hpp"

namespace svevt {

namespace {
constexpr double kXiZeroTol = 1e-4;
}

MeanExcessCurve mean_excess_curve(const std::vector<double>& z, std::size_t grid_size) {
    if (z.size() < 50) throw DataError("mean_excess_curve needs at least 50 points");
    if (grid_size < 2) throw DataError("grid_size must be at least 2");
    std::vector<double> sorted(z);
    std::sort(sorted.begin(), sorted.end());
    double lo = stats::quantile(sorted, 0.50);
    double hi = stats::quantile(sorted, 0.99);

    MeanExcessCurve curve;
    for (std::size_t i = 0; i < grid_size; ++i) {
        double q = 0.50 + (0.99 - 0.50) * static_cast<double>(i) / (grid_size - 1);
        double u = stats::quantile(sorted, q);
        if (!curve.u_grid.empty() && u <= curve.u_grid.back()) continue;  // ties in the sample
        double sum = 0.0;
        std::size_t count = 0;
        for (double v : sorted) {
            if (v > u) {
                sum += v - u;
                ++count;
            }
        }
        if (count < 5) {
            if (curve.u_grid.empty())
                throw DataError("fewer than 5 exceedances at the smallest grid point");
            continue;
        }
        curve.u_grid.push_back(u);
        curve.e_values.push_back(sum / count);
        curve.counts.push_back(count);
    }
    (void)lo;
    (void)hi;
    return curve;
}

double select_threshold(const std::vector<double>& z, const ThresholdMode& mode) {
    // quantile mode is pure order-statistic arithmetic; only the fixed mode
    // validates the exceedance count here (fit_gpd enforces it regardless)
    if (const auto* q = std::get_if<ThresholdQuantile>(&mode)) {
        if (!(q->q > 0.0 && q->q < 1.0)) throw DataError("threshold quantile must be in (0,1)");
        return stats::quantile_unsorted(z, q->q);
    }
    double u = std::get<ThresholdFixed>(mode).u;
    std::size_t count = 0;
    for (double v : z)
        if (v > u) ++count;
    if (count < 10)
        throw DataError("threshold leaves only " + std::to_string(count) +
                        " exceedances (need >= 10)");
    return u;
}

double gpd_loglik(double xi, double beta, const std::vector<double>& y) {
    if (!(beta > 0.0)) return -std::numeric_limits<double>::infinity();
    double n = static_cast<double>(y.size());
    if (std::fabs(xi) < kXiZeroTol) {
        double s = 0.0;
        for (double v : y) s += v;
        return -n * std::log(beta) - s / beta;
    }
    double acc = 0.0;
    for (double v : y) {
        double arg = 1.0 + xi * v / beta;
        if (!(arg > 0.0)) return -std::numeric_limits<double>::infinity();
        acc += std::log(arg);
    }
    return -n * std::log(beta) - (1.0 + 1.0 / xi) * acc;
}

GpdTailModel fit_gpd(const std::vector<double>& z, double u) {
    std::vector<double> y;
    for (double v : z)
        if (v > u) y.push_back(v - u);
    if (y.size() < 10) throw DataError("fit_gpd needs at least 10 exceedances");

    double ymax = *std::max_element(y.begin(), y.end());
    double ymin = *std::min_element(y.begin(), y.end());
    if (!(ymax > ymin))
        throw NumericError("all excesses identical; GPD scale not identifiable");
    double ymean = 0.0;
    for (double v : y) ymean += v;
    ymean /= static_cast<double>(y.size());
    double n = static_cast<double>(y.size());

    // profile likelihood over tau = xi/beta: given tau, xi = mean log1p(tau y)
    // and the profile value is -n log(xi/tau) - n xi - n
    auto profile_nll = [&](double tau) {
        if (std::fabs(tau) < 1e-14) return n * std::log(ymean) + n;
        double xi = 0.0;
        for (double v : y) {
            double arg = tau * v;
            if (arg <= -1.0) return std::numeric_limits<double>::infinity();
            xi += std::log1p(arg);
        }
        xi /= n;
        if (std::fabs(xi) < 1e-14) return n * std::log(ymean) + n;
        double beta = xi / tau;
        if (!(beta > 0.0)) return std::numeric_limits<double>::infinity();
        return n * std::log(beta) + n * xi + n;
    };

    // bracket: tau > -1/ymax; scan log-spaced magnitudes on both sides
    double tau_lo = -1.0 / ymax;
    std::vector<double> grid;
    for (int i = 1; i <= 60; ++i) grid.push_back(tau_lo * (1.0 - static_cast<double>(i) / 61.0));
    grid.push_back(0.0);
    for (int i = -40; i <= 40; ++i) grid.push_back(std::pow(10.0, i * 0.1) / ymean);
    std::sort(grid.begin(), grid.end());

    double best_tau = 0.0, best_val = profile_nll(0.0);
    std::size_t best_idx = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double v = profile_nll(grid[i]);
        if (v < best_val) {
            best_val = v;
            best_tau = grid[i];
            best_idx = i;
        }
    }
    double lo = best_idx > 0 ? grid[best_idx - 1] : best_tau - 0.1 / ymean;
    double hi = best_idx + 1 < grid.size() ? grid[best_idx + 1] : best_tau + 0.1 / ymean;
    if (lo <= tau_lo) lo = tau_lo * (1.0 - 1e-12);
    double tau = optim::brent_min(profile_nll, lo, hi, 1e-14);
    if (profile_nll(best_tau) < profile_nll(tau)) tau = best_tau;

    double xi, beta;
    if (std::fabs(tau) < 1e-14) {
        xi = 0.0;
        beta = ymean;
    } else {
        xi = 0.0;
        for (double v : y) xi += std::log1p(tau * v);
        xi /= n;
        beta = xi / tau;
    }

    // polish in (xi, log beta) to push the full-likelihood gradient to zero
    auto nll2 = [&](const std::vector<double>& p) {
        double ll = gpd_loglik(p[0], std::exp(p[1]), y);
        return std::isfinite(ll) ? -ll : 1e12;
    };
    optim::MinResult pol = optim::bfgs(nll2, {xi, std::log(beta)}, 300, 1e-10);
    if (std::isfinite(pol.fval) && pol.fval <= -gpd_loglik(xi, beta, y) + 1e-12) {
        xi = pol.x[0];
        beta = std::exp(pol.x[1]);
    }

    GpdTailModel m;
    m.u = u;
    m.xi = xi;
    m.beta = beta;
    m.n_total = z.size();
    m.n_exceed = y.size();
    m.loglik = gpd_loglik(xi, beta, y);
    if (!std::isfinite(m.loglik)) throw NumericError("GPD fit produced non-finite likelihood");
    return m;
}

double gpd_cdf(double xi, double beta, double y) {
    if (y < 0.0) return 0.0;
    if (std::fabs(xi) < kXiZeroTol) return 1.0 - std::exp(-y / beta);
    double arg = 1.0 + xi * y / beta;
    if (arg <= 0.0) return xi < 0.0 ? 1.0 : 0.0;
    return 1.0 - std::pow(arg, -1.0 / xi);
}

double gpd_quantile(double xi, double beta, double p) {
    if (!(p >= 0.0 && p < 1.0)) throw NumericError("gpd_quantile needs p in [0,1)");
    if (std::fabs(xi) < kXiZeroTol) return -beta * std::log1p(-p);
    return beta / xi * (std::pow(1.0 - p, -xi) - 1.0);
}

double tail_cdf(const GpdTailModel& m, double z) {
    if (z < m.u) throw NumericError("tail_cdf defined only for z >= u");
    double y = z - m.u;
    if (m.xi < -kXiZeroTol && y >= -m.beta / m.xi)
        throw NumericError("z beyond the upper endpoint of a bounded tail");
    double frac = m.exceed_frac();
    return 1.0 - frac * (1.0 - gpd_cdf(m.xi, m.beta, y));
}

double tail_quantile(const GpdTailModel& m, double alpha) {
    double fu = 1.0 - m.exceed_frac();
    if (!(alpha >= fu))
        throw NumericError("alpha below F(u): quantile not in the modeled tail");
    if (alpha >= 1.0) throw NumericError("alpha must be < 1");
    // inner p relative to the exceedance law; roundoff in 1 - alpha can push
    // the boundary case alpha == F(u) a few ulp below zero
    double p = 1.0 - (1.0 - alpha) / m.exceed_frac();
    if (p < 0.0) p = 0.0;
    return m.u + gpd_quantile(m.xi, m.beta, p);
}

double gof_critical_value(bool anderson_darling, double xi, double level) {
    const auto& levels = gof_table::kLevels;
    int li = -1;
    for (int i = 0; i < gof_table::kNumLevels; ++i)
        if (std::fabs(levels[i] - level) < 1e-12) li = i;
    if (li < 0) throw DataError("no tabulated GoF critical values at this level");
    const auto& tab = anderson_darling ? gof_table::kA2 : gof_table::kW2;
    const auto& xs = gof_table::kXi;
    if (xi <= xs.front()) return tab.front()[li];
    if (xi >= xs.back()) return tab.back()[li];
    int k = 0;
    while (xs[k + 1] < xi) ++k;
    double w = (xi - xs[k]) / (xs[k + 1] - xs[k]);
    return tab[k][li] * (1.0 - w) + tab[k + 1][li] * w;
}

GofResult goodness_of_fit(const GpdTailModel& m, const std::vector<double>& z, double level) {
    std::vector<double> v;
    for (double val : z)
        if (val > m.u) v.push_back(gpd_cdf(m.xi, m.beta, val - m.u));
    if (v.size() != m.n_exceed)
        throw DataError("residual vector does not match the fitted exceedance count");
    std::sort(v.begin(), v.end());
    double n = static_cast<double>(v.size());
    for (double p : v)
        if (p <= 0.0 || p >= 1.0)
            throw NumericError("degenerate probability transform in goodness-of-fit");

    double w2 = 1.0 / (12.0 * n);
    for (std::size_t i = 0; i < v.size(); ++i) {
        double d = v[i] - (2.0 * (i + 1) - 1.0) / (2.0 * n);
        w2 += d * d;
    }
    double a2 = -n;
    for (std::size_t i = 0; i < v.size(); ++i) {
        a2 -= (2.0 * (i + 1) - 1.0) / n *
              (std::log(v[i]) + std::log1p(-v[v.size() - 1 - i]));
    }

    GofResult g;
    g.w2 = w2;
    g.a2 = a2;
    g.w2_crit = gof_critical_value(false, m.xi, level);
    g.a2_crit = gof_critical_value(true, m.xi, level);
    g.w2_pass = w2 < g.w2_crit;
    g.a2_pass = a2 < g.a2_crit;
    return g;
}

std::vector<double> simulate_gpd(double xi, double beta, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = gpd_quantile(xi, beta, rng.uniform());
    return y;
}

void write_mean_excess_csv(const std::string& path, const MeanExcessCurve& c) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "u,e,count\n";
    out.precision(15);
    for (std::size_t i = 0; i < c.u_grid.size(); ++i)
        out << c.u_grid[i] << "," << c.e_values[i] << "," << c.counts[i] << "\n";
}

std::string gpd_fit_to_json(const GpdTailModel& m, const GofResult* gof) {
    nlohmann::json j;
    j["u"] = m.u;
    j["xi"] = m.xi;
    j["beta"] = m.beta;
    j["n_total"] = m.n_total;
    j["n_exceed"] = m.n_exceed;
    j["loglik"] = m.loglik;
    if (gof) {
        j["gof"] = {{"w2", gof->w2},         {"a2", gof->a2},         {"w2_crit", gof->w2_crit},
                    {"a2_crit", gof->a2_crit}, {"w2_pass", gof->w2_pass}, {"a2_pass", gof->a2_pass}};
    }
    return j.dump(2);
}

}  // namespace svevt
