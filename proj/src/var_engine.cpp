#include "svevt/var_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "svevt/errors.hpp"
#include "svevt/stats.hpp"

namespace svevt {

ResidualSeries standardize(const ReturnSeries& y, const std::vector<double>& mu_hat,
                           const std::vector<double>& sigma_hat) {
    y.validate();
    if (mu_hat.size() != y.size() || sigma_hat.size() != y.size())
        throw DataError("standardize: length mismatch");
    ResidualSeries r;
    r.dates = y.dates;
    r.mu_hat = mu_hat;
    r.sigma_hat = sigma_hat;
    r.z.resize(y.size());
    for (std::size_t t = 0; t < y.size(); ++t) {
        if (!(sigma_hat[t] > 0.0))
            throw DataError("standardize: nonpositive sigma_hat at index " + std::to_string(t));
        r.z[t] = (y.returns[t] - mu_hat[t]) / sigma_hat[t];
    }
    return r;
}

ParticleFilter::ParticleFilter(SvVariant v, const SvParams& params, std::size_t n_particles,
                               std::uint64_t seed)
    : variant_(v),
      params_(params),
      n_(n_particles),
      rng_(seed),
      has_t_(variant_has_t(v)),
      has_lev_(variant_has_leverage(v)) {
    params_.validate(v);
    if (n_ < 1) throw DataError("particle filter needs at least one particle");
    if (params_.beta.size() != 1)
        throw DataError("particle filter supports the constant-regressor model only");
    h_.resize(n_);
    w_.assign(n_, 1.0 / static_cast<double>(n_));
    double sd0 = params_.sigma / std::sqrt(1.0 - params_.phi * params_.phi);
    double acc = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        h_[i] = params_.mu + sd0 * rng_.normal();
        acc += w_[i] * std::exp(h_[i] / 2.0);
    }
    next_sigma_fore_ = acc;
    filtered_vol_ = acc;
}

double ParticleFilter::next_mu_fore() const { return params_.beta[0]; }

void ParticleFilter::systematic_resample() {
    std::vector<double> cum(n_);
    double run = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        run += w_[i];
        cum[i] = run;
    }
    std::vector<double> fresh(n_);
    double u0 = rng_.uniform() / static_cast<double>(n_);
    std::size_t j = 0;
    for (std::size_t i = 0; i < n_; ++i) {
        double u = u0 + static_cast<double>(i) / static_cast<double>(n_);
        while (j + 1 < n_ && cum[j] < u * run) ++j;
        fresh[i] = h_[j];
    }
    h_ = std::move(fresh);
    w_.assign(n_, 1.0 / static_cast<double>(n_));
}

void ParticleFilter::update(double y) {
    double mu_y = params_.beta[0];
    double nu = has_t_ ? *params_.nu : 0.0;
    double rho = has_lev_ ? *params_.rho : 0.0;
    double rho_c = std::sqrt(1.0 - rho * rho);

    // reweight by the marginal observation density
    std::vector<double> lw(n_);
    double max_lw = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        double zs = (y - mu_y) * std::exp(-h_[i] / 2.0);
        double ld = has_t_ ? stats::log_std_t_pdf(zs, nu) : -0.5 * zs * zs;
        lw[i] = std::log(w_[i]) + ld - h_[i] / 2.0;
        max_lw = std::max(max_lw, lw[i]);
    }
    if (!std::isfinite(max_lw))
        throw NumericError("particle filter degenerated: all weights vanished");
    double total = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        w_[i] = std::exp(lw[i] - max_lw);
        total += w_[i];
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericError("particle filter degenerated: zero total weight");
    double ess = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        w_[i] /= total;
        ess += w_[i] * w_[i];
    }
    ess = 1.0 / ess;
    if (ess < 0.01 * static_cast<double>(n_)) {
        if (++degenerate_streak_ >= 10)
            throw NumericError("particle filter degenerated: persistent sub-1% ESS");
    } else {
        degenerate_streak_ = 0;
    }

    double fv = 0.0;
    for (std::size_t i = 0; i < n_; ++i) fv += w_[i] * std::exp(h_[i] / 2.0);
    filtered_vol_ = fv;

    // resample before propagating so duplicated particles pick up fresh
    // transition noise; leaving this after the propagation step would give a
    // zero-diversity cloud on the next update
    if (ess < 0.5 * static_cast<double>(n_)) systematic_resample();

    // propagate through the AR(1); leverage enters via eta | z ~ N(rho z, 1-rho^2)
    double fore = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
        double eps = (y - mu_y) * std::exp(-h_[i] / 2.0);
        double z = eps;
        if (has_t_) {
            double lam = rng_.inverse_gamma((nu + 1.0) / 2.0,
                                            (nu + eps * eps * nu / (nu - 2.0)) / 2.0);
            z = eps / std::sqrt(lam * (nu - 2.0) / nu);
        }
        double eta = rho * z + rho_c * rng_.normal();
        h_[i] = params_.mu + params_.phi * (h_[i] - params_.mu) + params_.sigma * eta;
        fore += w_[i] * std::exp(h_[i] / 2.0);
    }
    next_sigma_fore_ = fore;
}

Forecast sv_forecast(const SvPosterior& post, const ReturnSeries& train,
                     const ReturnSeries& test, std::size_t n_particles, std::uint64_t seed) {
    if (n_particles < 1000) throw DataError("sv_forecast needs at least 1000 particles");
    train.validate();
    test.validate();
    SvParams p = post.mean_params();
    ParticleFilter pf(post.variant, p, n_particles, seed);
    for (double y : train.returns) pf.update(y);
    Forecast f;
    f.mu_fore.reserve(test.size());
    f.sigma_fore.reserve(test.size());
    for (double y : test.returns) {
        f.mu_fore.push_back(pf.next_mu_fore());
        f.sigma_fore.push_back(pf.next_sigma_fore());
        pf.update(y);
    }
    return f;
}

Forecast garch_forecast(const GarchFit& fit, const ReturnSeries& train,
                        const ReturnSeries& test) {
    train.validate();
    test.validate();
    auto [path, next] = filter_and_forecast(fit, train);
    (void)path;
    double s2 = next;
    Forecast f;
    f.mu_fore.reserve(test.size());
    f.sigma_fore.reserve(test.size());
    for (double y : test.returns) {
        f.mu_fore.push_back(fit.mean);
        f.sigma_fore.push_back(std::sqrt(s2));
        double x = y - fit.mean;
        s2 = fit.params.alpha0 + fit.params.alpha1 * x * x + fit.params.beta1 * s2;
    }
    return f;
}

VarSeries var_from_quantile(const Forecast& fore, const std::vector<Date>& dates,
                            double q_alpha, double alpha, const std::string& tag) {
    if (fore.mu_fore.size() != dates.size() || fore.sigma_fore.size() != dates.size())
        throw DataError("var_from_quantile: forecast/date length mismatch");
    VarSeries v;
    v.dates = dates;
    v.alpha = alpha;
    v.model_tag = tag;
    v.mu_fore = fore.mu_fore;
    v.sigma_fore = fore.sigma_fore;
    v.var_values.resize(dates.size());
    for (std::size_t t = 0; t < dates.size(); ++t) {
        if (!(fore.sigma_fore[t] > 0.0))
            throw DataError("nonpositive sigma forecast at index " + std::to_string(t));
        v.var_values[t] = fore.sigma_fore[t] * q_alpha - fore.mu_fore[t];
    }
    return v;
}

VarSeries dynamic_var(const Forecast& fore, const std::vector<Date>& dates,
                      const GpdTailModel& tail, double alpha, const std::string& tag) {
    double q = tail_quantile(tail, alpha);
    return var_from_quantile(fore, dates, q, alpha, tag);
}

VarSeries empirical_var(const ReturnSeries& history, const ReturnSeries& test, double alpha,
                        std::size_t window) {
    history.validate();
    test.validate();
    if (window < 1) throw DataError("empirical_var needs a positive window");
    if (history.size() < window)
        throw DataError("empirical_var: history shorter than the rolling window");
    if (!(alpha > 0.0 && alpha < 1.0)) throw DataError("alpha must be in (0,1)");

    std::vector<double> losses;
    losses.reserve(window + test.size());
    for (std::size_t i = history.size() - window; i < history.size(); ++i)
        losses.push_back(-history.returns[i]);

    std::size_t idx = static_cast<std::size_t>(
        std::ceil(static_cast<double>(window) * alpha - 1e-9));
    idx = std::clamp<std::size_t>(idx, 1, window);

    VarSeries v;
    v.dates = test.dates;
    v.alpha = alpha;
    v.model_tag = "empirical";
    v.var_values.resize(test.size());
    v.mu_fore.assign(test.size(), 0.0);
    v.sigma_fore.assign(test.size(), 1.0);
    std::vector<double> sorted;
    for (std::size_t t = 0; t < test.size(); ++t) {
        sorted.assign(losses.end() - window, losses.end());
        std::sort(sorted.begin(), sorted.end());
        v.var_values[t] = sorted[idx - 1];
        losses.push_back(-test.returns[t]);
    }
    return v;
}

double QqData::sum_sq_dev() const {
    double s = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        double d = sample[i] - theoretical[i];
        s += d * d;
    }
    return s;
}

QqData qq_points(const std::vector<double>& x) {
    if (x.size() < 2) throw DataError("qq_points needs at least 2 values");
    double m = stats::mean(x);
    double s = stats::sd(x);
    if (!(s > 0.0)) throw NumericError("qq_points: zero-variance input");
    QqData q;
    q.sample.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) q.sample[i] = (x[i] - m) / s;
    std::sort(q.sample.begin(), q.sample.end());
    q.theoretical.resize(x.size());
    double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        q.theoretical[i] = stats::norm_ppf((static_cast<double>(i) + 0.5) / n);
    return q;
}

void write_var_csv(const std::string& path, const VarSeries& v) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "date,alpha,var,mu_fore,sigma_fore,model\n";
    out.precision(15);
    for (std::size_t t = 0; t < v.var_values.size(); ++t) {
        out << v.dates[t].to_string() << "," << v.alpha << "," << v.var_values[t] << ","
            << v.mu_fore[t] << "," << v.sigma_fore[t] << "," << v.model_tag << "\n";
    }
}

VarSeries load_var_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    VarSeries v;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 6)
            throw DataError("malformed VaR row on line " + std::to_string(line_no));
        v.dates.push_back(Date::parse(fields[0]));
        v.alpha = std::stod(fields[1]);
        v.var_values.push_back(std::stod(fields[2]));
        v.mu_fore.push_back(std::stod(fields[3]));
        v.sigma_fore.push_back(std::stod(fields[4]));
        v.model_tag = fields[5];
    }
    if (v.var_values.empty()) throw DataError("no VaR rows in " + path);
    return v;
}

void write_qq_csv(const std::string& path, const QqData& q) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "theoretical,sample\n";
    out.precision(15);
    for (std::size_t i = 0; i < q.sample.size(); ++i)
        out << q.theoretical[i] << "," << q.sample[i] << "\n";
}

}  // namespace svevt
