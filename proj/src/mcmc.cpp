#include "svevt/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "svevt/errors.hpp"
#include "svevt/optim.hpp"
#include "svevt/rng.hpp"
#include "svevt/stats.hpp"

namespace svevt {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void PriorSpec::validate() const {
    if (!(mu_var > 0.0) || !(beta_var > 0.0)) throw DataError("prior variances must be positive");
    if (!(phi_a > 0.0) || !(phi_b > 0.0) || !(rho_a > 0.0) || !(rho_b > 0.0))
        throw DataError("Beta prior hyperparameters must be positive");
    if (!(sigma2_shape > 0.0) || !(sigma2_rate > 0.0))
        throw DataError("Gamma prior hyperparameters must be positive");
    if (!(nu_rate > 0.0)) throw DataError("nu prior rate must be positive");
}

void McmcConfig::validate() const {
    if (draws == 0) throw DataError("draws must be positive");
    if (thin == 0) throw DataError("thin must be positive");
    if (latent_sweeps == 0) throw DataError("latent_sweeps must be positive");
    if (fixed_rho && !(std::fabs(*fixed_rho) < 1.0))
        throw DataError("fixed_rho must lie in (-1, 1)");
    if (fixed_nu && !(*fixed_nu > 2.0)) throw DataError("fixed_nu must exceed 2");
}

std::size_t SvPosterior::index_of(const std::string& name) const {
    for (std::size_t j = 0; j < param_names.size(); ++j)
        if (param_names[j] == name) return j;
    throw DataError("no such parameter in posterior: " + name);
}

double SvPosterior::posterior_mean(const std::string& name) const {
    return stats::mean(draws[index_of(name)]);
}

SvParams SvPosterior::mean_params() const {
    SvParams p;
    p.mu = posterior_mean("mu");
    p.phi = posterior_mean("phi");
    p.sigma = posterior_mean("sigma");
    if (variant_has_t(variant)) p.nu = posterior_mean("nu");
    if (variant_has_leverage(variant)) p.rho = posterior_mean("rho");
    p.beta.clear();
    for (std::size_t j = 0; j < param_names.size(); ++j)
        if (param_names[j].rfind("beta", 0) == 0) p.beta.push_back(stats::mean(draws[j]));
    return p;
}

namespace {

class Sampler {
public:
    Sampler(const std::vector<double>& y, const Matrix* x, SvVariant v, const PriorSpec& prior,
            const McmcConfig& cfg)
        : y_(y),
          x_(x),
          n_(y.size()),
          k_(x ? (*x)[0].size() : 1),
          variant_(v),
          prior_(prior),
          cfg_(cfg),
          has_t_(variant_has_t(v)),
          has_lev_(variant_has_leverage(v)),
          rng_(cfg.seed) {
        init_state();
    }

    void run(SvPosterior& out) {
        std::size_t total = cfg_.burn_in + cfg_.draws * cfg_.thin;
        std::size_t retained = 0;
        std::size_t h_stride = std::max<std::size_t>(1, cfg_.draws / 400);

        out.param_names = param_names();
        out.draws.assign(out.param_names.size(), {});
        for (auto& col : out.draws) col.reserve(cfg_.draws);
        out.vol_hat.assign(n_, 0.0);

        for (std::size_t iter = 0; iter < total; ++iter) {
            bool adapting = iter < cfg_.burn_in;
            sweep(iter, adapting);
            if (!std::isfinite(log_joint()))
                throw NumericError("divergent chain: non-finite log-posterior");
            if (iter >= cfg_.burn_in && (iter - cfg_.burn_in) % cfg_.thin == 0) {
                retain(out);
                if (retained % h_stride == 0) h_keep_.push_back(h_);
                ++retained;
            }
        }

        for (std::size_t t = 0; t < n_; ++t) out.vol_hat[t] /= static_cast<double>(retained);
        fill_h_band(out);
    }

private:
    std::vector<std::string> param_names() const {
        std::vector<std::string> names{"mu", "phi", "sigma"};
        if (has_t_) names.push_back("nu");
        if (has_lev_) names.push_back("rho");
        for (std::size_t j = 0; j < k_; ++j) names.push_back("beta" + std::to_string(j));
        return names;
    }

    double xb(std::size_t t) const {
        if (!x_) return beta_[0];
        const auto& row = (*x_)[t];
        double v = 0.0;
        for (std::size_t j = 0; j < k_; ++j) v += row[j] * beta_[j];
        return v;
    }

    void init_state() {
        // beta from least squares (sample mean in the constant-column case)
        beta_.assign(k_, 0.0);
        if (!x_) {
            beta_[0] = stats::mean(y_);
        } else {
            std::vector<std::vector<double>> xtx(k_, std::vector<double>(k_, 0.0));
            std::vector<double> xty(k_, 0.0);
            for (std::size_t t = 0; t < n_; ++t) {
                const auto& row = (*x_)[t];
                for (std::size_t a = 0; a < k_; ++a) {
                    xty[a] += row[a] * y_[t];
                    for (std::size_t b = 0; b < k_; ++b) xtx[a][b] += row[a] * row[b];
                }
            }
            for (std::size_t a = 0; a < k_; ++a) xtx[a][a] += 1e-8;
            beta_ = optim::cholesky_solve(xtx, xty);
        }

        e_.resize(n_);
        for (std::size_t t = 0; t < n_; ++t) e_[t] = y_[t] - xb(t);
        double var_e = std::max(stats::variance(e_), 1e-8);

        mu_ = std::log(var_e);
        phi_ = 0.9;
        sigma_ = 0.2;
        nu_ = cfg_.fixed_nu ? *cfg_.fixed_nu : 10.0;
        rho_ = cfg_.fixed_rho ? *cfg_.fixed_rho : (has_lev_ ? -0.3 : 0.0);
        update_rho_ = has_lev_ && !cfg_.fixed_rho;
        update_nu_ = has_t_ && !cfg_.fixed_nu;

        h_.assign(n_, mu_);
        lam_.assign(n_, 1.0);
        s_.assign(n_, has_t_ ? std::sqrt((nu_ - 2.0) / nu_) : 1.0);
        g_.resize(n_);
        z_.resize(n_);
        for (std::size_t t = 0; t < n_; ++t) {
            g_[t] = std::exp(-h_[t] / 2.0);
            z_[t] = e_[t] * g_[t] / s_[t];
        }
    }

    // stationary + transition log-density in the candidate parameters, using
    // the current z path
    double trans_logpost(double mu, double phi, double sigma, double rho) const {
        double om = 1.0 - phi * phi;
        double r2 = 1.0 - rho * rho;
        if (!(om > 0.0) || !(sigma > 0.0) || !(r2 > 0.0)) return kNegInf;
        double s2 = sigma * sigma;
        double lp = 0.5 * std::log(om) - std::log(sigma) -
                    (h_[0] - mu) * (h_[0] - mu) * om / (2.0 * s2);
        double sum = 0.0;
        for (std::size_t t = 0; t + 1 < n_; ++t) {
            double w = h_[t + 1] - mu - phi * (h_[t] - mu) - sigma * rho * z_[t];
            sum += w * w;
        }
        double m = static_cast<double>(n_ - 1);
        lp -= m * (std::log(sigma) + 0.5 * std::log(r2));
        lp -= sum / (2.0 * s2 * r2);
        return lp;
    }

    double phi_logprior_jac(double phi) const {
        double lo = (1.0 + phi) / 2.0, hi = (1.0 - phi) / 2.0;
        if (!(lo > 0.0) || !(hi > 0.0)) return kNegInf;
        return (prior_.phi_a - 1.0) * std::log(lo) + (prior_.phi_b - 1.0) * std::log(hi) +
               std::log1p(-phi * phi);
    }

    double rho_logprior_jac(double rho) const {
        double lo = (1.0 + rho) / 2.0, hi = (1.0 - rho) / 2.0;
        if (!(lo > 0.0) || !(hi > 0.0)) return kNegInf;
        return (prior_.rho_a - 1.0) * std::log(lo) + (prior_.rho_b - 1.0) * std::log(hi) +
               std::log1p(-rho * rho);
    }

    static double atanh_safe(double v) { return 0.5 * std::log((1.0 + v) / (1.0 - v)); }

    void adapt(double& tau, double rate, double target, std::size_t iter) const {
        double gamma = std::pow(static_cast<double>(iter) + 1.0, -0.6);
        tau *= std::exp(gamma * (rate - target));
        tau = std::clamp(tau, 1e-4, 10.0);
    }

    bool mh_accept(double delta) {
        if (!std::isfinite(delta)) return false;
        if (delta >= 0.0) return true;
        return std::log(rng_.uniform()) < delta;
    }

    void step_phi(std::size_t iter, bool adapting) {
        double a = atanh_safe(phi_);
        double a2 = a + tau_phi_ * rng_.normal();
        double phi2 = std::tanh(a2);
        double lp1 = trans_logpost(mu_, phi_, sigma_, rho_) + phi_logprior_jac(phi_);
        double lp2 = trans_logpost(mu_, phi2, sigma_, rho_) + phi_logprior_jac(phi2);
        bool acc = mh_accept(lp2 - lp1);
        if (acc) phi_ = phi2;
        if (adapting) adapt(tau_phi_, acc ? 1.0 : 0.0, 0.44, iter);
    }

    void step_sigma_rho(std::size_t iter, bool adapting) {
        double u = std::log(sigma_ * sigma_);
        double r = update_rho_ ? atanh_safe(rho_) : 0.0;
        double u2 = u + tau_sr_ * rng_.normal();
        double r2t = update_rho_ ? r + tau_sr_ * rng_.normal() : r;
        double sigma2 = std::exp(u2 / 2.0);
        double rho2 = update_rho_ ? std::tanh(r2t) : rho_;

        double lp1 = trans_logpost(mu_, phi_, sigma_, rho_) + prior_.sigma2_shape * u -
                     prior_.sigma2_rate * std::exp(u);
        double lp2 = trans_logpost(mu_, phi_, sigma2, rho2) + prior_.sigma2_shape * u2 -
                     prior_.sigma2_rate * std::exp(u2);
        if (update_rho_) {
            lp1 += rho_logprior_jac(rho_);
            lp2 += rho_logprior_jac(rho2);
        }
        bool acc = mh_accept(lp2 - lp1);
        if (acc) {
            sigma_ = sigma2;
            rho_ = rho2;
        }
        if (adapting) adapt(tau_sr_, acc ? 1.0 : 0.0, update_rho_ ? 0.3 : 0.44, iter);
    }

    // joint move on (atanh phi, log sigma^2, atanh rho) with a proposal shaped
    // by the running chain covariance. Given h these parameters sit on a
    // narrow correlated ridge, so the axis-aligned singles above random-walk
    // along it in tiny steps; the learned covariance proposes along the ridge.
    void step_block(std::size_t iter, bool adapting) {
        const std::size_t d = update_rho_ ? 3 : 2;
        double th[3] = {atanh_safe(phi_), std::log(sigma_ * sigma_), 0.0};
        if (update_rho_) th[2] = atanh_safe(rho_);

        if (adapting) {
            ++am_n_;
            double w = 1.0 / static_cast<double>(am_n_);
            double delta[3];
            for (std::size_t j = 0; j < d; ++j) {
                delta[j] = th[j] - am_mean_[j];
                am_mean_[j] += delta[j] * w;
            }
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j)
                    am_cov_[i][j] += (delta[i] * (th[j] - am_mean_[j]) - am_cov_[i][j]) * w;
        }
        if (am_n_ < 100 * d) return;  // covariance still uninformative

        double L[3][3] = {};
        {
            double a[3][3];
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = 0; j < d; ++j) a[i][j] = am_cov_[i][j];
            for (std::size_t i = 0; i < d; ++i) a[i][i] += 1e-12 + 1e-6 * a[i][i];
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    double s = a[i][j];
                    for (std::size_t k = 0; k < j; ++k) s -= L[i][k] * L[j][k];
                    if (i == j) {
                        if (!(s > 0.0)) return;  // numerically non-PD, skip
                        L[i][i] = std::sqrt(s);
                    } else {
                        L[i][j] = s / L[j][j];
                    }
                }
            }
        }
        double scale = std::exp(log_c_am_ / 2.0);
        double xi[3];
        for (std::size_t j = 0; j < d; ++j) xi[j] = rng_.normal();
        double prop[3] = {th[0], th[1], th[2]};
        for (std::size_t i = 0; i < d; ++i) {
            double step = 0.0;
            for (std::size_t j = 0; j <= i; ++j) step += L[i][j] * xi[j];
            prop[i] += scale * step;
        }
        double phi2 = std::tanh(prop[0]);
        double sig2 = std::exp(prop[1] / 2.0);
        double rho2 = update_rho_ ? std::tanh(prop[2]) : rho_;

        double lp1 = trans_logpost(mu_, phi_, sigma_, rho_) + phi_logprior_jac(phi_) +
                     prior_.sigma2_shape * th[1] - prior_.sigma2_rate * std::exp(th[1]);
        double lp2 = trans_logpost(mu_, phi2, sig2, rho2) + phi_logprior_jac(phi2) +
                     prior_.sigma2_shape * prop[1] - prior_.sigma2_rate * std::exp(prop[1]);
        if (update_rho_) {
            lp1 += rho_logprior_jac(rho_);
            lp2 += rho_logprior_jac(rho2);
        }
        bool acc = mh_accept(lp2 - lp1);
        if (acc) {
            phi_ = phi2;
            sigma_ = sig2;
            rho_ = rho2;
        }
        if (adapting) {
            double gamma = std::pow(static_cast<double>(iter) + 1.0, -0.6);
            log_c_am_ += gamma * ((acc ? 1.0 : 0.0) - 0.3);
            log_c_am_ = std::clamp(log_c_am_, std::log(1e-6), std::log(100.0));
        }
    }

    // translate mu and the whole latent path together. The level of h is
    // nearly frozen under single-site updates (coherent moves of all sites
    // fight the tight AR(1) coupling), so this move samples the slow level
    // direction directly; h - mu is invariant, only the observation scale,
    // the leverage drift, and the mu prior change.
    void step_shift(std::size_t iter, bool adapting) {
        double delta = tau_shift_ * rng_.normal();
        double f = std::exp(-delta / 2.0);
        double dn = static_cast<double>(n_);

        double sz2 = 0.0;
        for (std::size_t t = 0; t < n_; ++t) sz2 += z_[t] * z_[t];
        double lp = -dn * delta / 2.0 - 0.5 * sz2 * (f * f - 1.0);
        if (has_lev_) {
            double psi = 1.0 / (2.0 * sigma_ * sigma_ * (1.0 - rho_ * rho_));
            double acc2 = 0.0;
            for (std::size_t t = 0; t + 1 < n_; ++t) {
                double dxy = h_[t + 1] - mu_ - phi_ * (h_[t] - mu_);
                double wold = dxy - sigma_ * rho_ * z_[t];
                double wnew = dxy - sigma_ * rho_ * z_[t] * f;
                acc2 += wold * wold - wnew * wnew;
            }
            lp += acc2 * psi;
        }
        double mu2 = mu_ + delta;
        lp += ((mu_ - prior_.mu_mean) * (mu_ - prior_.mu_mean) -
               (mu2 - prior_.mu_mean) * (mu2 - prior_.mu_mean)) /
              (2.0 * prior_.mu_var);

        bool acc = mh_accept(lp);
        if (acc) {
            mu_ = mu2;
            for (std::size_t t = 0; t < n_; ++t) {
                h_[t] += delta;
                g_[t] *= f;
                z_[t] *= f;
            }
        }
        if (adapting) adapt(tau_shift_, acc ? 1.0 : 0.0, 0.44, iter);
    }

    void step_mu() {
        double s2 = sigma_ * sigma_;
        double om = 1.0 - phi_ * phi_;
        double psi = 1.0 / (s2 * (1.0 - rho_ * rho_));
        double f = 1.0 - phi_;
        double prec = om / s2 + 1.0 / prior_.mu_var;
        double lin = h_[0] * om / s2 + prior_.mu_mean / prior_.mu_var;
        double csum = 0.0;
        for (std::size_t t = 0; t + 1 < n_; ++t)
            csum += h_[t + 1] - phi_ * h_[t] - sigma_ * rho_ * z_[t];
        prec += static_cast<double>(n_ - 1) * f * f * psi;
        lin += f * psi * csum;
        mu_ = lin / prec + rng_.normal() / std::sqrt(prec);
    }

    void step_beta() {
        double psi = 1.0 / (sigma_ * sigma_ * (1.0 - rho_ * rho_));
        std::vector<std::vector<double>> prec(k_, std::vector<double>(k_, 0.0));
        std::vector<double> lin(k_, prior_.beta_mean / prior_.beta_var);
        for (std::size_t j = 0; j < k_; ++j) prec[j][j] = 1.0 / prior_.beta_var;

        std::vector<double> row_store(1, 1.0);
        for (std::size_t t = 0; t < n_; ++t) {
            const double* row = x_ ? (*x_)[t].data() : row_store.data();
            double gt = g_[t] / s_[t];
            double w_obs = gt * gt;
            double w_lev = 0.0, m_lev = 0.0;
            if (has_lev_ && t + 1 < n_) {
                double a = sigma_ * rho_ * gt;
                double d = h_[t + 1] - mu_ - phi_ * (h_[t] - mu_);
                w_lev = psi * a * a;
                m_lev = psi * a * (d - a * y_[t]);
            }
            for (std::size_t aidx = 0; aidx < k_; ++aidx) {
                lin[aidx] += w_obs * y_[t] * row[aidx] - m_lev * row[aidx];
                for (std::size_t b = 0; b < k_; ++b)
                    prec[aidx][b] += (w_obs + w_lev) * row[aidx] * row[b];
            }
        }

        std::vector<double> mean = optim::cholesky_solve(prec, lin);
        auto chol = optim::cholesky_lower(std::move(prec));
        // solve L^T u = xi so that u ~ N(0, prec^{-1})
        std::vector<double> u(k_);
        for (std::size_t j = 0; j < k_; ++j) u[j] = rng_.normal();
        for (std::size_t ii = k_; ii-- > 0;) {
            double sum = u[ii];
            for (std::size_t jj = ii + 1; jj < k_; ++jj) sum -= chol[jj][ii] * u[jj];
            u[ii] = sum / chol[ii][ii];
        }
        for (std::size_t j = 0; j < k_; ++j) beta_[j] = mean[j] + u[j];
        for (std::size_t t = 0; t < n_; ++t) {
            e_[t] = y_[t] - xb(t);
            z_[t] = e_[t] * g_[t] / s_[t];
        }
    }

    void step_nu(std::size_t iter, bool adapting) {
        double m = std::log(nu_ - 2.0);
        double m2 = m + tau_nu_ * rng_.normal();
        double nu2 = 2.0 + std::exp(m2);
        if (!(nu2 > 2.0) || !std::isfinite(nu2)) return;
        // all z scale by 1/r when nu changes with lambda held fixed
        double r = std::sqrt(((nu2 - 2.0) / nu2) / ((nu_ - 2.0) / nu_));

        double sz2 = 0.0, slog = 0.0, sinv = 0.0;
        for (std::size_t t = 0; t < n_; ++t) {
            sz2 += z_[t] * z_[t];
            slog += std::log(lam_[t]);
            sinv += 1.0 / lam_[t];
        }
        double dn = static_cast<double>(n_);
        double dobs = -dn * std::log(r) - 0.5 * sz2 * (1.0 / (r * r) - 1.0);
        double dlam = dn * (nu2 / 2.0 * std::log(nu2 / 2.0) - std::lgamma(nu2 / 2.0) -
                            nu_ / 2.0 * std::log(nu_ / 2.0) + std::lgamma(nu_ / 2.0)) -
                      (nu2 - nu_) / 2.0 * (slog + sinv);
        double dtr = 0.0;
        if (has_lev_) {
            double acc = 0.0;
            for (std::size_t t = 0; t + 1 < n_; ++t) {
                double d = h_[t + 1] - mu_ - phi_ * (h_[t] - mu_);
                double wold = d - sigma_ * rho_ * z_[t];
                double wnew = d - sigma_ * rho_ * z_[t] / r;
                acc += wold * wold - wnew * wnew;
            }
            dtr = acc / (2.0 * sigma_ * sigma_ * (1.0 - rho_ * rho_));
        }
        double dpr = -prior_.nu_rate * (nu2 - nu_) + (m2 - m);
        bool accd = mh_accept(dobs + dlam + dtr + dpr);
        if (accd) {
            nu_ = nu2;
            for (std::size_t t = 0; t < n_; ++t) {
                s_[t] *= r;
                z_[t] /= r;
            }
        }
        if (adapting) adapt(tau_nu_, accd ? 1.0 : 0.0, 0.44, iter);
    }

    void step_lambda() {
        double psi = 1.0 / (2.0 * sigma_ * sigma_ * (1.0 - rho_ * rho_));
        for (std::size_t t = 0; t < n_; ++t) {
            double kap2 = z_[t] * z_[t] * lam_[t];
            double lam2 = rng_.inverse_gamma((nu_ + 1.0) / 2.0, (nu_ + kap2) / 2.0);
            bool acc = true;
            if (has_lev_ && t + 1 < n_) {
                double d = h_[t + 1] - mu_ - phi_ * (h_[t] - mu_);
                double wold = d - sigma_ * rho_ * z_[t];
                double wnew = d - sigma_ * rho_ * z_[t] * std::sqrt(lam_[t] / lam2);
                acc = mh_accept((wold * wold - wnew * wnew) * psi);
            }
            if (acc) {
                lam_[t] = lam2;
                s_[t] = std::sqrt(lam2 * (nu_ - 2.0) / nu_);
                z_[t] = e_[t] * g_[t] / s_[t];
            }
        }
    }

    double h_local(std::size_t t, double v, double zv) const {
        double s2 = sigma_ * sigma_;
        double psi = 1.0 / (2.0 * s2 * (1.0 - rho_ * rho_));
        double lp = -v / 2.0 - zv * zv / 2.0;
        if (t == 0) {
            double om = 1.0 - phi_ * phi_;
            lp -= (v - mu_) * (v - mu_) * om / (2.0 * s2);
        } else {
            double w = v - mu_ - phi_ * (h_[t - 1] - mu_) - sigma_ * rho_ * z_[t - 1];
            lp -= w * w * psi;
        }
        if (t + 1 < n_) {
            double w = h_[t + 1] - mu_ - phi_ * (v - mu_) - sigma_ * rho_ * zv;
            lp -= w * w * psi;
        }
        return lp;
    }

    void step_h(std::size_t iter, bool adapting) {
        std::size_t accepted = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            double v = h_[t] + tau_h_ * rng_.normal();
            double gv = std::exp(-v / 2.0);
            double zv = e_[t] * gv / s_[t];
            double delta = h_local(t, v, zv) - h_local(t, h_[t], z_[t]);
            if (mh_accept(delta)) {
                h_[t] = v;
                g_[t] = gv;
                z_[t] = zv;
                ++accepted;
            }
        }
        if (adapting)
            adapt(tau_h_, static_cast<double>(accepted) / static_cast<double>(n_), 0.44, iter);
    }

    void sweep(std::size_t iter, bool adapting) {
        // the MH parameter moves are cheap next to the latent sweep, so a few
        // repeats per iteration buy extra mixing along the slow directions
        for (int r = 0; r < 3; ++r) {
            step_phi(iter, adapting);
            step_sigma_rho(iter, adapting);
            step_block(iter, adapting);
        }
        step_mu();
        step_beta();
        // nu and lambda form their own sticky two-block loop; extra
        // alternations decorrelate nu at O(n) cost each
        int t_reps = has_t_ ? (update_nu_ ? 3 : 1) : 0;
        for (int r = 0; r < t_reps; ++r) {
            step_lambda();
            if (update_nu_) step_nu(iter, adapting);
        }
        for (std::size_t r = 0; r < cfg_.latent_sweeps; ++r) step_h(iter, adapting);
        step_shift(iter, adapting);
    }

    double log_joint() const {
        double lp = 0.0;
        for (std::size_t t = 0; t < n_; ++t)
            lp += -h_[t] / 2.0 - std::log(s_[t]) - z_[t] * z_[t] / 2.0;
        lp += trans_logpost(mu_, phi_, sigma_, rho_);
        if (has_t_) {
            double c = nu_ / 2.0 * std::log(nu_ / 2.0) - std::lgamma(nu_ / 2.0);
            for (std::size_t t = 0; t < n_; ++t)
                lp += c - (nu_ / 2.0 + 1.0) * std::log(lam_[t]) - nu_ / (2.0 * lam_[t]);
            lp += -prior_.nu_rate * (nu_ - 2.0);
        }
        lp += -(mu_ - prior_.mu_mean) * (mu_ - prior_.mu_mean) / (2.0 * prior_.mu_var);
        for (double b : beta_)
            lp += -(b - prior_.beta_mean) * (b - prior_.beta_mean) / (2.0 * prior_.beta_var);
        lp += (prior_.phi_a - 1.0) * std::log((1.0 + phi_) / 2.0) +
              (prior_.phi_b - 1.0) * std::log((1.0 - phi_) / 2.0);
        double s2 = sigma_ * sigma_;
        lp += (prior_.sigma2_shape - 1.0) * std::log(s2) - prior_.sigma2_rate * s2;
        if (has_lev_)
            lp += (prior_.rho_a - 1.0) * std::log((1.0 + rho_) / 2.0) +
                  (prior_.rho_b - 1.0) * std::log((1.0 - rho_) / 2.0);
        return lp;
    }

    void retain(SvPosterior& out) {
        std::size_t j = 0;
        out.draws[j++].push_back(mu_);
        out.draws[j++].push_back(phi_);
        out.draws[j++].push_back(sigma_);
        if (has_t_) out.draws[j++].push_back(nu_);
        if (has_lev_) out.draws[j++].push_back(rho_);
        for (std::size_t b = 0; b < k_; ++b) out.draws[j++].push_back(beta_[b]);
        for (std::size_t t = 0; t < n_; ++t) out.vol_hat[t] += 1.0 / g_[t];
    }

    void fill_h_band(SvPosterior& out) const {
        out.h_q05.resize(n_);
        out.h_q50.resize(n_);
        out.h_q95.resize(n_);
        std::vector<double> col(h_keep_.size());
        for (std::size_t t = 0; t < n_; ++t) {
            for (std::size_t i = 0; i < h_keep_.size(); ++i) col[i] = h_keep_[i][t];
            std::sort(col.begin(), col.end());
            out.h_q05[t] = stats::quantile(col, 0.05);
            out.h_q50[t] = stats::quantile(col, 0.50);
            out.h_q95[t] = stats::quantile(col, 0.95);
        }
    }

    const std::vector<double>& y_;
    const Matrix* x_;
    std::size_t n_, k_;
    SvVariant variant_;
    const PriorSpec& prior_;
    const McmcConfig& cfg_;
    bool has_t_, has_lev_;
    bool update_rho_ = false, update_nu_ = false;
    Rng rng_;

    double mu_ = 0.0, phi_ = 0.9, sigma_ = 0.2, nu_ = 10.0, rho_ = 0.0;
    std::vector<double> beta_, h_, lam_, e_, g_, s_, z_;
    std::vector<std::vector<double>> h_keep_;

    double tau_phi_ = 0.1, tau_sr_ = 0.2, tau_nu_ = 0.3, tau_h_ = 0.5;
    double tau_shift_ = 0.1;

    // adaptive-block state: running mean/covariance of the transformed
    // (phi, sigma, rho) chain and the log proposal scale
    std::size_t am_n_ = 0;
    double am_mean_[3] = {};
    double am_cov_[3][3] = {};
    double log_c_am_ = std::log(2.38 * 2.38 / 3.0);
};

}  // namespace

SvPosterior fit_sv(const ReturnSeries& y, SvVariant v, const PriorSpec& prior,
                   const McmcConfig& cfg, const Matrix* x) {
    y.validate();
    prior.validate();
    cfg.validate();
    if (y.size() < 100) throw DataError("fit_sv needs at least 100 observations");
    if (x) {
        if (x->size() != y.size()) throw DataError("regressor matrix must match series length");
        for (const auto& row : *x)
            if (row.size() != (*x)[0].size()) throw DataError("ragged regressor matrix");
    }

    SvPosterior post;
    post.variant = v;
    post.config = cfg;
    post.dates = y.dates;

    Sampler sampler(y.returns, x, v, prior, cfg);
    sampler.run(post);

    post.diagnostics.clear();
    for (std::size_t j = 0; j < post.param_names.size(); ++j) {
        ParamDiagnostic d;
        d.name = post.param_names[j];
        d.geweke_z = geweke_z(post.draws[j]);
        d.ess = effective_sample_size(post.draws[j]);
        post.diagnostics.push_back(d);
    }
    return post;
}

std::vector<SummaryRow> posterior_summary(const SvPosterior& p) {
    if (p.n_retained() < 100) throw DataError("posterior_summary needs at least 100 draws");
    std::vector<SummaryRow> rows;
    auto add = [&rows](const std::string& name, const std::vector<double>& chain) {
        SummaryRow r;
        r.name = name;
        r.mean = stats::mean(chain);
        double var = 0.0;
        for (double v : chain) var += (v - r.mean) * (v - r.mean);
        var /= static_cast<double>(chain.size() - 1);
        r.sd = std::sqrt(std::max(var, 0.0));
        r.ci_lo = stats::quantile_unsorted(chain, 0.025);
        r.ci_hi = stats::quantile_unsorted(chain, 0.975);
        rows.push_back(r);
    };
    for (std::size_t j = 0; j < p.param_names.size(); ++j) add(p.param_names[j], p.draws[j]);

    const auto& mu_chain = p.draws[p.index_of("mu")];
    std::vector<double> transformed(mu_chain.size());
    for (std::size_t i = 0; i < mu_chain.size(); ++i) transformed[i] = std::exp(mu_chain[i] / 2.0);
    add("exp(mu/2)", transformed);
    const auto& sig_chain = p.draws[p.index_of("sigma")];
    for (std::size_t i = 0; i < sig_chain.size(); ++i) transformed[i] = sig_chain[i] * sig_chain[i];
    add("sigma2", transformed);
    return rows;
}

std::vector<ConvergenceRow> convergence_check(const SvPosterior& p, double z_threshold) {
    if (p.n_retained() < 200) throw DataError("convergence_check needs at least 200 draws");
    std::vector<ConvergenceRow> rows;
    for (const auto& d : p.diagnostics) {
        ConvergenceRow r;
        r.name = d.name;
        r.z = d.geweke_z;
        r.ess = d.ess;
        r.pass = std::fabs(d.geweke_z) < z_threshold;
        rows.push_back(r);
    }
    return rows;
}

void export_chain(const SvPosterior& p, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw DataError("cannot create output directory: " + dir);

    for (std::size_t j = 0; j < p.param_names.size(); ++j) {
        std::string path = dir + "/trace_" + p.param_names[j] + ".csv";
        std::ofstream out(path);
        if (!out) throw DataError("cannot write file: " + path);
        out << "iter,value\n";
        out.precision(17);
        for (std::size_t i = 0; i < p.draws[j].size(); ++i)
            out << i << "," << p.draws[j][i] << "\n";
    }
    {
        std::string path = dir + "/h_band.csv";
        std::ofstream out(path);
        if (!out) throw DataError("cannot write file: " + path);
        out << "t,q05,q50,q95\n";
        out.precision(17);
        for (std::size_t t = 0; t < p.h_q05.size(); ++t)
            out << t << "," << p.h_q05[t] << "," << p.h_q50[t] << "," << p.h_q95[t] << "\n";
    }
    {
        std::string path = dir + "/vol_hat.csv";
        std::ofstream out(path);
        if (!out) throw DataError("cannot write file: " + path);
        out << "t,vol\n";
        out.precision(17);
        for (std::size_t t = 0; t < p.vol_hat.size(); ++t) out << t << "," << p.vol_hat[t] << "\n";
    }
    {
        std::string path = dir + "/summary.json";
        std::ofstream out(path);
        if (!out) throw DataError("cannot write file: " + path);
        out << posterior_summary_json(p) << "\n";
    }
}

std::string posterior_summary_json(const SvPosterior& p) {
    nlohmann::json j;
    j["variant"] = variant_name(p.variant);
    j["retained"] = p.n_retained();
    for (const auto& row : posterior_summary(p)) {
        j["params"][row.name] = {
            {"mean", row.mean}, {"sd", row.sd}, {"ci_lo", row.ci_lo}, {"ci_hi", row.ci_hi}};
    }
    for (const auto& d : p.diagnostics) {
        j["diagnostics"][d.name] = {{"geweke_z", d.geweke_z}, {"ess", d.ess}};
    }
    return j.dump(2);
}

double effective_sample_size(const std::vector<double>& chain) {
    std::size_t m = chain.size();
    if (m < 4) return static_cast<double>(m);
    double mean = stats::mean(chain);
    double c0 = 0.0;
    for (double v : chain) c0 += (v - mean) * (v - mean);
    c0 /= static_cast<double>(m);
    if (!(c0 > 0.0)) return static_cast<double>(m);

    auto gamma_at = [&](std::size_t k) {
        double c = 0.0;
        for (std::size_t t = k; t < m; ++t) c += (chain[t] - mean) * (chain[t - k] - mean);
        return c / static_cast<double>(m) / c0;
    };

    // Geyer initial positive sequence on paired autocorrelations
    double tau = -1.0;
    for (std::size_t k = 0; k + 1 < m; k += 2) {
        double pair = gamma_at(k) + gamma_at(k + 1);
        if (pair <= 0.0) break;
        tau += 2.0 * pair;
    }
    tau = std::max(tau, 1e-12);
    double ess = static_cast<double>(m) / tau;
    return std::min(ess, static_cast<double>(m));
}

double geweke_z(const std::vector<double>& chain) {
    std::size_t m = chain.size();
    if (m < 20) return 0.0;
    std::size_t na = std::max<std::size_t>(2, m / 10);
    std::size_t nb = std::max<std::size_t>(2, m / 2);
    std::vector<double> a(chain.begin(), chain.begin() + na);
    std::vector<double> b(chain.end() - nb, chain.end());

    auto seg_var_of_mean = [](const std::vector<double>& seg) {
        double mu = stats::mean(seg);
        double var = 0.0;
        for (double v : seg) var += (v - mu) * (v - mu);
        var /= static_cast<double>(seg.size());
        if (!(var > 0.0)) return 0.0;
        double ess = effective_sample_size(seg);
        return var / std::max(ess, 1.0);
    };

    double va = seg_var_of_mean(a);
    double vb = seg_var_of_mean(b);
    if (va + vb <= 0.0) return 0.0;
    return (stats::mean(a) - stats::mean(b)) / std::sqrt(va + vb);
}

}  // namespace svevt
