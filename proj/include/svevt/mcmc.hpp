#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "svevt/sv_models.hpp"

namespace svevt {

struct PriorSpec {
    double mu_mean = 0.0;
    double mu_var = 100.0;
    double phi_a = 5.0;   // (phi+1)/2 ~ Beta(a, b)
    double phi_b = 1.5;
    double sigma2_shape = 0.5;  // sigma^2 ~ Gamma(shape, rate)
    double sigma2_rate = 0.5;
    double nu_rate = 0.1;  // nu - 2 ~ Exponential(rate)
    double rho_a = 4.0;    // (rho+1)/2 ~ Beta(a, b)
    double rho_b = 4.0;
    double beta_mean = 0.0;
    double beta_var = 10000.0;

    void validate() const;
};

struct McmcConfig {
    std::size_t draws = 20000;  // retained draws after burn-in and thinning
    std::size_t burn_in = 2000;
    std::size_t thin = 1;
    // latent sweeps per parameter update; single-site h moves relax over
    // O((1-phi)^-2) sweeps, so extra inner sweeps cut chain autocorrelation
    std::size_t latent_sweeps = 10;
    std::uint64_t seed = 1;
    std::optional<double> fixed_rho;  // pin rho (skip its update)
    std::optional<double> fixed_nu;   // pin nu

    void validate() const;
};

struct ParamDiagnostic {
    std::string name;
    double geweke_z = 0.0;
    double ess = 0.0;
};

struct SvPosterior {
    SvVariant variant = SvVariant::Vanilla;
    std::vector<std::string> param_names;
    std::vector<std::vector<double>> draws;  // draws[param][iteration]
    std::vector<double> h_q05, h_q50, h_q95;
    std::vector<double> vol_hat;  // posterior mean of exp(h_t/2)
    std::vector<ParamDiagnostic> diagnostics;
    McmcConfig config;
    std::vector<Date> dates;

    std::size_t n_retained() const { return draws.empty() ? 0 : draws.front().size(); }
    std::size_t index_of(const std::string& name) const;  // throws DataError
    double posterior_mean(const std::string& name) const;
    SvParams mean_params() const;
};

struct SummaryRow {
    std::string name;
    double mean = 0.0;
    double sd = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

struct ConvergenceRow {
    std::string name;
    double z = 0.0;
    double ess = 0.0;
    bool pass = false;
};

// Cyclic MCMC over (phi, (sigma, rho), mu, beta, nu, lambda, h). Deterministic
// given (data, prior, config, seed).
SvPosterior fit_sv(const ReturnSeries& y, SvVariant v, const PriorSpec& prior,
                   const McmcConfig& cfg, const Matrix* x = nullptr);

// per-parameter mean / sd / equal-tailed 95% CI, plus exp(mu/2) and sigma^2
// computed draw by draw
std::vector<SummaryRow> posterior_summary(const SvPosterior& p);

std::vector<ConvergenceRow> convergence_check(const SvPosterior& p, double z_threshold = 1.96);

// writes trace_<param>.csv, h_band.csv, vol_hat.csv, summary.json under dir
void export_chain(const SvPosterior& p, const std::string& dir);

std::string posterior_summary_json(const SvPosterior& p);

// Geweke z of first 10% vs last 50%, long-run variances via the initial
// positive sequence ESS of each segment.
double geweke_z(const std::vector<double>& chain);
double effective_sample_size(const std::vector<double>& chain);

}  // namespace svevt
