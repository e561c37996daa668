#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "svevt/series.hpp"
#include "svevt/var_engine.hpp"

namespace svevt {

struct HitSequence {
    std::vector<int> hits;
    std::size_t J = 0;
    double p = 0.05;  // VaR level 1 - alpha
    std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
    std::size_t T0 = 0, T1 = 0;
};

struct BinomialResult {
    double z = 0.0;
    double tau_lo = 0.0;  // real-valued CI endpoints
    double tau_hi = 0.0;
    long ci_lo = 0;  // integer CI, endpoints rounded inward
    long ci_hi = 0;
    bool pass = false;
};

struct LrResult {
    double lr = 0.0;
    bool reject = false;
};

struct BacktestReport {
    std::string model_tag;
    std::size_t exceedance = 0;
    BinomialResult binomial;
    double lr_uc = 0.0, lr_ind = 0.0, lr_cc = 0.0;
    bool uc_reject = false, ind_reject = false, cc_reject = false;
};

// hit_t = 1 iff R_t < -VaR_t
HitSequence hit_sequence(const ReturnSeries& returns, const VarSeries& var);

// hit sequence from a raw binary vector (tests and calibration)
HitSequence hit_sequence_from_hits(const std::vector<int>& hits, double p);

// two-sided binomial z test with CI tau = J(1-alpha) +/- z_{1-beta/2} sqrt(J alpha (1-alpha))
BinomialResult binomial_test(const HitSequence& h, double beta_level = 0.05);

LrResult kupiec_uc(const HitSequence& h);
LrResult christoffersen_ind(const HitSequence& h);
LrResult conditional_cc(const HitSequence& h);

std::vector<BacktestReport> backtest_report(
    const std::vector<std::pair<std::string, VarSeries>>& models, const ReturnSeries& returns);

void write_report_csv(const std::string& path, const std::vector<BacktestReport>& reports);
std::string report_to_json(const std::vector<BacktestReport>& reports);
std::vector<BacktestReport> report_from_json(const std::string& json_text);
std::string report_to_text(const std::vector<BacktestReport>& reports);

}  // namespace svevt
