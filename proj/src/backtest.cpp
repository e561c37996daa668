#include "svevt/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svevt/errors.hpp"
#include "svevt/stats.hpp"

namespace svevt {

namespace {

// 0 * ln 0 = 0 convention for all likelihood cells
double xlogy(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log(y);
}

void tally(HitSequence& h) {
    h.J = h.hits.size();
    h.T1 = 0;
    for (int v : h.hits) h.T1 += static_cast<std::size_t>(v);
    h.T0 = h.J - h.T1;
    h.n00 = h.n01 = h.n10 = h.n11 = 0;
    for (std::size_t t = 1; t < h.J; ++t) {
        int a = h.hits[t - 1], b = h.hits[t];
        if (a == 0 && b == 0) ++h.n00;
        else if (a == 0 && b == 1) ++h.n01;
        else if (a == 1 && b == 0) ++h.n10;
        else ++h.n11;
    }
}

}  // namespace

HitSequence hit_sequence(const ReturnSeries& returns, const VarSeries& var) {
    returns.validate();
    if (returns.size() != var.var_values.size())
        throw DataError("hit_sequence: return/VaR length mismatch");
    if (returns.dates != var.dates) throw DataError("hit_sequence: misaligned dates");
    HitSequence h;
    h.p = 1.0 - var.alpha;
    h.hits.resize(returns.size());
    for (std::size_t t = 0; t < returns.size(); ++t)
        h.hits[t] = returns.returns[t] < -var.var_values[t] ? 1 : 0;
    tally(h);
    return h;
}

HitSequence hit_sequence_from_hits(const std::vector<int>& hits, double p) {
    if (hits.empty()) throw DataError("empty hit sequence");
    for (int v : hits)
        if (v != 0 && v != 1) throw DataError("hit sequence must be binary");
    HitSequence h;
    h.hits = hits;
    h.p = p;
    tally(h);
    return h;
}

BinomialResult binomial_test(const HitSequence& h, double beta_level) {
    if (h.J < 30) throw DataError("binomial_test needs J >= 30");
    double J = static_cast<double>(h.J);
    double p = h.p;
    BinomialResult r;
    r.z = (static_cast<double>(h.T1) - J * p) / std::sqrt(J * p * (1.0 - p));
    double zq = stats::norm_ppf(1.0 - beta_level / 2.0);
    double half = zq * std::sqrt(J * p * (1.0 - p));
    r.tau_lo = J * p - half;
    r.tau_hi = J * p + half;
    r.ci_lo = static_cast<long>(std::ceil(r.tau_lo));
    r.ci_hi = static_cast<long>(std::floor(r.tau_hi));
    long t1 = static_cast<long>(h.T1);
    r.pass = t1 >= r.ci_lo && t1 <= r.ci_hi;
    return r;
}

LrResult kupiec_uc(const HitSequence& h) {
    if (h.J < 30) throw DataError("kupiec_uc needs J >= 30");
    double t0 = static_cast<double>(h.T0), t1 = static_cast<double>(h.T1);
    double pihat = t1 / static_cast<double>(h.J);
    double lnull = xlogy(t0, 1.0 - h.p) + xlogy(t1, h.p);
    double lalt = xlogy(t0, 1.0 - pihat) + xlogy(t1, pihat);
    LrResult r;
    r.lr = std::max(0.0, -2.0 * (lnull - lalt));
    r.reject = r.lr > stats::kChi2Crit1Df5Pct;
    return r;
}

LrResult christoffersen_ind(const HitSequence& h) {
    if (h.J < 30) throw DataError("christoffersen_ind needs J >= 30");
    double n00 = static_cast<double>(h.n00), n01 = static_cast<double>(h.n01);
    double n10 = static_cast<double>(h.n10), n11 = static_cast<double>(h.n11);
    double pi01 = n00 + n01 > 0.0 ? n01 / (n00 + n01) : 0.0;
    double pi11 = n10 + n11 > 0.0 ? n11 / (n10 + n11) : 0.0;
    double pi = (n01 + n11) / (n00 + n01 + n10 + n11);
    double l0 = xlogy(n00 + n10, 1.0 - pi) + xlogy(n01 + n11, pi);
    double l1 = xlogy(n00, 1.0 - pi01) + xlogy(n01, pi01) + xlogy(n10, 1.0 - pi11) +
                xlogy(n11, pi11);
    LrResult r;
    r.lr = std::max(0.0, -2.0 * (l0 - l1));
    r.reject = r.lr > stats::kChi2Crit1Df5Pct;
    return r;
}

LrResult conditional_cc(const HitSequence& h) {
    LrResult r;
    r.lr = kupiec_uc(h).lr + christoffersen_ind(h).lr;
    r.reject = r.lr > stats::kChi2Crit2Df5Pct;
    return r;
}

std::vector<BacktestReport> backtest_report(
    const std::vector<std::pair<std::string, VarSeries>>& models, const ReturnSeries& returns) {
    if (models.empty()) throw DataError("backtest_report needs at least one model");
    if (returns.size() == 0) throw DataError("backtest_report: empty test set");
    std::vector<BacktestReport> out;
    for (const auto& [tag, var] : models) {
        HitSequence h = hit_sequence(returns, var);
        BacktestReport rep;
        rep.model_tag = tag;
        rep.exceedance = h.T1;
        rep.binomial = binomial_test(h);
        LrResult uc = kupiec_uc(h);
        LrResult ind = christoffersen_ind(h);
        LrResult cc = conditional_cc(h);
        rep.lr_uc = uc.lr;
        rep.uc_reject = uc.reject;
        rep.lr_ind = ind.lr;
        rep.ind_reject = ind.reject;
        rep.lr_cc = cc.lr;
        rep.cc_reject = cc.reject;
        out.push_back(rep);
    }
    return out;
}

void write_report_csv(const std::string& path, const std::vector<BacktestReport>& reports) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "model,exceedance,ci_lo,ci_hi,binomial_pass,lr_uc,uc_reject,lr_ind,ind_reject,"
           "lr_cc,cc_reject\n";
    out.precision(15);
    for (const auto& r : reports) {
        out << r.model_tag << "," << r.exceedance << "," << r.binomial.ci_lo << ","
            << r.binomial.ci_hi << "," << (r.binomial.pass ? 1 : 0) << "," << r.lr_uc << ","
            << (r.uc_reject ? 1 : 0) << "," << r.lr_ind << "," << (r.ind_reject ? 1 : 0) << ","
            << r.lr_cc << "," << (r.cc_reject ? 1 : 0) << "\n";
    }
}

std::string report_to_json(const std::vector<BacktestReport>& reports) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) {
        j.push_back({{"model", r.model_tag},
                     {"exceedance", r.exceedance},
                     {"z", r.binomial.z},
                     {"tau_lo", r.binomial.tau_lo},
                     {"tau_hi", r.binomial.tau_hi},
                     {"ci_lo", r.binomial.ci_lo},
                     {"ci_hi", r.binomial.ci_hi},
                     {"binomial_pass", r.binomial.pass},
                     {"lr_uc", r.lr_uc},
                     {"uc_reject", r.uc_reject},
                     {"lr_ind", r.lr_ind},
                     {"ind_reject", r.ind_reject},
                     {"lr_cc", r.lr_cc},
                     {"cc_reject", r.cc_reject}});
    }
    return j.dump(2);
}

std::vector<BacktestReport> report_from_json(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    std::vector<BacktestReport> out;
    for (const auto& item : j) {
        BacktestReport r;
        r.model_tag = item.at("model").get<std::string>();
        r.exceedance = item.at("exceedance").get<std::size_t>();
        r.binomial.z = item.at("z").get<double>();
        r.binomial.tau_lo = item.at("tau_lo").get<double>();
        r.binomial.tau_hi = item.at("tau_hi").get<double>();
        r.binomial.ci_lo = item.at("ci_lo").get<long>();
        r.binomial.ci_hi = item.at("ci_hi").get<long>();
        r.binomial.pass = item.at("binomial_pass").get<bool>();
        r.lr_uc = item.at("lr_uc").get<double>();
        r.uc_reject = item.at("uc_reject").get<bool>();
        r.lr_ind = item.at("lr_ind").get<double>();
        r.ind_reject = item.at("ind_reject").get<bool>();
        r.lr_cc = item.at("lr_cc").get<double>();
        r.cc_reject = item.at("cc_reject").get<bool>();
        out.push_back(r);
    }
    return out;
}

std::string report_to_text(const std::vector<BacktestReport>& reports) {
    std::ostringstream os;
    os.precision(3);
    os << std::fixed;
    os << "model        exceed  CI           binomial  LR_uc      LR_ind     LR_cc\n";
    for (const auto& r : reports) {
        auto mark = [](double v, bool rej) {
            std::ostringstream s;
            s.precision(3);
            s << std::fixed << v << (rej ? "**" : "");
            return s.str();
        };
        os << r.model_tag;
        for (std::size_t i = r.model_tag.size(); i < 13; ++i) os << ' ';
        os << r.exceedance << "\t[" << r.binomial.ci_lo << "," << r.binomial.ci_hi << "]\t"
           << (r.binomial.pass ? "pass" : "fail") << "\t" << mark(r.lr_uc, r.uc_reject) << "\t"
           << mark(r.lr_ind, r.ind_reject) << "\t" << mark(r.lr_cc, r.cc_reject) << "\n";
    }
    os << "(** rejected at the 5% level; LR_uc/LR_ind vs chi2(1)=3.841, LR_cc vs chi2(2)=5.991)\n";
    return os.str();
}

}  // namespace svevt
