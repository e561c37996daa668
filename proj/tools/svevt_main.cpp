#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "svevt/backtest.hpp"
#include "svevt/errors.hpp"
#include "svevt/evt.hpp"
#include "svevt/garch.hpp"
#include "svevt/mcmc.hpp"
#include "svevt/series.hpp"
#include "svevt/stats.hpp"
#include "svevt/sv_models.hpp"
#include "svevt/var_engine.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct CommonOpts {
    std::string data;
    std::string schema = "return";
    std::vector<std::string> models;
    std::string out = "svevt_out";
    std::string train_end = "2016-12-30";
    long train_n = -1;
    std::size_t test_len = 1000;
};

svevt::ReturnSeries load_returns(const CommonOpts& c) {
    if (c.schema == "price") return svevt::log_returns(svevt::load_price_csv(c.data));
    if (c.schema == "return") return svevt::load_return_csv(c.data);
    throw svevt::DataError("unknown schema: " + c.schema + " (use price or return)");
}

std::pair<svevt::ReturnSeries, svevt::ReturnSeries> split(const svevt::ReturnSeries& r,
                                                          const CommonOpts& c) {
    if (c.train_n >= 0) {
        if (static_cast<std::size_t>(c.train_n) >= r.size())
            throw svevt::DataError("--train-n leaves no test data");
        svevt::ReturnSeries train, test;
        train.label = "train";
        test.label = "test";
        auto nt = static_cast<std::size_t>(c.train_n);
        train.dates.assign(r.dates.begin(), r.dates.begin() + nt);
        train.returns.assign(r.returns.begin(), r.returns.begin() + nt);
        std::size_t stop = c.test_len > 0 ? std::min(r.size(), nt + c.test_len) : r.size();
        test.dates.assign(r.dates.begin() + nt, r.dates.begin() + stop);
        test.returns.assign(r.returns.begin() + nt, r.returns.begin() + stop);
        return {std::move(train), std::move(test)};
    }
    return svevt::split_by_date(r, svevt::Date::parse(c.train_end), c.test_len);
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw svevt::DataError("cannot write file: " + path);
    out << text;
    if (text.empty() || text.back() != '\n') out << "\n";
}

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw svevt::DataError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool is_sv_tag(const std::string& m) {
    return m == "sv" || m == "svt" || m == "svl" || m == "svtl";
}

// ---- fit ----------------------------------------------------------------

struct FitOpts {
    CommonOpts common;
    std::size_t draws = 20000;
    std::size_t burnin = 2000;
    std::size_t thin = 1;
    std::uint64_t seed = 1;
};

int cmd_fit(const FitOpts& o) {
    svevt::ReturnSeries all = load_returns(o.common);
    auto [train, test] = split(all, o.common);
    (void)test;
    if (train.size() == 0) throw svevt::DataError("empty training window after split");
    fs::create_directories(o.common.out);

    for (const auto& m : o.common.models) {
        if (m == "empirical") continue;  // nothing to fit
        std::string dir = o.common.out + "/" + m;
        if (m == "garch") {
            svevt::GarchFit fit = svevt::fit_garch(train);
            fs::create_directories(dir);
            write_text(dir + "/garch.json", svevt::garch_fit_to_json(fit));
            std::ofstream out(dir + "/sigma2_path.csv");
            out << "t,sigma2\n";
            out.precision(15);
            for (std::size_t t = 0; t < fit.sigma2_path.size(); ++t)
                out << t << "," << fit.sigma2_path[t] << "\n";
            std::cout << "fitted garch: alpha0=" << fit.params.alpha0
                      << " alpha1=" << fit.params.alpha1 << " beta1=" << fit.params.beta1
                      << " nu=" << fit.params.nu << "\n";
        } else if (is_sv_tag(m)) {
            svevt::SvVariant v = svevt::variant_from_name(m);
            svevt::PriorSpec prior;
            svevt::McmcConfig cfg;
            cfg.draws = o.draws;
            cfg.burn_in = o.burnin;
            cfg.thin = o.thin;
            cfg.seed = o.seed;
            svevt::SvPosterior post = svevt::fit_sv(train, v, prior, cfg);
            svevt::export_chain(post, dir);
            std::cout << "fitted " << m << ": ";
            for (const auto& row : svevt::convergence_check(post))
                std::cout << row.name << (row.pass ? " ok " : " FAIL ");
            std::cout << "\n";
        } else {
            throw CLI::ValidationError("--model", "unknown model: " + m);
        }
    }
    return kExitOk;
}

// ---- var ----------------------------------------------------------------

struct VarOpts {
    CommonOpts common;
    double alpha = 0.95;
    std::string threshold = "auto";
    std::size_t particles = 5000;
    std::size_t window = 252;
    std::uint64_t seed = 1;
};

svevt::GpdTailModel fit_loss_tail(const std::vector<double>& z, const std::string& threshold_mode) {
    std::vector<double> losses(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) losses[i] = -z[i];
    svevt::ThresholdMode mode;
    if (threshold_mode == "auto")
        mode = svevt::ThresholdQuantile{0.95};
    else
        mode = svevt::ThresholdFixed{std::stod(threshold_mode)};
    double u = svevt::select_threshold(losses, mode);
    return svevt::fit_gpd(losses, u);
}

int cmd_var(const VarOpts& o) {
    svevt::ReturnSeries all = load_returns(o.common);
    auto [train, test] = split(all, o.common);
    if (train.size() == 0 || test.size() == 0)
        throw svevt::DataError("empty train or test window after split");
    fs::create_directories(o.common.out);
    svevt::write_qq_csv(o.common.out + "/qq_raw.csv", svevt::qq_points(train.returns));

    for (const auto& m : o.common.models) {
        svevt::VarSeries var;
        if (m == "empirical") {
            var = svevt::empirical_var(train, test, o.alpha, o.window);
        } else if (m == "garch" || m == "garch-evt") {
            std::string fit_dir = o.common.out + "/garch";
            std::string fit_path = fit_dir + "/garch.json";
            if (!fs::exists(fit_path))
                throw svevt::DataError("missing fit artifact " + fit_path + "; run fit first");
            json j = json::parse(read_text(fit_path));
            svevt::GarchFit fit;
            fit.params.alpha0 = j["alpha0"]["estimate"].get<double>();
            fit.params.alpha1 = j["alpha1"]["estimate"].get<double>();
            fit.params.beta1 = j["beta1"]["estimate"].get<double>();
            fit.params.nu = j["nu"]["estimate"].get<double>();
            fit.mean = j["mean"].get<double>();
            fit.sigma2_1 = j["sigma2_1"].get<double>();
            svevt::Forecast fore = svevt::garch_forecast(fit, train, test);
            if (m == "garch") {
                double q = svevt::stats::t_ppf(o.alpha, fit.params.nu) *
                           std::sqrt((fit.params.nu - 2.0) / fit.params.nu);
                var = svevt::var_from_quantile(fore, test.dates, q, o.alpha, "garch");
            } else {
                auto [s2_path, s2_next] = svevt::filter_and_forecast(fit, train);
                (void)s2_next;
                std::vector<double> mu_hat(train.size(), fit.mean), sd_hat(train.size());
                for (std::size_t t = 0; t < train.size(); ++t) sd_hat[t] = std::sqrt(s2_path[t]);
                svevt::ResidualSeries res = svevt::standardize(train, mu_hat, sd_hat);
                svevt::write_qq_csv(o.common.out + "/qq_garch.csv", svevt::qq_points(res.z));
                svevt::GpdTailModel tail = fit_loss_tail(res.z, o.threshold);
                var = svevt::dynamic_var(fore, test.dates, tail, o.alpha, "garch-evt");
                write_text(o.common.out + "/tail_garch.json", svevt::gpd_fit_to_json(tail, nullptr));
            }
        } else if (is_sv_tag(m)) {
            std::string dir = o.common.out + "/" + m;
            if (!fs::exists(dir + "/summary.json"))
                throw svevt::DataError("missing fit artifacts in " + dir + "; run fit first");
            json j = json::parse(read_text(dir + "/summary.json"));
            svevt::SvVariant v = svevt::variant_from_name(j["variant"].get<std::string>());
            svevt::SvParams p;
            p.mu = j["params"]["mu"]["mean"].get<double>();
            p.phi = j["params"]["phi"]["mean"].get<double>();
            p.sigma = j["params"]["sigma"]["mean"].get<double>();
            if (svevt::variant_has_t(v)) p.nu = j["params"]["nu"]["mean"].get<double>();
            if (svevt::variant_has_leverage(v)) p.rho = j["params"]["rho"]["mean"].get<double>();
            p.beta = {j["params"]["beta0"]["mean"].get<double>()};

            // standardized residuals from the smoothed volatility path
            std::vector<double> vol_hat;
            {
                std::ifstream in(dir + "/vol_hat.csv");
                if (!in) throw svevt::DataError("missing " + dir + "/vol_hat.csv");
                std::string line;
                std::getline(in, line);
                while (std::getline(in, line)) {
                    auto comma = line.find(',');
                    if (comma == std::string::npos) continue;
                    vol_hat.push_back(std::stod(line.substr(comma + 1)));
                }
            }
            if (vol_hat.size() != train.size())
                throw svevt::DataError("vol_hat length does not match the training window");
            std::vector<double> mu_hat(train.size(), p.beta[0]);
            svevt::ResidualSeries res = svevt::standardize(train, mu_hat, vol_hat);
            svevt::write_qq_csv(o.common.out + "/qq_" + m + ".csv", svevt::qq_points(res.z));
            svevt::GpdTailModel tail = fit_loss_tail(res.z, o.threshold);
            write_text(o.common.out + "/tail_" + m + ".json",
                       svevt::gpd_fit_to_json(tail, nullptr));

            svevt::SvPosterior post;  // carrier for mean params
            post.variant = v;
            post.param_names = {"mu", "phi", "sigma"};
            post.draws = {{p.mu}, {p.phi}, {p.sigma}};
            if (p.nu) {
                post.param_names.push_back("nu");
                post.draws.push_back({*p.nu});
            }
            if (p.rho) {
                post.param_names.push_back("rho");
                post.draws.push_back({*p.rho});
            }
            post.param_names.push_back("beta0");
            post.draws.push_back({p.beta[0]});
            svevt::Forecast fore =
                svevt::sv_forecast(post, train, test, o.particles, o.seed);
            var = svevt::dynamic_var(fore, test.dates, tail, o.alpha, m + "-evt");
        } else {
            throw CLI::ValidationError("--model", "unknown model: " + m);
        }
        std::string tag = var.model_tag;
        svevt::write_var_csv(o.common.out + "/var_" + tag + ".csv", var);
        std::cout << "wrote var_" << tag << ".csv (" << var.var_values.size() << " rows)\n";
    }
    return kExitOk;
}

// ---- backtest -----------------------------------------------------------

struct BacktestOpts {
    CommonOpts common;
    std::string var_dir;
};

int cmd_backtest(const BacktestOpts& o) {
    svevt::ReturnSeries all = load_returns(o.common);
    std::string vdir = o.var_dir.empty() ? o.common.out : o.var_dir;
    std::vector<std::pair<std::string, svevt::VarSeries>> models;
    if (fs::exists(vdir)) {
        for (const auto& entry : fs::directory_iterator(vdir)) {
            std::string name = entry.path().filename().string();
            if (name.rfind("var_", 0) == 0 && entry.path().extension() == ".csv") {
                svevt::VarSeries v = svevt::load_var_csv(entry.path().string());
                models.emplace_back(v.model_tag, std::move(v));
            }
        }
    }
    if (models.empty())
        throw svevt::DataError("no var_*.csv files found in " + vdir + "; run var first");
    std::sort(models.begin(), models.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    // align realized returns with each VaR window
    std::vector<svevt::BacktestReport> reports;
    for (auto& [tag, var] : models) {
        svevt::ReturnSeries realized;
        realized.label = "test";
        std::size_t j = 0;
        for (const auto& d : var.dates) {
            while (j < all.size() && all.dates[j] < d) ++j;
            if (j >= all.size() || !(all.dates[j] == d))
                throw svevt::DataError("VaR date " + d.to_string() + " not present in the data");
            realized.dates.push_back(all.dates[j]);
            realized.returns.push_back(all.returns[j]);
        }
        auto rep = svevt::backtest_report({{tag, var}}, realized);
        reports.push_back(rep.front());
    }

    fs::create_directories(o.common.out);
    svevt::write_report_csv(o.common.out + "/report.csv", reports);
    write_text(o.common.out + "/report.json", svevt::report_to_json(reports));
    std::string text = svevt::report_to_text(reports);
    write_text(o.common.out + "/report.txt", text);
    std::cout << text;
    return kExitOk;
}

// ---- simulate -----------------------------------------------------------

struct SimulateOpts {
    std::string dist = "t";
    double df = 15.0;
    std::size_t n = 2500;
    std::uint64_t seed = 42;
    std::string out = "simulated.csv";
    std::string model = "svtl";
    double mu = -0.56, phi = 0.94, sigma = 0.33, nu = 24.0, rho = -0.61;
    std::string path_out;
};

int cmd_simulate(const SimulateOpts& o) {
    if (o.dist == "t") {
        svevt::ReturnSeries r = svevt::simulate_student_t_returns(o.n, o.df, o.seed);
        svevt::write_return_csv(o.out, r);
    } else if (o.dist == "sv") {
        svevt::SvVariant v = svevt::variant_from_name(o.model);
        svevt::SvParams p;
        p.mu = o.mu;
        p.phi = o.phi;
        p.sigma = o.sigma;
        if (svevt::variant_has_t(v)) p.nu = o.nu;
        if (svevt::variant_has_leverage(v)) p.rho = o.rho;
        svevt::SvPath path = svevt::simulate(v, p, o.n, nullptr, o.seed);
        svevt::ReturnSeries r;
        r.dates = svevt::synthetic_dates(o.n);
        r.returns = path.y;
        r.label = "simulated-" + o.model;
        svevt::write_return_csv(o.out, r);
        if (!o.path_out.empty()) svevt::write_path_csv(o.path_out, path);
    } else {
        throw CLI::ValidationError("--dist", "unknown distribution: " + o.dist);
    }
    std::cout << "wrote " << o.out << " (" << o.n << " rows)\n";
    return kExitOk;
}

// ---- summary ------------------------------------------------------------

struct SummaryOpts {
    CommonOpts common;
    int lb_lags = 5;
    int adf_lags = -1;
    std::string out;
    bool train_only = false;
};

int cmd_summary(const SummaryOpts& o) {
    svevt::ReturnSeries r = load_returns(o.common);
    if (o.train_only) {
        auto [train, test] = split(r, o.common);
        (void)test;
        r = train;
    }
    svevt::SummaryStats s = svevt::summary_stats(r, o.lb_lags, o.adf_lags);
    std::string text = svevt::summary_to_json(s);
    if (!o.out.empty())
        write_text(o.out, text);
    else
        std::cout << text << "\n";
    return kExitOk;
}

void add_common(CLI::App* cmd, CommonOpts& c, const std::vector<std::string>& allowed_models,
                bool with_out = true) {
    cmd->add_option("--data", c.data, "input CSV path")->required();
    cmd->add_option("--schema", c.schema, "CSV schema: price or return");
    if (!allowed_models.empty()) {
        std::string help = "model tags (";
        for (std::size_t i = 0; i < allowed_models.size(); ++i)
            help += (i ? ", " : "") + allowed_models[i];
        help += ")";
        cmd->add_option("--model", c.models, help)
            ->required()
            ->delimiter(',')
            ->check(CLI::IsMember(allowed_models));
    }
    if (with_out) cmd->add_option("--out", c.out, "output directory");
    cmd->add_option("--train-end", c.train_end, "last training date (YYYY-MM-DD)");
    cmd->add_option("--train-n", c.train_n, "train on the first N observations instead");
    cmd->add_option("--test-len", c.test_len, "cap on test-window length (0 = rest)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic-volatility EVT VaR toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "key=value config file; flags override");

    FitOpts fo;
    CLI::App* fit = app.add_subcommand("fit", "estimate models on the training window");
    fit->configurable();
    add_common(fit, fo.common, {"sv", "svt", "svl", "svtl", "garch", "empirical"});
    fit->add_option("--draws", fo.draws, "retained MCMC draws");
    fit->add_option("--burnin", fo.burnin, "burn-in sweeps");
    fit->add_option("--thin", fo.thin, "thinning interval");
    fit->add_option("--seed", fo.seed, "RNG seed");

    VarOpts vo;
    CLI::App* var = app.add_subcommand("var", "one-day-ahead VaR over the test window");
    var->configurable();
    add_common(var, vo.common,
               {"sv", "svt", "svl", "svtl", "garch", "garch-evt", "empirical"});
    var->add_option("--alpha", vo.alpha, "VaR confidence level");
    var->add_option("--threshold", vo.threshold, "auto or a fixed residual-loss threshold");
    var->add_option("--particles", vo.particles, "particle count for SV forecasting");
    var->add_option("--window", vo.window, "empirical rolling window");
    var->add_option("--seed", vo.seed, "RNG seed");

    BacktestOpts bo;
    CLI::App* bt = app.add_subcommand("backtest", "coverage tests for saved VaR series");
    bt->configurable();
    add_common(bt, bo.common, {});
    bt->add_option("--var-dir", bo.var_dir, "directory with var_*.csv (default --out)");

    SimulateOpts so;
    CLI::App* sim = app.add_subcommand("simulate", "draw synthetic return data");
    sim->configurable();
    sim->add_option("--dist", so.dist, "t or sv");
    sim->add_option("--df", so.df, "degrees of freedom for --dist t");
    sim->add_option("--n", so.n, "number of observations");
    sim->add_option("--seed", so.seed, "RNG seed");
    sim->add_option("--out", so.out, "output CSV");
    sim->add_option("--model", so.model, "SV variant for --dist sv");
    sim->add_option("--mu", so.mu, "SV mu");
    sim->add_option("--phi", so.phi, "SV phi");
    sim->add_option("--sigma", so.sigma, "SV sigma");
    sim->add_option("--nu", so.nu, "SV nu");
    sim->add_option("--rho", so.rho, "SV rho");
    sim->add_option("--path-out", so.path_out, "also write the latent path CSV");

    SummaryOpts suo;
    CLI::App* sum = app.add_subcommand("summary", "summary statistics of a return series");
    sum->configurable();
    add_common(sum, suo.common, {}, false);
    sum->add_option("--out", suo.out, "write the JSON here instead of stdout");
    sum->add_option("--lb-lags", suo.lb_lags, "Ljung-Box lag count");
    sum->add_option("--adf-lags", suo.adf_lags, "ADF lag order (-1 = default rule)");
    sum->add_flag("--train-only", suo.train_only, "restrict to the training window");

    try {
        app.parse(argc, argv);
        if (fit->parsed()) return cmd_fit(fo);
        if (var->parsed()) return cmd_var(vo);
        if (bt->parsed()) return cmd_backtest(bo);
        if (sim->parsed()) return cmd_simulate(so);
        if (sum->parsed()) return cmd_summary(suo);
        std::cerr << app.help();
        return kExitUsage;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const svevt::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const svevt::NumericError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
