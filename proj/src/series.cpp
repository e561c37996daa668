#include "svevt/series.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "svevt/errors.hpp"
#include "svevt/optim.hpp"
#include "svevt/stats.hpp"

namespace svevt {

void PriceSeries::validate() const {
    if (dates.size() != prices.size()) throw DataError("price series: dates/prices length mismatch");
    if (prices.size() < 2) throw DataError("price series needs at least 2 rows");
    if (!strictly_increasing(dates)) throw DataError("price series dates not strictly increasing");
    for (std::size_t i = 0; i < prices.size(); ++i) {
        if (!(prices[i] > 0.0) || !std::isfinite(prices[i]))
            throw DataError("non-positive price at row " + std::to_string(i + 1));
    }
}

void ReturnSeries::validate() const {
    if (dates.size() != returns.size())
        throw DataError("return series: dates/returns length mismatch");
    if (returns.empty()) throw DataError("return series is empty");
    if (!strictly_increasing(dates)) throw DataError("return series dates not strictly increasing");
    for (std::size_t i = 0; i < returns.size(); ++i) {
        if (!std::isfinite(returns[i]))
            throw DataError("non-finite return at row " + std::to_string(i + 1));
    }
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_value(const std::string& field, int row_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(field, &pos);
        if (pos != field.size())
            throw DataError("trailing characters in numeric field on row " +
                            std::to_string(row_no));
        return v;
    } catch (const DataError&) {
        throw;
    } catch (const std::exception&) {
        throw DataError("unparseable numeric field '" + field + "' on row " +
                        std::to_string(row_no));
    }
}

}  // namespace

LoadedSeries load_csv(const std::string& path, CsvSchema schema) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    std::string header = trim(line);
    const std::string want = schema == CsvSchema::Price ? "date,price" : "date,return";
    if (header != want)
        throw DataError("expected header '" + want + "' in " + path + ", got '" + header + "'");

    std::vector<Date> dates;
    std::vector<double> values;
    int row_no = 0;  // 1-based data rows, header excluded
    while (std::getline(in, line)) {
        std::string row = trim(line);
        if (row.empty()) continue;
        ++row_no;
        auto comma = row.find(',');
        if (comma == std::string::npos)
            throw DataError("missing comma on row " + std::to_string(row_no));
        std::string date_field = trim(row.substr(0, comma));
        std::string value_field = trim(row.substr(comma + 1));
        Date d;
        try {
            d = Date::parse(date_field);
        } catch (const DataError& e) {
            throw DataError(std::string(e.what()) + " (row " + std::to_string(row_no) + ")");
        }
        double v = parse_value(value_field, row_no);
        if (schema == CsvSchema::Price && !(v > 0.0))
            throw DataError("non-positive price on row " + std::to_string(row_no));
        dates.push_back(d);
        values.push_back(v);
    }

    if (schema == CsvSchema::Price) {
        PriceSeries p{std::move(dates), std::move(values)};
        p.validate();
        return p;
    }
    ReturnSeries r{std::move(dates), std::move(values), ""};
    r.validate();
    return r;
}

PriceSeries load_price_csv(const std::string& path) {
    return std::get<PriceSeries>(load_csv(path, CsvSchema::Price));
}

ReturnSeries load_return_csv(const std::string& path) {
    return std::get<ReturnSeries>(load_csv(path, CsvSchema::Return));
}

void write_return_csv(const std::string& path, const ReturnSeries& r) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "date,return\n";
    out.precision(15);
    for (std::size_t i = 0; i < r.size(); ++i)
        out << r.dates[i].to_string() << "," << r.returns[i] << "\n";
}

ReturnSeries log_returns(const PriceSeries& p) {
    p.validate();
    ReturnSeries r;
    r.dates.assign(p.dates.begin() + 1, p.dates.end());
    r.returns.resize(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i)
        r.returns[i - 1] = 100.0 * std::log(p.prices[i] / p.prices[i - 1]);
    return r;
}

double ljung_box(const std::vector<double>& x, int m) {
    double n = static_cast<double>(x.size());
    double q = 0.0;
    for (int k = 1; k <= m; ++k) {
        double r = stats::acf(x, static_cast<std::size_t>(k));
        q += r * r / (n - k);
    }
    return n * (n + 2.0) * q;
}

double adf_statistic(const std::vector<double>& x, int k) {
    int n = static_cast<int>(x.size());
    if (n < k + 10) throw NumericError("series too short for ADF with " + std::to_string(k) + " lags");
    std::vector<double> d(n - 1);
    for (int t = 1; t < n; ++t) d[t - 1] = x[t] - x[t - 1];

    // regression dy_t = c + g*y_{t-1} + sum_i delta_i * dy_{t-i} + e_t
    int p = 2 + k;           // number of regressors
    int t0 = k + 1;          // first usable index into d
    int nobs = n - 1 - k;    // rows
    if (nobs <= p) throw NumericError("not enough observations for ADF regression");

    std::vector<std::vector<double>> xtx(p, std::vector<double>(p, 0.0));
    std::vector<double> xty(p, 0.0);
    std::vector<double> row(p);
    std::vector<std::vector<double>> rows;
    std::vector<double> ys;
    rows.reserve(nobs);
    ys.reserve(nobs);
    for (int t = t0; t < n - 1; ++t) {
        row[0] = 1.0;
        row[1] = x[t];  // y_{t-1} for dy at index t, which is x[t+1]-x[t]
        for (int i = 1; i <= k; ++i) row[1 + i] = d[t - i];
        double yv = d[t];
        rows.push_back(row);
        ys.push_back(yv);
        for (int a = 0; a < p; ++a) {
            xty[a] += row[a] * yv;
            for (int b = 0; b < p; ++b) xtx[a][b] += row[a] * row[b];
        }
    }
    std::vector<double> coef = optim::cholesky_solve(xtx, xty);
    double rss = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        double fit = 0.0;
        for (int a = 0; a < p; ++a) fit += coef[a] * rows[i][a];
        double e = ys[i] - fit;
        rss += e * e;
    }
    double s2 = rss / (static_cast<double>(rows.size()) - p);
    auto xtx_inv = optim::spd_inverse(xtx);
    double se = std::sqrt(s2 * xtx_inv[1][1]);
    return coef[1] / se;
}

SummaryStats summary_stats(const ReturnSeries& r, int lb_lags, int adf_lags) {
    r.validate();
    if (r.size() < 20) throw DataError("summary_stats needs at least 20 observations");
    const std::vector<double>& x = r.returns;
    double n = static_cast<double>(x.size());

    SummaryStats s;
    s.mean = stats::mean(x);
    double var = stats::variance(x);
    if (!(var > 0.0)) throw NumericError("zero-variance series: higher moments undefined");
    s.sd = std::sqrt(var);
    s.skewness = stats::skewness(x);
    s.excess_kurtosis = stats::excess_kurtosis(x);
    s.jarque_bera =
        n / 6.0 * (s.skewness * s.skewness + s.excess_kurtosis * s.excess_kurtosis / 4.0);
    s.ljung_box_q = ljung_box(x, lb_lags);
    int k = adf_lags >= 0
                ? adf_lags
                : static_cast<int>(std::floor(12.0 * std::pow(n / 100.0, 0.25)));
    s.adf_stat = adf_statistic(x, k);
    for (std::size_t lag = 1; lag <= 3; ++lag) s.acf[lag - 1] = stats::acf(x, lag);
    return s;
}

std::pair<ReturnSeries, ReturnSeries> split_by_date(const ReturnSeries& r, const Date& train_end,
                                                    std::size_t max_test) {
    r.validate();
    ReturnSeries train, test;
    train.label = "train";
    test.label = "test";
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r.dates[i] <= train_end) {
            train.dates.push_back(r.dates[i]);
            train.returns.push_back(r.returns[i]);
        } else if (max_test == 0 || test.size() < max_test) {
            test.dates.push_back(r.dates[i]);
            test.returns.push_back(r.returns[i]);
        }
    }
    return {std::move(train), std::move(test)};
}

std::string summary_to_json(const SummaryStats& s) {
    nlohmann::json j;
    j["mean"] = s.mean;
    j["sd"] = s.sd;
    j["skewness"] = s.skewness;
    j["excess_kurtosis"] = s.excess_kurtosis;
    j["jarque_bera"] = s.jarque_bera;
    j["ljung_box_q"] = s.ljung_box_q;
    j["adf_stat"] = s.adf_stat;
    j["acf1"] = s.acf[0];
    j["acf2"] = s.acf[1];
    j["acf3"] = s.acf[2];
    return j.dump(2);
}

}  // namespace svevt
