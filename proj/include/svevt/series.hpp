#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "svevt/date.hpp"

namespace svevt {

struct PriceSeries {
    std::vector<Date> dates;
    std::vector<double> prices;

    std::size_t size() const { return prices.size(); }
    // throws DataError on non-monotone dates, non-positive prices, length < 2
    void validate() const;
};

struct ReturnSeries {
    std::vector<Date> dates;
    std::vector<double> returns;
    std::string label;

    std::size_t size() const { return returns.size(); }
    void validate() const;
};

struct SummaryStats {
    double mean = 0.0;
    double sd = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    double jarque_bera = 0.0;
    double ljung_box_q = 0.0;
    double adf_stat = 0.0;
    std::array<double, 3> acf{};  // lags 1..3
};

enum class CsvSchema { Price, Return };

using LoadedSeries = std::variant<PriceSeries, ReturnSeries>;

// Header must match the declared schema (`date,price` or `date,return`).
// Errors name the offending 1-based file line.
LoadedSeries load_csv(const std::string& path, CsvSchema schema);
PriceSeries load_price_csv(const std::string& path);
ReturnSeries load_return_csv(const std::string& path);

void write_return_csv(const std::string& path, const ReturnSeries& r);

// returns[t] = 100 * ln(p[t+1] / p[t])
ReturnSeries log_returns(const PriceSeries& p);

// adf_lags < 0 selects the default floor(12 * (n/100)^0.25)
SummaryStats summary_stats(const ReturnSeries& r, int lb_lags = 5, int adf_lags = -1);

// Ljung-Box Q over lags 1..m
double ljung_box(const std::vector<double>& x, int m);

// Augmented Dickey-Fuller t statistic, constant-only regression with k lagged
// differences.
double adf_statistic(const std::vector<double>& x, int k);

// train = dates <= train_end; test = the rest, capped at max_test points when
// max_test > 0.
std::pair<ReturnSeries, ReturnSeries> split_by_date(const ReturnSeries& r, const Date& train_end,
                                                    std::size_t max_test = 0);

std::string summary_to_json(const SummaryStats& s);

}  // namespace svevt
