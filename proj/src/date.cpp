#include "svevt/date.hpp"

#include <cctype>
#include <cstdio>

#include "svevt/errors.hpp"

namespace svevt {

namespace {

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static const int d[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return d[m - 1];
}

}  // namespace

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

Date Date::parse(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw DataError("bad date '" + s + "' (want YYYY-MM-DD)");
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (!std::isdigit(static_cast<unsigned char>(s[i])))
            throw DataError("bad date '" + s + "' (want YYYY-MM-DD)");
    Date d;
    d.year = std::stoi(s.substr(0, 4));
    d.month = std::stoi(s.substr(5, 2));
    d.day = std::stoi(s.substr(8, 2));
    if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month))
        throw DataError("invalid calendar date '" + s + "'");
    return d;
}

Date Date::next() const {
    Date d = *this;
    if (++d.day > days_in_month(d.year, d.month)) {
        d.day = 1;
        if (++d.month > 12) {
            d.month = 1;
            ++d.year;
        }
    }
    return d;
}

bool strictly_increasing(const std::vector<Date>& dates) {
    for (std::size_t i = 1; i < dates.size(); ++i)
        if (!(dates[i - 1] < dates[i])) return false;
    return true;
}

std::vector<Date> synthetic_dates(std::size_t n, Date start) {
    std::vector<Date> out;
    out.reserve(n);
    Date d = start;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(d);
        d = d.next();
    }
    return out;
}

}  // namespace svevt
