#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace svevt {

// Calendar date, ISO-8601 in and out. Ordering is lexicographic on (y, m, d).
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    auto operator<=>(const Date&) const = default;

    std::string to_string() const;

    // Parses strict "YYYY-MM-DD"; throws DataError otherwise.
    static Date parse(const std::string& s);

    // Next calendar day (Gregorian).
    Date next() const;
};

bool strictly_increasing(const std::vector<Date>& dates);

// Synthetic consecutive dates for simulated series.
std::vector<Date> synthetic_dates(std::size_t n, Date start = {2000, 1, 3});

}  // namespace svevt
