#pragma once

#include <compare>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendrank {

/// Calendar month in UTC. Ordering is chronological.
struct YearMonth {
    int year = 0;
    int month = 1;  // 1..12

    auto operator<=>(const YearMonth&) const = default;

    /// Months since year 0, for distance arithmetic.
    int index() const { return year * 12 + (month - 1); }

    YearMonth next() const {
        return month == 12 ? YearMonth{year + 1, 1} : YearMonth{year, month + 1};
    }

    YearMonth plus(int n) const {
        int i = index() + n;
        return YearMonth{i / 12, i % 12 + 1};
    }

    std::string str() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
        return buf;
    }
};

inline std::optional<YearMonth> try_parse_year_month(const std::string& s) {
    if (s.size() != 7 || s[4] != '-') return std::nullopt;
    for (int i : {0, 1, 2, 3, 5, 6})
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
    int y = std::stoi(s.substr(0, 4));
    int m = std::stoi(s.substr(5, 2));
    if (m < 1 || m > 12) return std::nullopt;
    return YearMonth{y, m};
}

inline YearMonth parse_year_month(const std::string& s) {
    auto ym = try_parse_year_month(s);
    if (!ym) throw std::invalid_argument("bad year-month: " + s);
    return *ym;
}

/// Accepts "YYYY-MM-DDTHH:MM:SSZ" and returns the calendar month; the date
/// itself must be plausible (day 1..31, time fields in range).
inline std::optional<YearMonth> try_parse_timestamp_month(const std::string& s) {
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' ||
        s[13] != ':' || s[16] != ':' || s[19] != 'Z')
        return std::nullopt;
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9, 11, 12, 14, 15, 17, 18})
        if (s[i] < '0' || s[i] > '9') return std::nullopt;
    int mo = std::stoi(s.substr(5, 2));
    int day = std::stoi(s.substr(8, 2));
    int hh = std::stoi(s.substr(11, 2));
    int mm = std::stoi(s.substr(14, 2));
    int ss = std::stoi(s.substr(17, 2));
    if (mo < 1 || mo > 12 || day < 1 || day > 31) return std::nullopt;
    if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    return YearMonth{std::stoi(s.substr(0, 4)), mo};
}

/// Inclusive month range [first, last].
inline std::vector<YearMonth> month_range(YearMonth first, YearMonth last) {
    std::vector<YearMonth> out;
    for (YearMonth m = first; m <= last; m = m.next()) out.push_back(m);
    return out;
}

}  // namespace trendrank
