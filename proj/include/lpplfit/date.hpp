#pragma once

#include <chrono>
#include <cmath>
#include <compare>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lpplfit {

/// Calendar date (proleptic Gregorian). Thin wrapper over std::chrono's
/// civil-calendar types so serial-day arithmetic is exact.
struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;

    bool valid() const {
        return std::chrono::year_month_day(std::chrono::year(year),
                                           std::chrono::month(month),
                                           std::chrono::day(day)).ok();
    }

    std::chrono::sys_days to_sys_days() const {
        return std::chrono::sys_days(std::chrono::year_month_day(
            std::chrono::year(year), std::chrono::month(month), std::chrono::day(day)));
    }

    static Date from_sys_days(std::chrono::sys_days sd) {
        std::chrono::year_month_day ymd(sd);
        return Date{int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day())};
    }

    std::string to_iso() const {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
        return buf;
    }

    /// Parses "YYYY-MM-DD". Returns nullopt on malformed text or an
    /// impossible calendar date.
    static std::optional<Date> parse_iso(std::string_view s) {
        if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
        auto digits = [](std::string_view v) {
            for (char c : v)
                if (c < '0' || c > '9') return false;
            return true;
        };
        if (!digits(s.substr(0, 4)) || !digits(s.substr(5, 2)) || !digits(s.substr(8, 2)))
            return std::nullopt;
        Date d;
        d.year = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
        d.month = unsigned((s[5] - '0') * 10 + (s[6] - '0'));
        d.day = unsigned((s[8] - '0') * 10 + (s[9] - '0'));
        if (!d.valid()) return std::nullopt;
        return d;
    }
};

inline Date add_days(Date d, long n) {
    return Date::from_sys_days(d.to_sys_days() + std::chrono::days(n));
}

/// b - a in whole days.
inline long days_between(Date a, Date b) {
    return (b.to_sys_days() - a.to_sys_days()).count();
}

inline bool is_leap_year(int year) {
    return year % 4 == 0 && (year % 100 != 0 || year % 400 == 0);
}

inline int days_in_year(int year) { return is_leap_year(year) ? 366 : 365; }

/// 1-based day of year (Jan 1 -> 1).
inline int day_of_year(Date d) {
    return int(days_between(Date{d.year, 1, 1}, d)) + 1;
}

/// Time coordinate in fractional calendar years, e.g. 2011.45. This is the
/// time axis every model is evaluated on.
struct DecimalYear {
    double value = 0.0;
    auto operator<=>(const DecimalYear&) const = default;
};

/// year + (day_of_year - 1) / days_in_year, honoring leap years.
inline DecimalYear to_decimal_year(Date d) {
    return DecimalYear{double(d.year)
                       + double(day_of_year(d) - 1) / double(days_in_year(d.year))};
}

/// Inverse of to_decimal_year by nearest day.
inline Date from_decimal_year(DecimalYear t) {
    if (!std::isfinite(t.value))
        throw std::invalid_argument("from_decimal_year: non-finite decimal year");
    if (t.value < -9999.0 || t.value > 9999.0)
        throw std::invalid_argument("from_decimal_year: year out of range");
    const double base = std::floor(t.value);
    const int year = int(base);
    const double day_offset = (t.value - base) * days_in_year(year);
    return add_days(Date{year, 1, 1}, std::lround(day_offset));
}

inline double years_between(Date a, Date b) {
    return to_decimal_year(b).value - to_decimal_year(a).value;
}

/// Calendar month, used as the resolution of deflator indices.
struct YearMonth {
    int year = 1970;
    unsigned month = 1;

    auto operator<=>(const YearMonth&) const = default;

    static YearMonth of(Date d) { return YearMonth{d.year, d.month}; }

    std::string to_string() const {
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%04d-%02u", year, month);
        return buf;
    }

    /// Parses "YYYY-MM".
    static std::optional<YearMonth> parse(std::string_view s) {
        if (s.size() != 7 || s[4] != '-') return std::nullopt;
        for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
            if (s[i] < '0' || s[i] > '9') return std::nullopt;
        YearMonth ym;
        ym.year = (s[0] - '0') * 1000 + (s[1] - '0') * 100 + (s[2] - '0') * 10 + (s[3] - '0');
        ym.month = unsigned((s[5] - '0') * 10 + (s[6] - '0'));
        if (ym.month < 1 || ym.month > 12) return std::nullopt;
        return ym;
    }
};

/// Inclusive date window used to select fitting data.
struct DateWindow {
    Date start;
    Date end;
};

}  // namespace lpplfit
