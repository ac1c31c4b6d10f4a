#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

#include "lpplfit/date.hpp"
#include "lpplfit/model.hpp"
#include "lpplfit/series.hpp"
#include "lpplfit/text.hpp"

namespace lpplfit {

/// Mean Gregorian month. The empirical crash lead is quoted in months.
inline constexpr double kDaysPerMonth = 30.44;

/// Default lead between the critical time and the observed start of the
/// collapse.
inline constexpr double kDefaultLeadMonths = 1.4;

struct DecimalYearRange {
    DecimalYear low{}, high{};
};

struct DateRange {
    Date start, end;
};

struct PriceRange {
    double low = 0.0, high = 0.0;
};

/// Converts a critical-time range into a calendar crash window: each bound
/// becomes a date, is shifted earlier by lead_months mean months, and is
/// rounded to the nearest day.
inline DateRange crash_window(DecimalYearRange tc_range, double lead_months = kDefaultLeadMonths) {
    if (!(lead_months >= 0.0))
        throw std::invalid_argument("crash_window: lead_months must be >= 0");
    if (!std::isfinite(tc_range.low.value) || !std::isfinite(tc_range.high.value)
        || tc_range.high < tc_range.low)
        throw std::invalid_argument("crash_window: inverted or non-finite range");
    auto shift = [&](DecimalYear tc) {
        const Date d = from_decimal_year(tc);
        const double serial = double(d.to_sys_days().time_since_epoch().count())
                              - lead_months * kDaysPerMonth;
        return Date::from_sys_days(
            std::chrono::sys_days(std::chrono::days(std::llround(serial))));
    };
    return {shift(tc_range.low), shift(tc_range.high)};
}

/// Fitted model value at the crash time (price space for LPPL fits in
/// price space; callers exponentiate for log-space fits).
inline double price_at_crash(const LpplParams& params, DecimalYear crash_time) {
    const double value = eval_lppl(params, crash_time);
    return params.space == Space::log_price ? std::exp(value) : value;
}

inline double price_at_crash(const HyperOscParams& params, DecimalYear crash_time) {
    return eval_hyper_osc(params, crash_time);
}

/// Price range spanned by trailing asymptote estimates of a rolling sweep.
inline PriceRange a_based_range(std::span<const double> asymptotes) {
    if (asymptotes.empty())
        throw std::invalid_argument("a_based_range: no estimates");
    PriceRange range{asymptotes[0], asymptotes[0]};
    for (double a : asymptotes) {
        range.low = std::min(range.low, a);
        range.high = std::max(range.high, a);
    }
    return range;
}

/// Inverse of deflation for a single price: real * index(period) / index(base).
inline double nominal_from_real(double real_price, const DeflatorSeries& deflator,
                                YearMonth period) {
    auto idx = deflator.index_for(period);
    if (!idx)
        throw std::invalid_argument("nominal_from_real: period " + period.to_string()
                                    + " not covered by deflator");
    return real_price * (*idx / deflator.base_index());
}

/// Complete crash forecast: the critical-time range is always reported
/// alongside the shifted calendar window, never the window alone.
struct CrashForecast {
    DecimalYearRange tc_range;
    DateRange window;
    double lead_months = kDefaultLeadMonths;
    PriceRange real_prices;     // in the fit's (deflated) price units
    PriceRange nominal_prices;  // converted back to current prices when a deflator is given
    std::string method;         // "lppl" | "hyper_osc"
    std::string inputs_digest;  // provenance hash of series + config
};

/// FNV-1a over bytes; stable across runs and platforms, used for the
/// inputs_digest provenance field.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ull) {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Digest of the exact observations, basis, and the effective config text.
inline std::string inputs_digest(const PriceSeries& series, std::string_view config_text) {
    std::uint64_t h = fnv1a(config_text);
    h = fnv1a(series.basis().is_real() ? "real:" + series.basis().base_period : "nominal",
              h);
    for (const auto& o : series) {
        h = fnv1a(o.date.to_iso(), h);
        h = fnv1a(format_double(o.price), h);
    }
    return to_hex(h);
}

}  // namespace lpplfit
