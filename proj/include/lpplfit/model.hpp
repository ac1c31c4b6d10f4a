#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "lpplfit/date.hpp"
#include "lpplfit/series.hpp"

namespace lpplfit {

/// Which quantity the model describes: the price itself or its natural log.
enum class Space { price, log_price };

inline const char* to_string(Space s) { return s == Space::price ? "price" : "log"; }

/// Log-periodic power law: the modeled quantity is
///
///   A - m * (tc - t)^a * (1 + C * cos(w * ln(tc - t) + phi))
///
/// with a power-law trend that reaches the level A at the critical time and
/// an oscillation whose period shrinks geometrically as t -> tc. In
/// log_price space the expression models ln p(t), otherwise p(t) directly.
struct LpplParams {
    double asymptote = 0.0;       // A, the level approached at the critical time
    double trend_scale = 0.0;     // m, magnitude of the power-law trend
    double osc_amplitude = 0.0;   // C, oscillation amplitude relative to the trend; |C| < 1
    double exponent = 0.0;        // power-law exponent
    double log_frequency = 1.0;   // w, radians per log-year; > 0
    double phase = 0.0;           // phi, radians, stored unnormalized
    DecimalYear critical_time{};  // tc
    Space space = Space::price;

    bool operator==(const LpplParams&) const = default;
};

/// Hyperbolic trend with a constant-amplitude log-periodic oscillation:
///
///   scale / (tc1 - t)^exponent + C * cos(w * ln(tc2 - t) + phi)
///
/// The trend and the oscillation carry independent singular times. Unlike
/// the LPPL form, the oscillation amplitude does not decay.
struct HyperOscParams {
    double scale = 1.0;              // trend numerator; trend diverges at tc1
    double exponent = 1.0;           // hyperbola exponent; > 0
    DecimalYear trend_singularity{}; // tc1
    double osc_amplitude = 0.0;      // C, absolute price units
    double log_frequency = 1.0;      // w
    double phase = 0.0;              // phi
    DecimalYear osc_singularity{};   // tc2

    bool operator==(const HyperOscParams&) const = default;
};

/// Reduces a phase to (-pi, pi]. Fits may land anywhere since cos is
/// periodic; comparisons normalize first.
inline double normalize_phase(double phi) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(phi, two_pi);
    if (r <= -std::numbers::pi) r += two_pi;
    return r;
}

/// Per-cycle shrink ratio of the oscillation period, exp(2*pi/w).
inline double scaling_factor(double log_frequency) {
    if (!(log_frequency > 0.0))
        throw std::invalid_argument("scaling_factor: log frequency must be positive");
    return std::exp(2.0 * std::numbers::pi / log_frequency);
}

/// Model value at time t. Throws if t is at or past the critical time:
/// callers (the optimizer in particular) must treat that region as
/// infeasible rather than receive non-finite values.
inline double eval_lppl(const LpplParams& p, DecimalYear t) {
    const double tau = p.critical_time.value - t.value;
    if (!(tau > 0.0))
        throw std::domain_error("eval_lppl: t is at or past the critical time");
    const double pow_term = std::pow(tau, p.exponent);
    const double osc = 1.0 + p.osc_amplitude * std::cos(p.log_frequency * std::log(tau) + p.phase);
    return p.asymptote - p.trend_scale * pow_term * osc;
}

/// Trend component only: scale / (tc1 - t)^exponent.
inline double hyper_trend(const HyperOscParams& p, DecimalYear t) {
    const double tau = p.trend_singularity.value - t.value;
    if (!(tau > 0.0))
        throw std::domain_error("hyper_trend: t is at or past the trend singularity");
    return p.scale / std::pow(tau, p.exponent);
}

inline double eval_hyper_osc(const HyperOscParams& p, DecimalYear t) {
    const double tau2 = p.osc_singularity.value - t.value;
    if (!(tau2 > 0.0))
        throw std::domain_error("eval_hyper_osc: t is at or past the oscillation singularity");
    return hyper_trend(p, t)
           + p.osc_amplitude * std::cos(p.log_frequency * std::log(tau2) + p.phase);
}

/// Per-observation (model - data) over the window, in the model's space:
/// raw price, or ln(price) for log_price. Order matches the series.
inline std::vector<double> residuals(const LpplParams& p, const PriceSeries& series,
                                     DateWindow window) {
    auto sub = slice(series, window.start, window.end);
    std::vector<double> r;
    r.reserve(sub.size());
    for (const auto& o : sub) {
        const double y = p.space == Space::log_price ? std::log(o.price) : o.price;
        r.push_back(eval_lppl(p, to_decimal_year(o.date)) - y);
    }
    return r;
}

inline std::vector<double> residuals(const HyperOscParams& p, const PriceSeries& series,
                                     DateWindow window) {
    auto sub = slice(series, window.start, window.end);
    std::vector<double> r;
    r.reserve(sub.size());
    for (const auto& o : sub)
        r.push_back(eval_hyper_osc(p, to_decimal_year(o.date)) - o.price);
    return r;
}

}  // namespace lpplfit
