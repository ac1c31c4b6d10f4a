#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpplfit/csv.hpp"
#include "lpplfit/fit.hpp"
#include "lpplfit/text.hpp"

namespace lpplfit {

/// Days per year used to express critical-time dispersions in days.
inline constexpr double kDaysPerYear = 365.25;

struct RollingPoint {
    Date end_date;
    DecimalYear critical_time{};
    double asymptote = 0.0;
    double sse = 0.0;
    bool converged = false;

    bool operator==(const RollingPoint&) const = default;
};

/// Critical-time and asymptote curves under a sweep of end-of-observation
/// dates with a fixed window start.
struct RollingCurve {
    std::vector<RollingPoint> points;
    Date window_start;
    FitConfig config;  // snapshot of the per-end fit settings
};

struct RollOptions {
    /// Feeds each end date's optimum to the next as an extra refinement
    /// start. The grid search still runs, so this can only improve SSE;
    /// results may differ from cold start within fit tolerance.
    bool warm_start = false;
};

/// One fit_lppl per end date over [window_start, end]. Non-converged fits
/// are recorded, not dropped.
inline RollingCurve roll(const PriceSeries& series, Date window_start,
                         std::span<const Date> end_dates, const FitConfig& config,
                         RollOptions options = {}) {
    if (end_dates.empty())
        throw std::invalid_argument("roll: no end dates");
    for (std::size_t i = 1; i < end_dates.size(); ++i)
        if (!(end_dates[i - 1] < end_dates[i]))
            throw std::invalid_argument("roll: end dates must be strictly increasing");

    RollingCurve curve;
    curve.window_start = window_start;
    curve.config = config;
    curve.points.reserve(end_dates.size());

    std::optional<LpplParams> previous;
    for (const Date& end : end_dates) {
        FitResult fit = fit_lppl(series, {window_start, end}, config);
        if (options.warm_start && previous) {
            // The previous optimum enters as one more refinement start;
            // the grid search above still ran, so this only improves SSE.
            try {
                FitResult warm = refine_lppl_from(series, {window_start, end}, config, *previous);
                if (warm.sse < fit.sse) fit = warm;
            } catch (const std::runtime_error&) {
                // previous optimum infeasible for this window; keep the grid fit
            }
        }
        curve.points.push_back({end, fit.params.critical_time, fit.params.asymptote, fit.sse,
                                fit.converged});
        previous = fit.params;
    }
    return curve;
}

struct StabilizationConfig {
    double dispersion_threshold_days = 14.0;
    std::size_t span = 8;  // trailing points that must agree
};

struct StabilizationReport {
    bool stabilized = false;
    std::optional<Date> onset;  // earliest end date from which tc stays in band
    double trailing_dispersion_days = 0.0;   // peak-to-peak of the last `span` tc values
    double asymptote_dispersion = 0.0;       // same for the asymptote curve, price units
    double lead_low_months = 1.0;            // empirical interval between tc and the
    double lead_high_months = 1.5;           // actual growth-cessation once stabilized
};

/// The curve has stabilized when the last `span` critical-time values sit
/// within a band of `dispersion_threshold_days`. The onset is the earliest
/// end date from which every later value stays within the band through the
/// end of the sweep.
inline StabilizationReport detect_stabilization(const RollingCurve& curve,
                                                const StabilizationConfig& config = {}) {
    const auto& pts = curve.points;
    if (pts.size() < config.span || config.span < 2)
        throw std::invalid_argument("detect_stabilization: need at least span >= 2 points");

    auto ptp_days = [&](std::size_t from, auto&& get) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t i = from; i < pts.size(); ++i) {
            lo = std::min(lo, get(pts[i]));
            hi = std::max(hi, get(pts[i]));
        }
        return hi - lo;
    };
    auto tc_of = [](const RollingPoint& p) { return p.critical_time.value; };
    auto a_of = [](const RollingPoint& p) { return p.asymptote; };

    StabilizationReport report;
    report.trailing_dispersion_days = ptp_days(pts.size() - config.span, tc_of) * kDaysPerYear;
    report.asymptote_dispersion = ptp_days(pts.size() - config.span, a_of);
    report.stabilized = report.trailing_dispersion_days <= config.dispersion_threshold_days;
    if (report.stabilized) {
        std::size_t onset = pts.size() - config.span;
        while (onset > 0
               && ptp_days(onset - 1, tc_of) * kDaysPerYear <= config.dispersion_threshold_days)
            --onset;
        report.onset = pts[onset].end_date;
    }
    return report;
}

enum class ExtrapolationMethod { last_value, exp_approach, linear_fixed_point };

inline const char* to_string(ExtrapolationMethod m) {
    switch (m) {
        case ExtrapolationMethod::last_value: return "last_value";
        case ExtrapolationMethod::exp_approach: return "exp_approach";
        case ExtrapolationMethod::linear_fixed_point: return "linear";
    }
    return "?";
}

struct MethodEstimate {
    ExtrapolationMethod method{};
    bool ok = false;
    DecimalYear estimate{};
    std::string message;
};

struct ExtrapolationConfig {
    std::vector<ExtrapolationMethod> methods{ExtrapolationMethod::last_value,
                                             ExtrapolationMethod::exp_approach,
                                             ExtrapolationMethod::linear_fixed_point};
    std::size_t span = 8;           // points used by the linear method
    std::size_t min_converged = 8;  // required converged points in the curve
};

struct ExtrapolationResult {
    std::vector<MethodEstimate> methods;
    DecimalYear low{}, high{};
    Date low_date, high_date;
};

/// Projects the critical-time curve to its finite limit. All methods act
/// on the trailing converged segment; a method that cannot produce an
/// estimate is reported as failed without failing the operation.
inline ExtrapolationResult extrapolate(const RollingCurve& curve,
                                       const ExtrapolationConfig& config = {}) {
    std::size_t n_converged = 0;
    for (const auto& p : curve.points) n_converged += p.converged ? 1 : 0;
    if (n_converged < config.min_converged)
        throw std::invalid_argument("extrapolate: only " + std::to_string(n_converged)
                                    + " converged points, need "
                                    + std::to_string(config.min_converged));

    std::size_t first = curve.points.size();
    while (first > 0 && curve.points[first - 1].converged) --first;
    std::vector<double> x, v;  // end time (centered later), tc
    for (std::size_t i = first; i < curve.points.size(); ++i) {
        x.push_back(to_decimal_year(curve.points[i].end_date).value);
        v.push_back(curve.points[i].critical_time.value);
    }
    if (x.empty())
        throw std::invalid_argument("extrapolate: trailing segment has no converged points");
    const double x_last = x.back();

    ExtrapolationResult result;
    for (ExtrapolationMethod m : config.methods) {
        MethodEstimate est;
        est.method = m;
        switch (m) {
            case ExtrapolationMethod::last_value: {
                est.ok = true;
                est.estimate = DecimalYear{v.back()};
                break;
            }
            case ExtrapolationMethod::exp_approach: {
                // tc(end) = limit - a * exp(-rate * (end - end_last)),
                // linear in (limit, a) for fixed rate; the rate is found by
                // a log-spaced scan plus golden-section refinement.
                if (x.size() < 4) {
                    est.message = "needs at least 4 converged points";
                    break;
                }
                const std::size_t n = x.size();
                std::vector<double> ones(n, 1.0), decay(n);
                double best_rate = 0.0, best_sse = std::numeric_limits<double>::infinity();
                std::array<double, 2> best_coeffs{};
                bool found = false;
                auto eval_rate = [&](double rate) {
                    for (std::size_t i = 0; i < n; ++i)
                        decay[i] = -std::exp(-rate * (x[i] - x_last));
                    const std::array<std::span<const double>, 2> cols{ones, decay};
                    auto coeffs = lsq_solve<2>(cols, v);
                    if (!coeffs) return std::numeric_limits<double>::infinity();
                    const double sse = lsq_sse<2>(cols, v, *coeffs);
                    if (std::isfinite(sse) && (!found || sse < best_sse)) {
                        best_sse = sse;
                        best_rate = rate;
                        best_coeffs = *coeffs;
                        found = true;
                    }
                    return sse;
                };
                const int n_rates = 60;
                std::vector<double> rates(n_rates);
                for (int i = 0; i < n_rates; ++i)
                    rates[std::size_t(i)] = std::exp(std::log(1e-2)
                                                     + (std::log(1e2) - std::log(1e-2)) * double(i)
                                                           / double(n_rates - 1));
                std::size_t best_node = 0;
                double best_node_sse = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < rates.size(); ++i) {
                    const double sse = eval_rate(rates[i]);
                    if (sse < best_node_sse) {
                        best_node_sse = sse;
                        best_node = i;
                    }
                }
                if (!found) {
                    est.message = "no feasible decay rate";
                    break;
                }
                double lo = rates[best_node > 0 ? best_node - 1 : 0];
                double hi = rates[std::min(best_node + 1, rates.size() - 1)];
                const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
                double c = hi - inv_phi * (hi - lo), d = lo + inv_phi * (hi - lo);
                double fc = eval_rate(c), fd = eval_rate(d);
                for (int iter = 0; iter < 120 && hi - lo > 1e-12; ++iter) {
                    if (fc < fd) {
                        hi = d; d = c; fd = fc;
                        c = hi - inv_phi * (hi - lo);
                        fc = eval_rate(c);
                    } else {
                        lo = c; c = d; fc = fd;
                        d = lo + inv_phi * (hi - lo);
                        fd = eval_rate(d);
                    }
                }
                const double limit = best_coeffs[0];
                if (!std::isfinite(limit) || std::abs(limit - v.back()) > 50.0) {
                    est.message = "diverged";
                    break;
                }
                est.ok = true;
                est.estimate = DecimalYear{limit};
                break;
            }
            case ExtrapolationMethod::linear_fixed_point: {
                if (x.size() < config.span) {
                    est.message = "needs " + std::to_string(config.span) + " converged points";
                    break;
                }
                const std::size_t from = x.size() - config.span;
                double sx = 0, sv = 0, sxx = 0, sxv = 0;
                const double nn = double(config.span);
                for (std::size_t i = from; i < x.size(); ++i) {
                    sx += x[i]; sv += v[i]; sxx += x[i] * x[i]; sxv += x[i] * v[i];
                }
                const double det = nn * sxx - sx * sx;
                if (det == 0.0) {
                    est.message = "degenerate line";
                    break;
                }
                const double slope = (nn * sxv - sx * sv) / det;
                const double intercept = (sv - slope * sx) / nn;
                est.ok = true;
                // The fixed point tc(end) = end exists only for slope < 1;
                // otherwise read the line at the last end.
                est.estimate = DecimalYear{slope < 1.0 ? intercept / (1.0 - slope)
                                                       : intercept + slope * x_last};
                break;
            }
        }
        result.methods.push_back(std::move(est));
    }

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& est : result.methods)
        if (est.ok) {
            lo = std::min(lo, est.estimate.value);
            hi = std::max(hi, est.estimate.value);
        }
    if (!std::isfinite(lo))
        throw std::runtime_error("extrapolate: every method failed");
    result.low = DecimalYear{lo};
    result.high = DecimalYear{hi};
    result.low_date = from_decimal_year(result.low);
    result.high_date = from_decimal_year(result.high);
    return result;
}

/// Plot-ready sweep data: end_date,tc_decimal,tc_date,A,sse,converged.
inline void write_rolling_csv(std::ostream& out, const RollingCurve& curve) {
    out << "end_date,tc_decimal,tc_date,A,sse,converged\n";
    for (const auto& p : curve.points)
        out << p.end_date.to_iso() << ',' << format_double(p.critical_time.value) << ','
            << from_decimal_year(p.critical_time).to_iso() << ',' << format_double(p.asymptote)
            << ',' << format_double(p.sse) << ',' << (p.converged ? '1' : '0') << '\n';
}

inline std::vector<RollingPoint> read_rolling_csv(std::istream& in) {
    auto header = detail::read_header(in);
    const std::size_t end_col = 0, tc_col = 1, a_col = 3, sse_col = 4, conv_col = 5;
    if (header.size() < 6 || header[0] != "end_date")
        throw CsvError("not a rolling curve CSV");
    std::vector<RollingPoint> points;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() < 6)
            throw CsvError("line " + std::to_string(line_no) + ": too few fields");
        auto end = Date::parse_iso(trim(fields[end_col]));
        auto tc = parse_double_strict(trim(fields[tc_col]));
        auto a = parse_double_strict(trim(fields[a_col]));
        auto sse = parse_double_strict(trim(fields[sse_col]));
        auto conv = trim(fields[conv_col]);
        if (!end || !tc || !a || !sse || (conv != "0" && conv != "1"))
            throw CsvError("line " + std::to_string(line_no) + ": unparseable row");
        points.push_back({*end, DecimalYear{*tc}, *a, *sse, conv == "1"});
    }
    return points;
}

}  // namespace lpplfit
