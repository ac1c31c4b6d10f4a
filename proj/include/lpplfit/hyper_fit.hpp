#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpplfit/fit.hpp"
#include "lpplfit/model.hpp"
#include "lpplfit/series.hpp"

namespace lpplfit {

/// Two-stage hyperbolic-plus-oscillation fit settings. The trend
/// singularity typically sits years past the window, so its search horizon
/// is wider than the oscillation one.
struct HyperFitConfig {
    double trend_tc_min_offset_years = 0.1;
    double trend_tc_max_offset_years = 8.0;
    int trend_tc_nodes = 161;
    double osc_tc_min_offset_years = 0.02;
    double osc_tc_max_offset_years = 2.0;
    int osc_tc_nodes = 25;
    ParamRange osc_log_frequency_bounds{2.0, 40.0};
    int osc_log_frequency_nodes = 39;
    int multistart = 8;
    // The oscillation stage inches along a shallow valley when the trend
    // stage leaves smooth contamination in its input, so it gets a larger
    // budget than the LPPL refinement.
    int max_iterations = 300;
    double tolerance = 1e-12;
    std::size_t min_points = 50;

    void validate() const {
        if (!(trend_tc_min_offset_years > 0.0)
            || !(trend_tc_max_offset_years > trend_tc_min_offset_years)
            || !(osc_tc_min_offset_years > 0.0)
            || !(osc_tc_max_offset_years > osc_tc_min_offset_years))
            throw std::invalid_argument("HyperFitConfig: bad singularity offsets");
        if (trend_tc_nodes < 2 || osc_tc_nodes < 2 || osc_log_frequency_nodes < 2)
            throw std::invalid_argument("HyperFitConfig: need at least 2 grid nodes");
        if (!(osc_log_frequency_bounds.lo > 0.0)
            || !(osc_log_frequency_bounds.lo < osc_log_frequency_bounds.hi))
            throw std::invalid_argument("HyperFitConfig: bad log frequency bounds");
        if (multistart < 1 || max_iterations < 1 || !(tolerance > 0.0) || min_points < 8)
            throw std::invalid_argument("HyperFitConfig: bad refinement settings");
    }
};

struct HyperTrendFit {
    double scale = 0.0;     // trend numerator
    double exponent = 0.0;  // hyperbola exponent, > 0
    DecimalYear trend_singularity{};
    double sse_log = 0.0;  // objective: sum of squared residuals of ln p
    std::size_t n_points = 0;
    bool converged = false;
    DateWindow window;
    std::size_t candidates_evaluated = 0;
};

/// Fits ln p = ln(scale) - exponent * ln(tc1 - t): a grid over tc1 with an
/// exact two-parameter regression at each node, then golden-section
/// refinement of tc1 on the bracket around the best node. Nodes where the
/// regression slope would make the exponent non-positive (a decaying
/// trend) are infeasible.
inline HyperTrendFit fit_hyper_trend(const PriceSeries& series, DateWindow window,
                                     const HyperFitConfig& config) {
    config.validate();
    auto data = detail::prepare_window(series, window, Space::log_price, config.min_points);
    const std::size_t n = data.t.size();

    const double tc_lo = data.t_end + config.trend_tc_min_offset_years;
    const double tc_hi = data.t_end + config.trend_tc_max_offset_years;

    std::vector<double> ones(n, 1.0), log_tau(n);
    std::size_t evals = 0;
    double best_tc = tc_lo;
    std::array<double, 2> best_coeffs{};
    double best_sse = std::numeric_limits<double>::infinity();
    bool have_best = false;

    auto evaluate = [&](double tc1) {
        ++evals;
        for (std::size_t i = 0; i < n; ++i) log_tau[i] = std::log(tc1 - data.t[i]);
        const std::array<std::span<const double>, 2> cols{ones, log_tau};
        auto coeffs = lsq_solve<2>(cols, data.y);
        if (!coeffs || !((*coeffs)[1] < 0.0)) return std::numeric_limits<double>::infinity();
        const double sse = lsq_sse<2>(cols, data.y, *coeffs);
        if (std::isfinite(sse) && (!have_best || sse < best_sse)) {
            best_sse = sse;
            best_tc = tc1;
            best_coeffs = *coeffs;
            have_best = true;
        }
        return sse;
    };

    const auto grid = detail::linspace(tc_lo, tc_hi, config.trend_tc_nodes);
    std::size_t best_node = grid.size();
    double best_node_sse = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double sse = evaluate(grid[i]);
        if (sse < best_node_sse) {
            best_node_sse = sse;
            best_node = i;
        }
    }
    if (best_node == grid.size())
        throw std::runtime_error("fit_hyper_trend: no feasible trend "
                                 "(series is not hyperbolically increasing)");

    double lo = grid[best_node > 0 ? best_node - 1 : 0];
    double hi = grid[std::min(best_node + 1, grid.size() - 1)];
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - inv_phi * (hi - lo);
    double d = lo + inv_phi * (hi - lo);
    double fc = evaluate(c), fd = evaluate(d);
    bool converged = false;
    for (int iter = 0; iter < 200; ++iter) {
        if (hi - lo < 1e-10) {
            converged = true;
            break;
        }
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = evaluate(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = evaluate(d);
        }
    }

    HyperTrendFit fit;
    fit.scale = std::exp(best_coeffs[0]);
    fit.exponent = -best_coeffs[1];
    fit.trend_singularity = DecimalYear{best_tc};
    fit.sse_log = best_sse;
    fit.n_points = n;
    fit.converged = converged;
    fit.window = data.window;
    fit.candidates_evaluated = evals;
    return fit;
}

/// One point of a trend-residual series.
struct ResidualPoint {
    DecimalYear time;
    double value = 0.0;
};

struct OscFit {
    double amplitude = 0.0;      // absolute units of the residual series
    double log_frequency = 0.0;
    double phase = 0.0;
    DecimalYear osc_singularity{};
    double sse = 0.0;
    bool converged = false;
    bool degenerate = false;  // no oscillation signal; frequency/phase unidentifiable
    std::size_t candidates_evaluated = 0;
};

/// Fits value = C cos(w ln(tc2 - t) + phi) to trend residuals: grid over
/// (tc2, w) with an exact two-coefficient solve per node via the cosine
/// expansion, then damped Gauss-Newton refinement of (tc2, w).
inline OscFit fit_osc_residuals(std::span<const ResidualPoint> points,
                                const HyperFitConfig& config) {
    config.validate();
    if (points.size() < config.min_points)
        throw std::invalid_argument("fit_osc_residuals: " + std::to_string(points.size())
                                    + " residuals, need at least "
                                    + std::to_string(config.min_points));
    const std::size_t n = points.size();
    std::vector<double> t(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = points[i].time.value;
        y[i] = points[i].value;
        if (i > 0 && !(t[i - 1] < t[i]))
            throw std::invalid_argument("fit_osc_residuals: times not strictly increasing");
    }
    const double t_end = t.back();
    const double tc_lo = t_end + config.osc_tc_min_offset_years;
    const double tc_hi = t_end + config.osc_tc_max_offset_years;

    double input_scale = 0.0;
    for (double v : y) input_scale = std::max(input_scale, std::abs(v));

    OscFit fit;
    if (input_scale == 0.0) {
        fit.osc_singularity = DecimalYear{tc_lo};
        fit.log_frequency = config.osc_log_frequency_bounds.lo;
        fit.converged = true;
        fit.degenerate = true;
        return fit;
    }

    const auto tc_grid = detail::linspace(tc_lo, tc_hi, config.osc_tc_nodes);
    const auto omega_grid = detail::linspace(config.osc_log_frequency_bounds.lo,
                                             config.osc_log_frequency_bounds.hi,
                                             config.osc_log_frequency_nodes);
    std::vector<double> cos_col(n), sin_col(n), lt(n);
    std::vector<detail::Candidate> top;
    std::size_t evals = 0;
    for (std::size_t i_tc = 0; i_tc < tc_grid.size(); ++i_tc) {
        const double tc = tc_grid[i_tc];
        for (std::size_t i = 0; i < n; ++i) lt[i] = std::log(tc - t[i]);
        for (std::size_t k = 0; k < omega_grid.size(); ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double psi = omega_grid[k] * lt[i];
                cos_col[i] = std::cos(psi);
                sin_col[i] = std::sin(psi);
            }
            const std::array<std::span<const double>, 2> cols{cos_col, sin_col};
            auto coeffs = lsq_solve<2>(cols, y);
            ++evals;
            if (!coeffs) continue;
            detail::Candidate cand;
            cand.sse = lsq_sse<2>(cols, y, *coeffs);
            if (!std::isfinite(cand.sse)) continue;
            cand.tc = tc;
            cand.omega = omega_grid[k];
            cand.index = i_tc * omega_grid.size() + k;
            detail::insert_candidate(top, cand, std::size_t(config.multistart));
        }
    }
    if (top.empty())
        throw std::runtime_error("fit_osc_residuals: linear subproblem degenerate everywhere");

    const std::array<ParamRange, 2> bounds{ParamRange{tc_lo, tc_hi},
                                           config.osc_log_frequency_bounds};
    auto build = [&](const std::array<double, 2>& theta, std::array<std::vector<double>, 2>& cols) {
        const double tc = theta[0], omega = theta[1];
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = tc - t[i];
            if (!(tau > 0.0)) return false;
            const double psi = omega * std::log(tau);
            cols[0][i] = std::cos(psi);
            cols[1][i] = std::sin(psi);
        }
        return true;
    };
    auto jacobian = [&](const std::array<double, 2>& theta, const std::array<double, 2>& b,
                        const std::array<std::vector<double>, 2>& cols,
                        std::array<std::vector<double>, 2>& jac) {
        const double tc = theta[0], omega = theta[1];
        for (std::size_t i = 0; i < n; ++i) {
            const double tau = tc - t[i];
            const double quad = b[1] * cols[0][i] - b[0] * cols[1][i];
            jac[0][i] = omega / tau * quad;
            jac[1][i] = std::log(tau) * quad;
        }
    };
    auto feasible = [](const std::array<double, 2>&) { return true; };

    detail::RefineOutcome<2, 2> best;
    detail::Candidate best_key;
    bool have_best = false;
    for (std::size_t ci = 0; ci < top.size(); ++ci) {
        auto outcome = detail::lm_refine<2, 2>(y, {top[ci].tc, top[ci].omega}, bounds,
                                               config.tolerance, config.max_iterations, build,
                                               jacobian, feasible);
        evals += outcome.evals;
        if (!std::isfinite(outcome.sse)) continue;
        detail::Candidate key{outcome.sse, outcome.theta[0], 0.0, outcome.theta[1], ci};
        if (!have_best || detail::better(key, best_key)) {
            best = outcome;
            best_key = key;
            have_best = true;
        }
    }
    if (!have_best)
        throw std::runtime_error("fit_osc_residuals: refinement failed on every candidate");

    fit.osc_singularity = DecimalYear{best.theta[0]};
    fit.log_frequency = best.theta[1];
    fit.amplitude = std::hypot(best.coeffs[0], best.coeffs[1]);
    fit.phase = fit.amplitude > 0.0 ? std::atan2(-best.coeffs[1], best.coeffs[0]) : 0.0;
    fit.sse = best.sse;
    fit.converged = best.converged;
    fit.degenerate = fit.amplitude < 1e-9 * input_scale;
    fit.candidates_evaluated = evals;
    return fit;
}

struct HyperOscFitResult {
    HyperOscParams params;
    HyperTrendFit trend;
    OscFit osc;
    double sse = 0.0;  // price-space SSE of the combined model
    std::size_t n_points = 0;
    DateWindow window;
    bool converged = false;
};

/// Trend first, then log-periodic oscillation on the price-space
/// deviations from it.
inline HyperOscFitResult fit_hyper_osc(const PriceSeries& series, DateWindow window,
                                       const HyperFitConfig& config) {
    HyperOscFitResult result;
    result.trend = fit_hyper_trend(series, window, config);

    HyperOscParams trend_only;
    trend_only.scale = result.trend.scale;
    trend_only.exponent = result.trend.exponent;
    trend_only.trend_singularity = result.trend.trend_singularity;
    trend_only.osc_singularity = result.trend.trend_singularity;

    auto sub = slice(series, window.start, window.end);
    std::vector<ResidualPoint> deviations;
    deviations.reserve(sub.size());
    for (const auto& o : sub) {
        const DecimalYear t = to_decimal_year(o.date);
        deviations.push_back({t, o.price - hyper_trend(trend_only, t)});
    }
    result.osc = fit_osc_residuals(deviations, config);

    result.params = trend_only;
    result.params.osc_amplitude = result.osc.amplitude;
    result.params.log_frequency = result.osc.log_frequency;
    result.params.phase = result.osc.phase;
    result.params.osc_singularity = result.osc.osc_singularity;

    result.n_points = sub.size();
    result.window = result.trend.window;
    result.converged = result.trend.converged && result.osc.converged;
    double sse = 0.0;
    for (const auto& o : sub) {
        const double r = eval_hyper_osc(result.params, to_decimal_year(o.date)) - o.price;
        sse += r * r;
    }
    result.sse = sse;
    return result;
}

}  // namespace lpplfit
