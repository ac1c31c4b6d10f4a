#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpplfit/linalg.hpp"
#include "lpplfit/model.hpp"
#include "lpplfit/series.hpp"

namespace lpplfit {

struct ParamRange {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const ParamRange&) const = default;
};

/// Search configuration for the LPPL least-squares fit. Critical-time
/// bounds are offsets from the window's last observation so the same
/// config can drive a rolling sweep.
struct FitConfig {
    Space space = Space::price;
    double tc_min_offset_years = 0.02;  // tc lower bound: window end + this; must be > 0
    double tc_max_offset_years = 2.0;   // tc upper bound: window end + this
    ParamRange exponent_bounds{0.05, 1.2};
    bool mirror_exponent = false;  // additionally search the negated exponent range
    ParamRange log_frequency_bounds{2.0, 40.0};
    int tc_nodes = 33;
    int exponent_nodes = 12;
    int log_frequency_nodes = 39;
    int multistart = 8;        // grid candidates passed to local refinement
    int max_iterations = 120;  // refinement iterations per candidate
    double tolerance = 1e-12;  // relative SSE improvement declaring convergence
    std::size_t min_points = 50;
    int threads = 1;  // grid evaluation workers; results identical for any value

    void validate() const {
        if (!(tc_min_offset_years > 0.0) || !(tc_max_offset_years > tc_min_offset_years))
            throw std::invalid_argument("FitConfig: tc offsets must satisfy 0 < min < max");
        if (!(exponent_bounds.lo < exponent_bounds.hi)
            || !(log_frequency_bounds.lo < log_frequency_bounds.hi))
            throw std::invalid_argument("FitConfig: degenerate parameter bounds");
        if (!(log_frequency_bounds.lo > 0.0))
            throw std::invalid_argument("FitConfig: log frequency bounds must be positive");
        if (tc_nodes < 2 || exponent_nodes < 2 || log_frequency_nodes < 2)
            throw std::invalid_argument("FitConfig: need at least 2 grid nodes per parameter");
        if (multistart < 1 || max_iterations < 1 || !(tolerance > 0.0))
            throw std::invalid_argument("FitConfig: bad refinement settings");
        if (min_points < 8)
            throw std::invalid_argument("FitConfig: min_points must be at least 8");
    }
};

struct FitResult {
    LpplParams params;
    double sse = 0.0;  // in fit space (price, or ln price)
    std::size_t n_points = 0;
    bool converged = false;
    std::size_t candidates_evaluated = 0;  // linear subproblems solved
    DateWindow window;                     // first/last observation actually fitted
    double grid_sse = std::numeric_limits<double>::infinity();  // best SSE before refinement
};

namespace detail {

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = lo + (hi - lo) * double(i) / double(n - 1);
    return v;
}

struct Candidate {
    double sse = std::numeric_limits<double>::infinity();
    double tc = 0.0;
    double alpha = 0.0;
    double omega = 0.0;
    std::size_t index = 0;  // linear grid index, the final tie-breaker
};

/// Deterministic preference order: lower SSE wins; near-ties (1e-12
/// relative) break on smaller tc, then smaller omega.
inline bool better(const Candidate& a, const Candidate& b) {
    const double tol = 1e-12 * std::max(std::abs(a.sse), std::abs(b.sse));
    if (std::abs(a.sse - b.sse) > tol) return a.sse < b.sse;
    if (a.tc != b.tc) return a.tc < b.tc;
    if (a.omega != b.omega) return a.omega < b.omega;
    if (a.alpha != b.alpha) return a.alpha < b.alpha;
    return a.index < b.index;
}

inline void insert_candidate(std::vector<Candidate>& list, const Candidate& c, std::size_t cap) {
    std::size_t pos = 0;
    while (pos < list.size() && better(list[pos], c)) ++pos;
    if (pos >= cap) return;
    list.insert(list.begin() + long(pos), c);
    if (list.size() > cap) list.pop_back();
}

template <std::size_t NL, std::size_t NC>
struct RefineOutcome {
    std::array<double, NL> theta{};
    std::array<double, NC> coeffs{};
    double sse = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::size_t evals = 0;
};

/// Levenberg-damped Gauss-Newton over the nonlinear parameters with the
/// linear coefficients slaved: each trial re-solves the linear subproblem
/// exactly, and the Jacobian is projected onto the orthogonal complement
/// of the design columns (Kaufman's variable-projection step) so the
/// damped steps do not fight directions the linear solve absorbs.
///
/// `build(theta, cols)` fills the NC design columns, returning false when
/// theta is infeasible. `jacobian(theta, coeffs, cols, jac)` fills the NL
/// model-derivative columns. `feasible(coeffs)` gates coefficient-space
/// constraints. Convergence means the relative SSE improvement fell below
/// `tolerance` (including the case where no improving step exists).
template <std::size_t NL, std::size_t NC, class BuildFn, class JacobianFn, class FeasibleFn>
RefineOutcome<NL, NC> lm_refine(std::span<const double> y, std::array<double, NL> theta,
                                const std::array<ParamRange, NL>& bounds, double tolerance,
                                int max_iterations, BuildFn&& build, JacobianFn&& jacobian,
                                FeasibleFn&& feasible) {
    const std::size_t n = y.size();
    RefineOutcome<NL, NC> out;
    out.theta = theta;

    std::array<std::vector<double>, NC> cols, trial_cols;
    for (auto& c : cols) c.resize(n);
    for (auto& c : trial_cols) c.resize(n);
    std::array<std::vector<double>, NL> jac;
    for (auto& c : jac) c.resize(n);
    std::vector<double> resid(n);

    auto spans = [](std::array<std::vector<double>, NC>& b) {
        std::array<std::span<const double>, NC> s;
        for (std::size_t k = 0; k < NC; ++k) s[k] = b[k];
        return s;
    };

    if (!build(theta, cols)) return out;
    auto coeffs = lsq_solve<NC>(spans(cols), y);
    ++out.evals;
    if (!coeffs || !feasible(*coeffs)) return out;
    out.coeffs = *coeffs;
    out.sse = lsq_sse<NC>(spans(cols), y, *coeffs);

    double lambda = 1e-3;
    for (int iter = 0; iter < max_iterations; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double m = 0.0;
            for (std::size_t k = 0; k < NC; ++k) m += out.coeffs[k] * cols[k][i];
            resid[i] = m - y[i];
        }
        jacobian(out.theta, out.coeffs, cols, jac);
        // Kaufman projection: remove each Jacobian column's component in
        // the span of the design columns.
        for (std::size_t k = 0; k < NL; ++k) {
            auto beta = lsq_solve<NC>(spans(cols), jac[k]);
            if (!beta) continue;
            for (std::size_t i = 0; i < n; ++i) {
                double proj = 0.0;
                for (std::size_t c = 0; c < NC; ++c) proj += (*beta)[c] * cols[c][i];
                jac[k][i] -= proj;
            }
        }

        std::array<double, NL * NL> h{};
        std::array<double, NL> g{};
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t r = 0; r < NL; ++r) {
                for (std::size_t c = r; c < NL; ++c) h[r * NL + c] += jac[r][i] * jac[c][i];
                g[r] += jac[r][i] * resid[i];
            }
        for (std::size_t r = 0; r < NL; ++r)
            for (std::size_t c = 0; c < r; ++c) h[r * NL + c] = h[c * NL + r];

        bool accepted = false;
        double rel_improvement = 0.0;
        while (true) {
            auto damped = h;
            for (std::size_t k = 0; k < NL; ++k)
                damped[k * NL + k] += lambda * (h[k * NL + k] > 0.0 ? h[k * NL + k] : 1.0);
            std::array<double, NL> neg_g;
            for (std::size_t k = 0; k < NL; ++k) neg_g[k] = -g[k];
            auto step = solve_dense<NL>(damped, neg_g);
            if (step) {
                auto trial = out.theta;
                bool moved = false;
                for (std::size_t k = 0; k < NL; ++k) {
                    trial[k] = std::clamp(trial[k] + (*step)[k], bounds[k].lo, bounds[k].hi);
                    moved |= trial[k] != out.theta[k];
                }
                if (moved && build(trial, trial_cols)) {
                    auto trial_coeffs = lsq_solve<NC>(spans(trial_cols), y);
                    ++out.evals;
                    if (trial_coeffs && feasible(*trial_coeffs)) {
                        const double trial_sse = lsq_sse<NC>(spans(trial_cols), y, *trial_coeffs);
                        if (std::isfinite(trial_sse) && trial_sse < out.sse) {
                            rel_improvement = (out.sse - trial_sse)
                                              / std::max(out.sse, 1e-300);
                            out.theta = trial;
                            out.coeffs = *trial_coeffs;
                            out.sse = trial_sse;
                            std::swap(cols, trial_cols);
                            lambda = std::max(lambda / 10.0, 1e-14);
                            accepted = true;
                            break;
                        }
                    }
                }
            }
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
        if (!accepted) {
            // No improving step exists even with vanishing step size: the
            // point is stationary to working precision.
            out.converged = true;
            break;
        }
        if (rel_improvement < tolerance) {
            out.converged = true;
            break;
        }
    }
    return out;
}

/// Fills the four LPPL design columns [1, tau^a, tau^a cos, tau^a sin]
/// at theta = (tc, alpha, omega). Returns false if any tau <= 0.
inline bool build_lppl_columns(std::span<const double> t, const std::array<double, 3>& theta,
                               std::array<std::vector<double>, 4>& cols) {
    const double tc = theta[0], alpha = theta[1], omega = theta[2];
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = tc - t[i];
        if (!(tau > 0.0)) return false;
        const double lt = std::log(tau);
        const double pa = std::exp(alpha * lt);
        const double psi = omega * lt;
        cols[0][i] = 1.0;
        cols[1][i] = pa;
        cols[2][i] = pa * std::cos(psi);
        cols[3][i] = pa * std::sin(psi);
    }
    return true;
}

inline void lppl_jacobian(std::span<const double> t, const std::array<double, 3>& theta,
                          const std::array<double, 4>& c,
                          const std::array<std::vector<double>, 4>& cols,
                          std::array<std::vector<double>, 3>& jac) {
    const double tc = theta[0], alpha = theta[1], omega = theta[2];
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = tc - t[i];
        const double lt = std::log(tau);
        const double trend = c[1] * cols[1][i] + c[2] * cols[2][i] + c[3] * cols[3][i];
        const double quad = c[3] * cols[2][i] - c[2] * cols[3][i];
        jac[0][i] = (alpha * trend + omega * quad) / tau;
        jac[1][i] = lt * trend;
        jac[2][i] = lt * quad;
    }
}

/// |C| < 1: the oscillation must never reverse the trend sign. In
/// coefficient terms hypot(c2, c3) < |c1| (or no oscillation at all).
inline bool lppl_coeffs_feasible(const std::array<double, 4>& c) {
    const double rho = std::hypot(c[2], c[3]);
    return rho == 0.0 || rho < std::abs(c[1]);
}

inline LpplParams lppl_params_from(const std::array<double, 3>& theta,
                                   const std::array<double, 4>& c, Space space) {
    LpplParams p;
    p.space = space;
    p.critical_time = DecimalYear{theta[0]};
    p.exponent = theta[1];
    p.log_frequency = theta[2];
    p.asymptote = c[0];
    p.trend_scale = -c[1];
    const double rho = std::hypot(c[2], c[3]);
    if (rho == 0.0 || p.trend_scale == 0.0) {
        p.osc_amplitude = 0.0;
        p.phase = 0.0;
    } else {
        p.osc_amplitude = rho / std::abs(p.trend_scale);
        const double sign = p.trend_scale >= 0.0 ? 1.0 : -1.0;
        p.phase = std::atan2(sign * c[3], -sign * c[2]);
    }
    return p;
}

struct PreparedWindow {
    std::vector<double> t;
    std::vector<double> y;
    DateWindow window;
    double t_end = 0.0;
    double sum_sq_y = 0.0;
};

inline PreparedWindow prepare_window(const PriceSeries& series, DateWindow window, Space space,
                                     std::size_t min_points) {
    auto sub = slice(series, window.start, window.end);
    if (sub.size() < min_points)
        throw std::invalid_argument("fit: window has " + std::to_string(sub.size())
                                    + " observations, need at least "
                                    + std::to_string(min_points));
    PreparedWindow p;
    p.t = sub.decimal_times();
    p.y = sub.prices();
    if (space == Space::log_price)
        for (double& v : p.y) v = std::log(v);
    p.window = {sub.front().date, sub.back().date};
    p.t_end = p.t.back();
    for (double v : p.y) p.sum_sq_y += v * v;
    return p;
}

}  // namespace detail

/// Least-squares LPPL fit. For every grid node over (tc, exponent,
/// log-frequency) the cosine is expanded so the model is linear in four
/// coefficients, and that subproblem is solved exactly; the best grid
/// candidates are then refined by damped Gauss-Newton over the three
/// nonlinear parameters, re-solving the linear subproblem at every step.
/// Results are deterministic for a given config, including under threads:
/// per-node candidate lists are merged in grid order and ties break on
/// smaller tc, then smaller omega.
inline FitResult fit_lppl(const PriceSeries& series, DateWindow window, const FitConfig& config) {
    config.validate();
    auto data = detail::prepare_window(series, window, config.space, config.min_points);
    const std::size_t n = data.t.size();

    const double tc_lo = data.t_end + config.tc_min_offset_years;
    const double tc_hi = data.t_end + config.tc_max_offset_years;
    const auto tc_grid = detail::linspace(tc_lo, tc_hi, config.tc_nodes);
    auto alpha_grid = detail::linspace(config.exponent_bounds.lo, config.exponent_bounds.hi,
                                       config.exponent_nodes);
    if (config.mirror_exponent) {
        std::vector<double> mirrored;
        mirrored.reserve(alpha_grid.size() * 2);
        for (auto it = alpha_grid.rbegin(); it != alpha_grid.rend(); ++it)
            mirrored.push_back(-*it);
        mirrored.insert(mirrored.end(), alpha_grid.begin(), alpha_grid.end());
        alpha_grid = std::move(mirrored);
    }
    const auto omega_grid = detail::linspace(config.log_frequency_bounds.lo,
                                             config.log_frequency_bounds.hi,
                                             config.log_frequency_nodes);

    const std::size_t n_alpha = alpha_grid.size();
    const std::size_t n_omega = omega_grid.size();
    const std::size_t cap = std::size_t(config.multistart);

    // One tc node = one slice: sin/cos depend only on (tc, omega) and the
    // power column only on (tc, alpha), so each is computed once per slice.
    struct SliceResult {
        std::vector<detail::Candidate> top;
        std::size_t evals = 0;
    };
    auto scan_slice = [&](std::size_t tc_idx) {
        SliceResult res;
        const double tc = tc_grid[tc_idx];
        std::vector<double> lt(n), pa(n), col2(n), col3(n);
        std::vector<double> ones(n, 1.0);
        std::vector<double> cosbuf(n * n_omega), sinbuf(n * n_omega);
        for (std::size_t i = 0; i < n; ++i) lt[i] = std::log(tc - data.t[i]);
        for (std::size_t k = 0; k < n_omega; ++k)
            for (std::size_t i = 0; i < n; ++i) {
                const double psi = omega_grid[k] * lt[i];
                cosbuf[k * n + i] = std::cos(psi);
                sinbuf[k * n + i] = std::sin(psi);
            }
        for (std::size_t j = 0; j < n_alpha; ++j) {
            for (std::size_t i = 0; i < n; ++i) pa[i] = std::exp(alpha_grid[j] * lt[i]);
            for (std::size_t k = 0; k < n_omega; ++k) {
                for (std::size_t i = 0; i < n; ++i) {
                    col2[i] = pa[i] * cosbuf[k * n + i];
                    col3[i] = pa[i] * sinbuf[k * n + i];
                }
                const std::array<std::span<const double>, 4> cols{ones, pa, col2, col3};
                auto coeffs = lsq_solve<4>(cols, data.y);
                ++res.evals;
                if (!coeffs || !detail::lppl_coeffs_feasible(*coeffs)) continue;
                detail::Candidate cand;
                cand.sse = lsq_sse<4>(cols, data.y, *coeffs);
                if (!std::isfinite(cand.sse)) continue;
                cand.tc = tc;
                cand.alpha = alpha_grid[j];
                cand.omega = omega_grid[k];
                cand.index = (tc_idx * n_alpha + j) * n_omega + k;
                detail::insert_candidate(res.top, cand, cap);
            }
        }
        return res;
    };

    std::vector<SliceResult> slices(tc_grid.size());
    const int workers = std::max(1, config.threads);
    if (workers == 1) {
        for (std::size_t i = 0; i < tc_grid.size(); ++i) slices[i] = scan_slice(i);
    } else {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < workers; ++w)
            futures.push_back(std::async(std::launch::async, [&] {
                for (std::size_t i = next.fetch_add(1); i < tc_grid.size();
                     i = next.fetch_add(1))
                    slices[i] = scan_slice(i);
            }));
        for (auto& f : futures) f.get();
    }

    std::size_t evals = 0;
    std::vector<detail::Candidate> top;
    for (const auto& s : slices) {
        evals += s.evals;
        for (const auto& c : s.top) detail::insert_candidate(top, c, cap);
    }
    if (top.empty())
        throw std::runtime_error("fit_lppl: no feasible grid candidate "
                                 "(linear subproblem degenerate everywhere)");

    const std::array<ParamRange, 3> bounds{
        ParamRange{tc_lo, tc_hi},
        config.mirror_exponent
            ? ParamRange{-config.exponent_bounds.hi, config.exponent_bounds.hi}
            : config.exponent_bounds,
        config.log_frequency_bounds};
    auto build = [&](const std::array<double, 3>& theta, std::array<std::vector<double>, 4>& cols) {
        return detail::build_lppl_columns(data.t, theta, cols);
    };
    auto jacobian = [&](const std::array<double, 3>& theta, const std::array<double, 4>& c,
                        const std::array<std::vector<double>, 4>& cols,
                        std::array<std::vector<double>, 3>& jac) {
        detail::lppl_jacobian(data.t, theta, c, cols, jac);
    };

    detail::RefineOutcome<3, 4> best;
    detail::Candidate best_key;
    bool have_best = false;
    for (std::size_t ci = 0; ci < top.size(); ++ci) {
        auto outcome = detail::lm_refine<3, 4>(data.y, {top[ci].tc, top[ci].alpha, top[ci].omega},
                                               bounds, config.tolerance, config.max_iterations,
                                               build, jacobian, detail::lppl_coeffs_feasible);
        evals += outcome.evals;
        if (!std::isfinite(outcome.sse)) continue;
        detail::Candidate key{outcome.sse, outcome.theta[0], outcome.theta[1], outcome.theta[2],
                              ci};
        if (!have_best || detail::better(key, best_key)) {
            best = outcome;
            best_key = key;
            have_best = true;
        }
    }
    if (!have_best)
        throw std::runtime_error("fit_lppl: refinement failed on every candidate");

    FitResult result;
    result.params = detail::lppl_params_from(best.theta, best.coeffs, config.space);
    result.sse = best.sse;
    result.n_points = n;
    result.converged = best.converged;
    result.candidates_evaluated = evals;
    result.window = data.window;
    result.grid_sse = top.front().sse;
    return result;
}

/// Local refinement only, from explicit starting values: used to warm-start
/// rolling sweeps from the previous end date's optimum. The start is
/// clamped into the config's bounds for this window.
inline FitResult refine_lppl_from(const PriceSeries& series, DateWindow window,
                                  const FitConfig& config, const LpplParams& start) {
    config.validate();
    auto data = detail::prepare_window(series, window, config.space, config.min_points);
    const double tc_lo = data.t_end + config.tc_min_offset_years;
    const double tc_hi = data.t_end + config.tc_max_offset_years;
    const std::array<ParamRange, 3> bounds{
        ParamRange{tc_lo, tc_hi},
        config.mirror_exponent
            ? ParamRange{-config.exponent_bounds.hi, config.exponent_bounds.hi}
            : config.exponent_bounds,
        config.log_frequency_bounds};
    std::array<double, 3> theta{
        std::clamp(start.critical_time.value, tc_lo, tc_hi),
        std::clamp(start.exponent, bounds[1].lo, bounds[1].hi),
        std::clamp(start.log_frequency, bounds[2].lo, bounds[2].hi)};
    auto build = [&](const std::array<double, 3>& th, std::array<std::vector<double>, 4>& cols) {
        return detail::build_lppl_columns(data.t, th, cols);
    };
    auto jacobian = [&](const std::array<double, 3>& th, const std::array<double, 4>& c,
                        const std::array<std::vector<double>, 4>& cols,
                        std::array<std::vector<double>, 3>& jac) {
        detail::lppl_jacobian(data.t, th, c, cols, jac);
    };
    auto outcome = detail::lm_refine<3, 4>(data.y, theta, bounds, config.tolerance,
                                           config.max_iterations, build, jacobian,
                                           detail::lppl_coeffs_feasible);
    if (!std::isfinite(outcome.sse))
        throw std::runtime_error("refine_lppl_from: start is infeasible for this window");
    FitResult result;
    result.params = detail::lppl_params_from(outcome.theta, outcome.coeffs, config.space);
    result.sse = outcome.sse;
    result.n_points = data.t.size();
    result.converged = outcome.converged;
    result.candidates_evaluated = outcome.evals;
    result.window = data.window;
    result.grid_sse = outcome.sse;
    return result;
}

/// VarPro objective used by fit_lppl: exact linear solve at fixed
/// (tc, exponent, log-frequency). Infinity when infeasible. Exposed for
/// the finite-difference optimality check.
inline double lppl_profile_sse(const PriceSeries& series, DateWindow window,
                               const FitConfig& config, double tc, double exponent,
                               double log_frequency) {
    auto data = detail::prepare_window(series, window, config.space, config.min_points);
    const std::size_t n = data.t.size();
    std::array<std::vector<double>, 4> cols;
    for (auto& c : cols) c.resize(n);
    if (!detail::build_lppl_columns(data.t, {tc, exponent, log_frequency}, cols))
        return std::numeric_limits<double>::infinity();
    std::array<std::span<const double>, 4> spans;
    for (std::size_t k = 0; k < 4; ++k) spans[k] = cols[k];
    auto coeffs = lsq_solve<4>(spans, data.y);
    if (!coeffs || !detail::lppl_coeffs_feasible(*coeffs))
        return std::numeric_limits<double>::infinity();
    return lsq_sse<4>(spans, data.y, *coeffs);
}

/// Documented optimality threshold for the finite-difference check below.
inline constexpr double kGradientNormThreshold = 1e-3;

struct GradientCheck {
    std::array<double, 3> gradient{};  // dSSE/d(tc, exponent, log_frequency), bound-projected
    double normalized_norm = 0.0;      // see fd_gradient_check
};

/// Central finite differences of the VarPro objective at a returned
/// optimum, projected at active bounds (a component pointing outside the
/// feasible box is zeroed). The normalized norm weighs the gradient by
/// characteristic steps (one day in tc, 0.01 in exponent and frequency)
/// and divides by SSE, so it reads as "fractional SSE change per
/// characteristic step"; a genuine optimum stays below
/// kGradientNormThreshold.
inline GradientCheck fd_gradient_check(const PriceSeries& series, DateWindow window,
                                       const FitConfig& config, const LpplParams& params) {
    auto data = detail::prepare_window(series, window, config.space, config.min_points);
    const std::array<double, 3> theta{params.critical_time.value, params.exponent,
                                      params.log_frequency};
    const std::array<ParamRange, 3> bounds{
        ParamRange{data.t_end + config.tc_min_offset_years,
                   data.t_end + config.tc_max_offset_years},
        config.mirror_exponent
            ? ParamRange{-config.exponent_bounds.hi, config.exponent_bounds.hi}
            : config.exponent_bounds,
        config.log_frequency_bounds};

    auto sse_at = [&](const std::array<double, 3>& th) {
        return lppl_profile_sse(series, window, config, th[0], th[1], th[2]);
    };
    const double sse0 = sse_at(theta);

    GradientCheck check;
    const std::array<double, 3> weights{1.0 / 365.25, 0.01, 0.01};
    double norm_sq = 0.0;
    for (std::size_t k = 0; k < 3; ++k) {
        const double h = 1e-7 * (bounds[k].hi - bounds[k].lo);
        auto up = theta, down = theta;
        up[k] = std::min(theta[k] + h, bounds[k].hi);
        down[k] = std::max(theta[k] - h, bounds[k].lo);
        const double width = up[k] - down[k];
        double g = width > 0.0 ? (sse_at(up) - sse_at(down)) / width : 0.0;
        // Projection: at an active bound only descent directions count.
        if (theta[k] <= bounds[k].lo && g > 0.0) g = 0.0;
        if (theta[k] >= bounds[k].hi && g < 0.0) g = 0.0;
        check.gradient[k] = g;
        norm_sq += (g * weights[k]) * (g * weights[k]);
    }
    check.normalized_norm = std::sqrt(norm_sq)
                            / std::max(sse0, 1e-12 * std::max(data.sum_sq_y, 1.0));
    return check;
}

}  // namespace lpplfit
