#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>

namespace lpplfit {

/// Solves the dense N x N system a * x = b in place by Gaussian elimination
/// with partial pivoting. Returns nullopt when a pivot is (numerically)
/// zero. Sized for the tiny systems in this library (N <= 4).
template <std::size_t N>
std::optional<std::array<double, N>> solve_dense(std::array<double, N * N> a,
                                                 std::array<double, N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::abs(a[r * N + col]) > std::abs(a[pivot * N + col])) pivot = r;
        if (!(std::abs(a[pivot * N + col]) > 1e-300)) return std::nullopt;
        if (pivot != col) {
            for (std::size_t c = 0; c < N; ++c) std::swap(a[col * N + c], a[pivot * N + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a[col * N + col];
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r * N + col] * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < N; ++c) a[r * N + c] -= f * a[col * N + c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (std::size_t ri = N; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t c = ri + 1; c < N; ++c) s -= a[ri * N + c] * x[c];
        x[ri] = s / a[ri * N + ri];
        if (!std::isfinite(x[ri])) return std::nullopt;
    }
    return x;
}

/// Exact linear least squares for a small fixed number of columns.
/// Columns are RMS-scaled before forming the normal equations to keep the
/// system well conditioned; coefficients are unscaled on the way out.
/// `columns[k]` holds the k-th design column, all of length n.
template <std::size_t N>
std::optional<std::array<double, N>> lsq_solve(const std::array<std::span<const double>, N>& columns,
                                               std::span<const double> y) {
    const std::size_t n = y.size();
    if (n < N) return std::nullopt;

    std::array<double, N> scale{};
    for (std::size_t k = 0; k < N; ++k) {
        double ss = 0.0;
        for (double v : columns[k]) ss += v * v;
        scale[k] = ss > 0.0 ? std::sqrt(ss / double(n)) : 1.0;
        if (!std::isfinite(scale[k])) return std::nullopt;
    }

    std::array<double, N * N> g{};
    std::array<double, N> b{};
    for (std::size_t i = 0; i < n; ++i) {
        std::array<double, N> x;
        for (std::size_t k = 0; k < N; ++k) x[k] = columns[k][i] / scale[k];
        for (std::size_t r = 0; r < N; ++r) {
            for (std::size_t c = r; c < N; ++c) g[r * N + c] += x[r] * x[c];
            b[r] += x[r] * y[i];
        }
    }
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < r; ++c) g[r * N + c] = g[c * N + r];

    auto solved = solve_dense<N>(g, b);
    if (!solved) return std::nullopt;
    std::array<double, N> coeffs;
    for (std::size_t k = 0; k < N; ++k) {
        coeffs[k] = (*solved)[k] / scale[k];
        if (!std::isfinite(coeffs[k])) return std::nullopt;
    }
    return coeffs;
}

/// Sum of squared residuals of the fitted combination, computed from the
/// stored columns rather than the normal equations so tiny residuals are
/// not lost to cancellation.
template <std::size_t N>
double lsq_sse(const std::array<std::span<const double>, N>& columns, std::span<const double> y,
               const std::array<double, N>& coeffs) {
    double sse = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double m = 0.0;
        for (std::size_t k = 0; k < N; ++k) m += coeffs[k] * columns[k][i];
        const double r = m - y[i];
        sse += r * r;
    }
    return sse;
}

}  // namespace lpplfit
