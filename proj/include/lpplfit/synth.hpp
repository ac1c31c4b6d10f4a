#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <variant>
#include <vector>

#include "lpplfit/model.hpp"

namespace lpplfit {

/// Deterministic standard-normal sampler: mt19937_64 + Box-Muller, fully
/// specified so the same seed yields the same stream on every run.
class GaussianSampler {
public:
    explicit GaussianSampler(std::uint64_t seed) : engine_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    double uniform01() {
        return double(engine_() >> 11) * 0x1.0p-53;
    }

    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

/// Recipe for a synthetic price series with known generating parameters,
/// used as the fitting oracle in tests and by the synth CLI command.
struct SynthSpec {
    std::variant<LpplParams, HyperOscParams> params;
    std::vector<Date> dates;
    double noise_sigma = 0.0;  // relative std of multiplicative Gaussian noise
    std::uint64_t seed = 0;
};

/// `count` consecutive weekdays starting at `start` (itself skipped ahead
/// if it falls on a weekend).
inline std::vector<Date> weekday_dates(Date start, std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    auto sd = start.to_sys_days();
    while (out.size() < count) {
        std::chrono::weekday wd{sd};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday)
            out.push_back(Date::from_sys_days(sd));
        sd += std::chrono::days(1);
    }
    return out;
}

/// Prices are the model value (exponentiated for log_price space) times
/// (1 + eps) with eps ~ N(0, noise_sigma), drawn from a seeded generator:
/// the same spec and seed reproduce the series bit for bit.
inline PriceSeries synthesize(const SynthSpec& spec) {
    if (!(spec.noise_sigma >= 0.0))
        throw std::invalid_argument("synthesize: noise_sigma must be >= 0");
    if (spec.dates.empty())
        throw std::invalid_argument("synthesize: no dates");

    GaussianSampler noise(spec.seed);
    std::vector<Observation> obs;
    obs.reserve(spec.dates.size());
    for (const Date& d : spec.dates) {
        const DecimalYear t = to_decimal_year(d);
        double value;
        if (const auto* lppl = std::get_if<LpplParams>(&spec.params)) {
            value = eval_lppl(*lppl, t);
            if (lppl->space == Space::log_price) value = std::exp(value);
        } else {
            value = eval_hyper_osc(std::get<HyperOscParams>(spec.params), t);
        }
        const double eps = spec.noise_sigma > 0.0 ? spec.noise_sigma * noise.next() : 0.0;
        const double price = value * (1.0 + eps);
        if (!(price > 0.0) || !std::isfinite(price))
            throw std::invalid_argument("synthesize: model value gives non-positive price at "
                                        + d.to_iso());
        obs.push_back({d, price});
    }
    return PriceSeries(std::move(obs), Basis::nominal());
}

}  // namespace lpplfit
