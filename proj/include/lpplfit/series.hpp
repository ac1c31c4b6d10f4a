#pragma once

#include <algorithm>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpplfit/date.hpp"

namespace lpplfit {

/// One daily observation: calendar date and a strictly positive price.
struct Observation {
    Date date;
    double price = 0.0;

    bool operator==(const Observation&) const = default;
};

enum class BasisKind { nominal, real };

/// Whether prices are nominal or deflated to a base period's currency.
struct Basis {
    BasisKind kind = BasisKind::nominal;
    std::string base_period;  // "YYYY-MM", only meaningful for real

    static Basis nominal() { return {}; }
    static Basis real(YearMonth base) { return {BasisKind::real, base.to_string()}; }

    bool is_real() const { return kind == BasisKind::real; }
    bool operator==(const Basis&) const = default;
};

/// Ordered daily price series. Dates are strictly increasing and every
/// price is positive; construction enforces both. Immutable after
/// construction, so values can be shared freely across fit workers.
class PriceSeries {
public:
    PriceSeries() = default;

    PriceSeries(std::vector<Observation> observations, Basis basis)
        : obs_(std::move(observations)), basis_(std::move(basis)) {
        for (std::size_t i = 0; i < obs_.size(); ++i) {
            if (!obs_[i].date.valid())
                throw std::invalid_argument("PriceSeries: invalid date " + obs_[i].date.to_iso());
            if (!(obs_[i].price > 0.0))
                throw std::invalid_argument("PriceSeries: non-positive price at "
                                            + obs_[i].date.to_iso());
            if (i > 0 && !(obs_[i - 1].date < obs_[i].date))
                throw std::invalid_argument("PriceSeries: dates not strictly increasing at "
                                            + obs_[i].date.to_iso());
        }
    }

    std::size_t size() const { return obs_.size(); }
    bool empty() const { return obs_.empty(); }
    const Observation& operator[](std::size_t i) const { return obs_[i]; }
    const Observation& front() const { return obs_.front(); }
    const Observation& back() const { return obs_.back(); }
    std::span<const Observation> observations() const { return obs_; }
    const Basis& basis() const { return basis_; }

    auto begin() const { return obs_.begin(); }
    auto end() const { return obs_.end(); }

    std::vector<double> decimal_times() const {
        std::vector<double> t;
        t.reserve(obs_.size());
        for (const auto& o : obs_) t.push_back(to_decimal_year(o.date).value);
        return t;
    }

    std::vector<double> prices() const {
        std::vector<double> p;
        p.reserve(obs_.size());
        for (const auto& o : obs_) p.push_back(o.price);
        return p;
    }

    bool operator==(const PriceSeries&) const = default;

private:
    std::vector<Observation> obs_;
    Basis basis_;
};

struct DeflatorEntry {
    YearMonth period;
    double index = 0.0;

    bool operator==(const DeflatorEntry&) const = default;
};

/// Monthly price index used to convert nominal prices to a base period.
/// Periods are strictly increasing, indices positive, and the base period
/// must be covered.
class DeflatorSeries {
public:
    DeflatorSeries(std::vector<DeflatorEntry> entries, YearMonth base_period)
        : entries_(std::move(entries)), base_(base_period) {
        if (entries_.empty())
            throw std::invalid_argument("DeflatorSeries: no entries");
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (!(entries_[i].index > 0.0))
                throw std::invalid_argument("DeflatorSeries: non-positive index at "
                                            + entries_[i].period.to_string());
            if (i > 0 && !(entries_[i - 1].period < entries_[i].period))
                throw std::invalid_argument("DeflatorSeries: periods not strictly increasing at "
                                            + entries_[i].period.to_string());
        }
        if (!index_for(base_))
            throw std::invalid_argument("DeflatorSeries: base period " + base_.to_string()
                                        + " not covered");
    }

    std::optional<double> index_for(YearMonth period) const {
        auto it = std::lower_bound(entries_.begin(), entries_.end(), period,
                                   [](const DeflatorEntry& e, YearMonth p) { return e.period < p; });
        if (it == entries_.end() || it->period != period) return std::nullopt;
        return it->index;
    }

    YearMonth base_period() const { return base_; }
    double base_index() const { return *index_for(base_); }
    std::span<const DeflatorEntry> entries() const { return entries_; }
    YearMonth last_period() const { return entries_.back().period; }

private:
    std::vector<DeflatorEntry> entries_;
    YearMonth base_;
};

/// Converts a nominal series to base-period currency: each price is scaled
/// by index(base) / index(observation month). The monthly index applies
/// uniformly to every day of its month.
inline PriceSeries deflate(const PriceSeries& series, const DeflatorSeries& deflator,
                           YearMonth base) {
    if (series.basis().is_real())
        throw std::invalid_argument("deflate: series is already real");
    auto base_index = deflator.index_for(base);
    if (!base_index)
        throw std::invalid_argument("deflate: base period " + base.to_string() + " not covered");
    std::vector<Observation> out;
    out.reserve(series.size());
    for (const auto& o : series) {
        auto idx = deflator.index_for(YearMonth::of(o.date));
        if (!idx)
            throw std::invalid_argument("deflate: period " + YearMonth::of(o.date).to_string()
                                        + " not covered by deflator");
        out.push_back({o.date, o.price * (*base_index / *idx)});
    }
    return PriceSeries(std::move(out), Basis::real(base));
}

inline PriceSeries deflate(const PriceSeries& series, const DeflatorSeries& deflator) {
    return deflate(series, deflator, deflator.base_period());
}

/// Observations with start <= date <= end, basis preserved. An empty
/// result is an error: every downstream consumer needs data.
inline PriceSeries slice(const PriceSeries& series, Date start, Date end) {
    if (end < start)
        throw std::invalid_argument("slice: start " + start.to_iso() + " after end "
                                    + end.to_iso());
    std::vector<Observation> out;
    for (const auto& o : series)
        if (!(o.date < start) && !(end < o.date)) out.push_back(o);
    if (out.empty())
        throw std::invalid_argument("slice: no observations between " + start.to_iso() + " and "
                                    + end.to_iso());
    return PriceSeries(std::move(out), series.basis());
}

}  // namespace lpplfit
