#include "catch2/catch_amalgamated.hpp"

#include <sstream>

#include "lpplfit/csv.hpp"
#include "lpplfit/forecast.hpp"
#include "lpplfit/series.hpp"
#include "lpplfit/synth.hpp"

using namespace lpplfit;

namespace {

DeflatorSeries make_deflator() {
    std::vector<DeflatorEntry> entries;
    for (int y = 2000; y <= 2012; ++y)
        for (unsigned m = 1; m <= 12; ++m)
            entries.push_back({{y, m}, 100.0 + (y - 2000) * 12 + m * 0.5});
    return DeflatorSeries(std::move(entries), {2000, 1});
}

}  // namespace

TEST_CASE("single row echoes through the parser") {
    std::istringstream in("date,price\n2010-01-04,1121.50\n");
    auto result = parse_price_csv(in);
    REQUIRE(result.series.size() == 1);
    CHECK(result.series[0].date == Date{2010, 1, 4});
    CHECK(result.series[0].price == 1121.50);
    CHECK(result.rejected.empty());
    CHECK(result.series.basis() == Basis::nominal());
}

TEST_CASE("duplicate dates are a hard error naming the dates") {
    std::istringstream in("date,price\n2010-01-04,1.0\n2010-01-05,2.0\n2010-01-04,3.0\n");
    CHECK_THROWS_WITH(parse_price_csv(in), Catch::Matchers::ContainsSubstring("2010-01-04"));
}

TEST_CASE("bad rows are reported with line numbers, not dropped silently") {
    std::istringstream in(
        "date,price\n2010-01-04,10\nnot-a-date,11\n2010-01-06,-3\n2010-01-07,xyz\n2010-01-08,12\n");
    auto result = parse_price_csv(in);
    CHECK(result.series.size() == 2);
    REQUIRE(result.rejected.size() == 3);
    CHECK(result.rejected[0].line == 3);
    CHECK(result.rejected[1].line == 4);
    CHECK(result.rejected[2].line == 5);
}

TEST_CASE("parser errors") {
    std::istringstream empty("");
    CHECK_THROWS_AS(parse_price_csv(empty), CsvError);
    std::istringstream missing("time,value\n2010-01-04,5\n");
    CHECK_THROWS_AS(parse_price_csv(missing), CsvError);
    std::istringstream all_bad("date,price\nx,1\ny,2\n");
    CHECK_THROWS_AS(parse_price_csv(all_bad), CsvError);
}

TEST_CASE("custom column names") {
    std::istringstream in("day,fixing,junk\n2010-01-04,1121.5,0\n");
    auto result = parse_price_csv(in, {"day", "fixing"});
    REQUIRE(result.series.size() == 1);
    CHECK(result.series[0].price == 1121.5);
}

TEST_CASE("synthesized series round-trips through CSV unchanged") {
    LpplParams gen;
    gen.asymptote = 800.0;
    gen.trend_scale = 300.0;
    gen.osc_amplitude = 0.05;
    gen.exponent = 0.4;
    gen.log_frequency = 9.0;
    gen.phase = 1.2;
    SynthSpec spec;
    spec.dates = weekday_dates({2005, 3, 1}, 250);
    gen.critical_time = {to_decimal_year(spec.dates.back()).value + 0.8};
    spec.params = gen;
    spec.noise_sigma = 0.02;
    spec.seed = 99;
    PriceSeries series = synthesize(spec);

    std::ostringstream out;
    write_price_csv(out, series);
    std::istringstream in(out.str());
    auto reparsed = parse_price_csv(in);
    CHECK(reparsed.series == series);
}

TEST_CASE("deflation identity and scaling") {
    auto deflator = make_deflator();
    std::vector<Observation> obs{{{2000, 1, 15}, 100.0}, {{2005, 6, 1}, 1500.0}};
    PriceSeries nominal(obs, Basis::nominal());
    auto real = deflate(nominal, deflator, {2000, 1});
    // base period index equals itself: identity
    CHECK(real[0].price == Catch::Approx(100.0));
    // explicit factor: index(base)/index(period)
    const double expected = 1500.0 * (100.5 / (100.0 + 5 * 12 + 6 * 0.5));
    CHECK(real[1].price == Catch::Approx(expected).epsilon(1e-12));
    CHECK(real.basis() == Basis::real({2000, 1}));
}

TEST_CASE("deflate then reinflate is the identity within 1e-9") {
    auto deflator = make_deflator();
    LpplParams gen;
    gen.asymptote = 900.0;
    gen.trend_scale = 400.0;
    gen.osc_amplitude = 0.03;
    gen.exponent = 0.3;
    gen.log_frequency = 12.0;
    gen.phase = -2.0;
    SynthSpec spec;
    spec.dates = weekday_dates({2004, 1, 5}, 300);
    gen.critical_time = {to_decimal_year(spec.dates.back()).value + 1.0};
    spec.params = gen;
    spec.noise_sigma = 0.01;
    spec.seed = 5;
    PriceSeries nominal = synthesize(spec);

    auto real = deflate(nominal, deflator, {2000, 1});
    for (std::size_t i = 0; i < real.size(); ++i) {
        const double back =
            nominal_from_real(real[i].price, deflator, YearMonth::of(real[i].date));
        CHECK(back == Catch::Approx(nominal[i].price).epsilon(1e-9));
    }
}

TEST_CASE("deflate rejects covered-period and basis violations") {
    auto deflator = make_deflator();
    PriceSeries early({{{1999, 12, 31}, 50.0}}, Basis::nominal());
    CHECK_THROWS_AS(deflate(early, deflator, {2000, 1}), std::invalid_argument);
    PriceSeries ok({{{2000, 2, 1}, 50.0}}, Basis::nominal());
    auto real = deflate(ok, deflator, {2000, 1});
    CHECK_THROWS_AS(deflate(real, deflator, {2000, 1}), std::invalid_argument);
}

TEST_CASE("slice keeps the window and is idempotent") {
    std::vector<Observation> obs;
    for (int i = 0; i < 40; ++i) obs.push_back({add_days({2010, 1, 1}, i * 3), 10.0 + i});
    PriceSeries series(obs, Basis::nominal());

    auto full = slice(series, {2009, 1, 1}, {2011, 1, 1});
    CHECK(full == series);

    auto part = slice(series, {2010, 1, 10}, {2010, 2, 10});
    CHECK(part.front().date >= Date{2010, 1, 10});
    CHECK(part.back().date <= Date{2010, 2, 10});
    CHECK(slice(part, {2010, 1, 10}, {2010, 2, 10}) == part);

    CHECK_THROWS_AS(slice(series, {2009, 1, 1}, {2009, 6, 1}), std::invalid_argument);
    CHECK_THROWS_AS(slice(series, {2010, 3, 1}, {2010, 2, 1}), std::invalid_argument);
}

TEST_CASE("series invariants are enforced at construction") {
    CHECK_THROWS_AS(PriceSeries({{{2010, 1, 2}, 1.0}, {{2010, 1, 1}, 1.0}}, Basis::nominal()),
                    std::invalid_argument);
    CHECK_THROWS_AS(PriceSeries({{{2010, 1, 1}, 0.0}}, Basis::nominal()),
                    std::invalid_argument);
    CHECK_THROWS_AS(PriceSeries({{{2010, 1, 1}, 1.0}, {{2010, 1, 1}, 2.0}}, Basis::nominal()),
                    std::invalid_argument);
}

TEST_CASE("deflator invariants") {
    CHECK_THROWS_AS(DeflatorSeries({}, {2000, 1}), std::invalid_argument);
    CHECK_THROWS_AS(DeflatorSeries({{{2000, 2}, 1.0}, {{2000, 1}, 1.0}}, {2000, 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DeflatorSeries({{{2000, 1}, -1.0}}, {2000, 1}), std::invalid_argument);
    CHECK_THROWS_AS(DeflatorSeries({{{2000, 1}, 1.0}}, {2001, 1}), std::invalid_argument);
}
