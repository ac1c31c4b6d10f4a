#include "catch2/catch_amalgamated.hpp"

#include <cmath>

#include "lpplfit/forecast.hpp"
#include "lpplfit/synth.hpp"

using namespace lpplfit;

TEST_CASE("crash window calendar anchors") {
    // Regression values computed independently with the documented
    // convention (nearest-day conversion, then a 1.4 * 30.44 day shift).
    auto oil = crash_window({{2008.67}, {2008.67}});
    CHECK(oil.start == Date{2008, 7, 21});
    CHECK(oil.end == oil.start);

    auto gold = crash_window({{2011.45}, {2011.45}});
    CHECK(gold.start == Date{2011, 5, 2});
    CHECK(std::abs(days_between(Date{2011, 4, 30}, gold.start)) <= 3);
}

TEST_CASE("zero lead returns the critical dates themselves") {
    auto window = crash_window({{2008.67}, {2011.45}}, 0.0);
    CHECK(window.start == from_decimal_year({2008.67}));
    CHECK(window.end == from_decimal_year({2011.45}));
}

TEST_CASE("crash window validation") {
    CHECK_THROWS_AS(crash_window({{2011.0}, {2010.0}}), std::invalid_argument);
    CHECK_THROWS_AS(crash_window({{2010.0}, {2011.0}}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(crash_window({{std::nan("")}, {2011.0}}), std::invalid_argument);
}

TEST_CASE("crash window shifts day-for-day with the critical time") {
    const Date base{2011, 3, 15};
    const auto reference = crash_window({to_decimal_year(base), to_decimal_year(base)});
    for (long d : {1L, 7L, 30L, 100L, 250L}) {
        const Date moved = add_days(base, d);
        auto window = crash_window({to_decimal_year(moved), to_decimal_year(moved)});
        CHECK(days_between(reference.start, window.start) == d);
        CHECK(days_between(reference.end, window.end) == d);
    }
}

TEST_CASE("longer leads give strictly earlier windows") {
    const DecimalYearRange range{{2011.45}, {2011.55}};
    Date prev_start = crash_window(range, 0.0).start;
    for (double lead : {0.5, 1.0, 1.4, 2.0, 2.8}) {
        const Date start = crash_window(range, lead).start;
        CHECK(start < prev_start);
        prev_start = start;
    }
}

TEST_CASE("price at crash matches closed-form arithmetic without oscillation") {
    LpplParams p;
    p.asymptote = 1200.0;
    p.trend_scale = 500.0;
    p.osc_amplitude = 0.0;
    p.exponent = 0.3;
    p.log_frequency = 10.0;
    p.critical_time = {2011.5};
    const double delta = 0.12;
    CHECK(price_at_crash(p, {2011.5 - delta})
          == Catch::Approx(1200.0 - 500.0 * std::pow(delta, 0.3)).epsilon(1e-12));
    CHECK_THROWS_AS(price_at_crash(p, {2011.5}), std::domain_error);
}

TEST_CASE("price at crash for the hyperbolic model") {
    HyperOscParams p;
    p.scale = 400.0;
    p.exponent = 1.05;
    p.trend_singularity = {2014.95};
    p.osc_amplitude = 10.0;
    p.log_frequency = 8.0;
    p.phase = 0.2;
    p.osc_singularity = {2011.55};
    const DecimalYear t{2011.3};
    CHECK(price_at_crash(p, t) == Catch::Approx(eval_hyper_osc(p, t)).epsilon(1e-15));
    CHECK_THROWS_AS(price_at_crash(p, {2011.6}), std::domain_error);
}

TEST_CASE("asymptote range passes through the trailing min and max") {
    std::vector<double> estimates{1201.0, 1150.0, 1189.5, 1250.0, 1222.0};
    auto range = a_based_range(estimates);
    CHECK(range.low == 1150.0);
    CHECK(range.high == 1250.0);
    CHECK_THROWS_AS(a_based_range({}), std::invalid_argument);
}

TEST_CASE("nominal reconversion") {
    std::vector<DeflatorEntry> entries{{{1982, 6}, 100.0}, {{2010, 11}, 184.0},
                                       {{2010, 12}, 185.5}};
    DeflatorSeries deflator(entries, {1982, 6});

    SECTION("identity at the base period") {
        CHECK(nominal_from_real(1000.0, deflator, {1982, 6}) == Catch::Approx(1000.0));
    }
    SECTION("linear in the real price") {
        const double one = nominal_from_real(1.0, deflator, {2010, 12});
        for (double x : {2.0, 10.0, 1234.5})
            CHECK(nominal_from_real(x, deflator, {2010, 12})
                  == Catch::Approx(x * one).epsilon(1e-12));
    }
    SECTION("real 1150-1250 scales with the index ratio") {
        const double lo = nominal_from_real(1150.0, deflator, {2010, 12});
        const double hi = nominal_from_real(1250.0, deflator, {2010, 12});
        CHECK(lo == Catch::Approx(1150.0 * 1.855).epsilon(1e-12));
        CHECK(hi == Catch::Approx(1250.0 * 1.855).epsilon(1e-12));
    }
    SECTION("uncovered period") {
        CHECK_THROWS_AS(nominal_from_real(1.0, deflator, {2011, 1}), std::invalid_argument);
    }
}

TEST_CASE("inputs digest is stable and input-sensitive") {
    PriceSeries a({{{2010, 1, 4}, 100.0}, {{2010, 1, 5}, 101.0}}, Basis::nominal());
    PriceSeries b({{{2010, 1, 4}, 100.0}, {{2010, 1, 5}, 101.5}}, Basis::nominal());
    CHECK(inputs_digest(a, "cfg") == inputs_digest(a, "cfg"));
    CHECK(inputs_digest(a, "cfg") != inputs_digest(b, "cfg"));
    CHECK(inputs_digest(a, "cfg") != inputs_digest(a, "cfg2"));
    CHECK(inputs_digest(a, "cfg").size() == 16);
}
