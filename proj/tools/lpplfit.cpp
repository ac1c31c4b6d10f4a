// Command-line driver: ingest, fit, roll, forecast, synth.
//
// Exit codes: 0 success, 2 best-effort (fit did not meet its convergence
// tolerance), 1 error. Outputs are written once, after all computation,
// so a failing run leaves no partial files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lpplfit/csv.hpp"
#include "lpplfit/fit.hpp"
#include "lpplfit/forecast.hpp"
#include "lpplfit/hyper_fit.hpp"
#include "lpplfit/model.hpp"
#include "lpplfit/rolling.hpp"
#include "lpplfit/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lpplfit;

namespace {

struct RunConfig {
    std::string input;
    std::string deflator;
    std::string deflator_base;  // "YYYY-MM"; defaults to the file's first period
    CsvColumns csv;
    std::optional<Date> window_start, window_end;
    std::string model = "lppl";  // lppl | hyper
    std::string space = "price";
    std::string out = ".";
    std::uint64_t seed = 0;
    FitConfig fit;
    HyperFitConfig hyper;
    // rolling sweep
    std::optional<Date> roll_first_end;
    int roll_step_obs = 5;
    bool roll_warm_start = false;
    StabilizationConfig stabilization;
    ExtrapolationConfig extrapolation;
    double lead_months = kDefaultLeadMonths;
    json synth;        // raw synth block
    json effective;    // merged config snapshot, hashed into inputs_digest
};

Date parse_date_or_throw(const std::string& text, const std::string& what) {
    auto d = Date::parse_iso(text);
    if (!d) throw std::invalid_argument(what + ": expected YYYY-MM-DD, got '" + text + "'");
    return *d;
}

void load_fit_json(const json& j, FitConfig& f) {
    if (j.contains("tc_min_offset_years")) f.tc_min_offset_years = j["tc_min_offset_years"];
    if (j.contains("tc_max_offset_years")) f.tc_max_offset_years = j["tc_max_offset_years"];
    if (j.contains("exponent_min")) f.exponent_bounds.lo = j["exponent_min"];
    if (j.contains("exponent_max")) f.exponent_bounds.hi = j["exponent_max"];
    if (j.contains("mirror_exponent")) f.mirror_exponent = j["mirror_exponent"];
    if (j.contains("log_frequency_min")) f.log_frequency_bounds.lo = j["log_frequency_min"];
    if (j.contains("log_frequency_max")) f.log_frequency_bounds.hi = j["log_frequency_max"];
    if (j.contains("tc_nodes")) f.tc_nodes = j["tc_nodes"];
    if (j.contains("exponent_nodes")) f.exponent_nodes = j["exponent_nodes"];
    if (j.contains("log_frequency_nodes")) f.log_frequency_nodes = j["log_frequency_nodes"];
    if (j.contains("multistart")) f.multistart = j["multistart"];
    if (j.contains("max_iterations")) f.max_iterations = j["max_iterations"];
    if (j.contains("tolerance")) f.tolerance = j["tolerance"];
    if (j.contains("min_points")) f.min_points = j["min_points"];
    if (j.contains("threads")) f.threads = j["threads"];
}

void load_hyper_json(const json& j, HyperFitConfig& h) {
    if (j.contains("trend_tc_min_offset_years"))
        h.trend_tc_min_offset_years = j["trend_tc_min_offset_years"];
    if (j.contains("trend_tc_max_offset_years"))
        h.trend_tc_max_offset_years = j["trend_tc_max_offset_years"];
    if (j.contains("trend_tc_nodes")) h.trend_tc_nodes = j["trend_tc_nodes"];
    if (j.contains("osc_tc_min_offset_years"))
        h.osc_tc_min_offset_years = j["osc_tc_min_offset_years"];
    if (j.contains("osc_tc_max_offset_years"))
        h.osc_tc_max_offset_years = j["osc_tc_max_offset_years"];
    if (j.contains("osc_tc_nodes")) h.osc_tc_nodes = j["osc_tc_nodes"];
    if (j.contains("osc_log_frequency_min"))
        h.osc_log_frequency_bounds.lo = j["osc_log_frequency_min"];
    if (j.contains("osc_log_frequency_max"))
        h.osc_log_frequency_bounds.hi = j["osc_log_frequency_max"];
    if (j.contains("osc_log_frequency_nodes"))
        h.osc_log_frequency_nodes = j["osc_log_frequency_nodes"];
    if (j.contains("multistart")) h.multistart = j["multistart"];
    if (j.contains("max_iterations")) h.max_iterations = j["max_iterations"];
    if (j.contains("tolerance")) h.tolerance = j["tolerance"];
    if (j.contains("min_points")) h.min_points = j["min_points"];
}

RunConfig load_config(const std::string& config_path) {
    RunConfig cfg;
    json j = json::object();
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw std::invalid_argument("cannot open config file " + config_path);
        in >> j;
    }
    if (j.contains("input")) cfg.input = j["input"];
    if (j.contains("deflator")) cfg.deflator = j["deflator"];
    if (j.contains("deflator_base")) cfg.deflator_base = j["deflator_base"];
    if (j.contains("csv")) {
        if (j["csv"].contains("date")) cfg.csv.date = j["csv"]["date"];
        if (j["csv"].contains("price")) cfg.csv.price = j["csv"]["price"];
    }
    if (j.contains("window_start"))
        cfg.window_start = parse_date_or_throw(j["window_start"], "window_start");
    if (j.contains("window_end"))
        cfg.window_end = parse_date_or_throw(j["window_end"], "window_end");
    if (j.contains("model")) cfg.model = j["model"];
    if (j.contains("space")) cfg.space = j["space"];
    if (j.contains("out")) cfg.out = j["out"];
    if (j.contains("seed")) cfg.seed = j["seed"];
    if (j.contains("fit")) load_fit_json(j["fit"], cfg.fit);
    if (j.contains("hyper_fit")) load_hyper_json(j["hyper_fit"], cfg.hyper);
    if (j.contains("rolling")) {
        const json& r = j["rolling"];
        if (r.contains("first_end"))
            cfg.roll_first_end = parse_date_or_throw(r["first_end"], "rolling.first_end");
        if (r.contains("step_obs")) cfg.roll_step_obs = r["step_obs"];
        if (r.contains("warm_start")) cfg.roll_warm_start = r["warm_start"];
        if (r.contains("span")) {
            cfg.stabilization.span = r["span"];
            cfg.extrapolation.span = r["span"];
        }
        if (r.contains("dispersion_threshold_days"))
            cfg.stabilization.dispersion_threshold_days = r["dispersion_threshold_days"];
        if (r.contains("min_converged")) cfg.extrapolation.min_converged = r["min_converged"];
        if (r.contains("methods")) {
            cfg.extrapolation.methods.clear();
            for (const auto& name : r["methods"]) {
                if (name == "last_value")
                    cfg.extrapolation.methods.push_back(ExtrapolationMethod::last_value);
                else if (name == "exp_approach")
                    cfg.extrapolation.methods.push_back(ExtrapolationMethod::exp_approach);
                else if (name == "linear")
                    cfg.extrapolation.methods.push_back(ExtrapolationMethod::linear_fixed_point);
                else
                    throw std::invalid_argument("unknown extrapolation method "
                                                + name.get<std::string>());
            }
        }
    }
    if (j.contains("forecast") && j["forecast"].contains("lead_months"))
        cfg.lead_months = j["forecast"]["lead_months"];
    if (j.contains("synth")) cfg.synth = j["synth"];
    cfg.effective = std::move(j);
    return cfg;
}

Space space_of(const RunConfig& cfg) {
    if (cfg.space == "price") return Space::price;
    if (cfg.space == "log") return Space::log_price;
    throw std::invalid_argument("space must be 'price' or 'log', got '" + cfg.space + "'");
}

struct LoadedData {
    PriceSeries series;
    std::optional<DeflatorSeries> deflator;
    DateWindow window;
    std::string digest;
};

LoadedData load_data(const RunConfig& cfg) {
    if (cfg.input.empty()) throw std::invalid_argument("no input file (use --input or config)");
    std::ifstream in(cfg.input);
    if (!in) throw std::invalid_argument("cannot open price CSV " + cfg.input);
    auto parsed = parse_price_csv(in, cfg.csv);
    for (const auto& r : parsed.rejected)
        std::cerr << "note: rejected row " << r.line << ": " << r.reason << "\n";

    LoadedData data;
    data.series = std::move(parsed.series);
    if (!cfg.deflator.empty()) {
        std::ifstream din(cfg.deflator);
        if (!din) throw std::invalid_argument("cannot open deflator CSV " + cfg.deflator);
        auto entries = parse_deflator_csv(din);
        YearMonth base = entries.front().period;
        if (!cfg.deflator_base.empty()) {
            auto parsed_base = YearMonth::parse(cfg.deflator_base);
            if (!parsed_base)
                throw std::invalid_argument("deflator_base: expected YYYY-MM");
            base = *parsed_base;
        }
        data.deflator.emplace(std::move(entries), base);
        data.series = deflate(data.series, *data.deflator);
    }
    data.window.start = cfg.window_start.value_or(data.series.front().date);
    data.window.end = cfg.window_end.value_or(data.series.back().date);
    data.digest = inputs_digest(data.series, cfg.effective.dump());
    return data;
}

json params_json(const LpplParams& p) {
    return {{"asymptote", p.asymptote},
            {"trend_scale", p.trend_scale},
            {"osc_amplitude", p.osc_amplitude},
            {"exponent", p.exponent},
            {"log_frequency", p.log_frequency},
            {"phase", p.phase},
            {"tc_decimal", p.critical_time.value},
            {"tc_date", from_decimal_year(p.critical_time).to_iso()}};
}

LpplParams lppl_params_from_json(const json& j, Space space) {
    LpplParams p;
    p.asymptote = j["asymptote"];
    p.trend_scale = j["trend_scale"];
    p.osc_amplitude = j["osc_amplitude"];
    p.exponent = j["exponent"];
    p.log_frequency = j["log_frequency"];
    p.phase = j["phase"];
    p.critical_time = DecimalYear{j["tc_decimal"]};
    p.space = space;
    return p;
}

json params_json(const HyperOscParams& p) {
    return {{"scale", p.scale},
            {"exponent", p.exponent},
            {"tc1_decimal", p.trend_singularity.value},
            {"tc1_date", from_decimal_year(p.trend_singularity).to_iso()},
            {"osc_amplitude", p.osc_amplitude},
            {"log_frequency", p.log_frequency},
            {"phase", p.phase},
            {"tc2_decimal", p.osc_singularity.value},
            {"tc2_date", from_decimal_year(p.osc_singularity).to_iso()}};
}

HyperOscParams hyper_params_from_json(const json& j) {
    HyperOscParams p;
    p.scale = j["scale"];
    p.exponent = j["exponent"];
    p.trend_singularity = DecimalYear{j["tc1_decimal"]};
    p.osc_amplitude = j["osc_amplitude"];
    p.log_frequency = j["log_frequency"];
    p.phase = j["phase"];
    p.osc_singularity = DecimalYear{j["tc2_decimal"]};
    return p;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

int cmd_fit(const RunConfig& cfg) {
    auto data = load_data(cfg);
    const Space space = space_of(cfg);

    json jfit;
    std::ostringstream curve;
    curve << "date,observed,fitted\n";
    bool converged = false;

    if (cfg.model == "lppl") {
        FitConfig fc = cfg.fit;
        fc.space = space;
        FitResult res = fit_lppl(data.series, data.window, fc);
        converged = res.converged;
        jfit = {{"model", "lppl"},
                {"space", to_string(space)},
                {"params", params_json(res.params)},
                {"sse", res.sse},
                {"n_points", res.n_points},
                {"converged", res.converged},
                {"candidates_evaluated", res.candidates_evaluated},
                {"grid_sse", res.grid_sse},
                {"window", {{"start", res.window.start.to_iso()},
                            {"end", res.window.end.to_iso()}}},
                {"inputs_digest", data.digest}};
        for (const auto& o : slice(data.series, data.window.start, data.window.end)) {
            double fitted = eval_lppl(res.params, to_decimal_year(o.date));
            if (space == Space::log_price) fitted = std::exp(fitted);
            curve << o.date.to_iso() << ',' << format_double(o.price) << ','
                  << format_double(fitted) << '\n';
        }
    } else if (cfg.model == "hyper") {
        HyperOscFitResult res = fit_hyper_osc(data.series, data.window, cfg.hyper);
        converged = res.converged;
        jfit = {{"model", "hyper_osc"},
                {"params", params_json(res.params)},
                {"trend", {{"sse_log", res.trend.sse_log}, {"converged", res.trend.converged}}},
                {"osc", {{"sse", res.osc.sse},
                         {"converged", res.osc.converged},
                         {"degenerate", res.osc.degenerate}}},
                {"sse", res.sse},
                {"n_points", res.n_points},
                {"converged", res.converged},
                {"window", {{"start", res.window.start.to_iso()},
                            {"end", res.window.end.to_iso()}}},
                {"inputs_digest", data.digest}};
        for (const auto& o : slice(data.series, data.window.start, data.window.end))
            curve << o.date.to_iso() << ',' << format_double(o.price) << ','
                  << format_double(eval_hyper_osc(res.params, to_decimal_year(o.date))) << '\n';
    } else {
        throw std::invalid_argument("model must be 'lppl' or 'hyper', got '" + cfg.model + "'");
    }

    fs::create_directories(cfg.out);
    write_text(fs::path(cfg.out) / "fit.json", jfit.dump(2) + "\n");
    write_text(fs::path(cfg.out) / "curve.csv", curve.str());
    std::cout << "fit: " << (converged ? "converged" : "best effort (not converged)")
              << ", sse " << format_double(jfit["sse"].get<double>()) << ", outputs in "
              << cfg.out << "\n";
    return converged ? 0 : 2;
}

int cmd_roll(const RunConfig& cfg) {
    if (cfg.model != "lppl")
        throw std::invalid_argument("roll drives the lppl model; use --model lppl");
    auto data = load_data(cfg);
    FitConfig fc = cfg.fit;
    fc.space = space_of(cfg);

    auto sub = slice(data.series, data.window.start, data.window.end);
    std::size_t first_idx = sub.size() / 2;
    if (cfg.roll_first_end) {
        first_idx = sub.size();
        for (std::size_t i = 0; i < sub.size(); ++i)
            if (!(sub[i].date < *cfg.roll_first_end)) {
                first_idx = i;
                break;
            }
    }
    first_idx = std::max(first_idx, fc.min_points - 1);
    if (first_idx >= sub.size())
        throw std::invalid_argument("roll: no valid end dates in the window");
    if (cfg.roll_step_obs < 1)
        throw std::invalid_argument("roll: step_obs must be >= 1");

    std::vector<Date> ends;
    for (std::size_t i = first_idx; i < sub.size(); i += std::size_t(cfg.roll_step_obs))
        ends.push_back(sub[i].date);
    if (ends.back() != sub.back().date) ends.push_back(sub.back().date);

    RollingCurve curve = roll(data.series, data.window.start, ends, fc,
                              {cfg.roll_warm_start});
    StabilizationConfig stab_config = cfg.stabilization;
    stab_config.span = std::min(stab_config.span, curve.points.size());
    StabilizationReport stability;  // a one-point sweep has nothing to assess
    if (stab_config.span >= 2) stability = detect_stabilization(curve, stab_config);
    // Degenerate sweeps (down to a single end date) still produce an
    // extrapolation file; methods that need more points report that.
    ExtrapolationConfig extra_config = cfg.extrapolation;
    extra_config.min_converged = std::max<std::size_t>(
        1, std::min(extra_config.min_converged, curve.points.size()));
    ExtrapolationResult extrap = extrapolate(curve, extra_config);

    std::ostringstream curve_csv;
    write_rolling_csv(curve_csv, curve);

    json jstab = {{"stabilized", stability.stabilized},
                  {"onset", stability.onset ? json(stability.onset->to_iso()) : json(nullptr)},
                  {"trailing_dispersion_days", stability.trailing_dispersion_days},
                  {"asymptote_dispersion", stability.asymptote_dispersion},
                  {"lead_months", {{"low", stability.lead_low_months},
                                   {"high", stability.lead_high_months}}},
                  {"span", cfg.stabilization.span},
                  {"threshold_days", cfg.stabilization.dispersion_threshold_days}};

    json jmethods = json::array();
    for (const auto& m : extrap.methods) {
        json jm = {{"name", to_string(m.method)}, {"ok", m.ok}};
        if (m.ok) {
            jm["tc_decimal"] = m.estimate.value;
            jm["tc_date"] = from_decimal_year(m.estimate).to_iso();
        } else {
            jm["message"] = m.message;
        }
        jmethods.push_back(jm);
    }
    json jextrap = {{"methods", jmethods},
                    {"combined", {{"low_decimal", extrap.low.value},
                                  {"high_decimal", extrap.high.value},
                                  {"low_date", extrap.low_date.to_iso()},
                                  {"high_date", extrap.high_date.to_iso()}}},
                    {"inputs_digest", data.digest}};

    bool all_converged = true;
    for (const auto& p : curve.points) all_converged &= p.converged;

    fs::create_directories(cfg.out);
    write_text(fs::path(cfg.out) / "rolling.csv", curve_csv.str());
    write_text(fs::path(cfg.out) / "stability.json", jstab.dump(2) + "\n");
    write_text(fs::path(cfg.out) / "extrapolation.json", jextrap.dump(2) + "\n");
    std::cout << "roll: " << curve.points.size() << " end dates, critical time "
              << extrap.low_date.to_iso() << " .. " << extrap.high_date.to_iso()
              << (stability.stabilized ? " (stabilized)" : " (not stabilized)")
              << ", outputs in " << cfg.out << "\n";
    return all_converged ? 0 : 2;
}

int cmd_forecast(const RunConfig& cfg) {
    const fs::path out_dir(cfg.out);
    const fs::path extrap_path = out_dir / "extrapolation.json";
    const fs::path fit_path = out_dir / "fit.json";

    auto data = load_data(cfg);

    CrashForecast forecast;
    forecast.lead_months = cfg.lead_months;
    forecast.inputs_digest = data.digest;

    if (fs::exists(extrap_path)) {
        json jextrap;
        std::ifstream(extrap_path) >> jextrap;
        forecast.method = "lppl";
        forecast.tc_range = {DecimalYear{jextrap["combined"]["low_decimal"]},
                             DecimalYear{jextrap["combined"]["high_decimal"]}};
        std::ifstream roll_in(out_dir / "rolling.csv");
        if (!roll_in)
            throw std::invalid_argument("forecast: extrapolation.json without rolling.csv in "
                                        + cfg.out);
        auto points = read_rolling_csv(roll_in);
        std::vector<double> trailing;
        const std::size_t span = std::min(cfg.stabilization.span, points.size());
        for (std::size_t i = points.size() - span; i < points.size(); ++i)
            trailing.push_back(points[i].asymptote);
        forecast.real_prices = a_based_range(trailing);
    } else if (fs::exists(fit_path)) {
        json jfit;
        std::ifstream(fit_path) >> jfit;
        const std::string model = jfit["model"];
        forecast.method = model;
        if (model == "lppl") {
            const Space space = jfit["space"] == "log" ? Space::log_price : Space::price;
            LpplParams params = lppl_params_from_json(jfit["params"], space);
            forecast.tc_range = {params.critical_time, params.critical_time};
            DateRange window = crash_window(forecast.tc_range, forecast.lead_months);
            const double p1 = price_at_crash(params, to_decimal_year(window.start));
            const double p2 = price_at_crash(params, to_decimal_year(window.end));
            forecast.real_prices = {std::min(p1, p2), std::max(p1, p2)};
        } else {
            HyperOscParams params = hyper_params_from_json(jfit["params"]);
            forecast.tc_range = {params.osc_singularity, params.osc_singularity};
            DateRange window = crash_window(forecast.tc_range, forecast.lead_months);
            const double p1 = price_at_crash(params, to_decimal_year(window.start));
            const double p2 = price_at_crash(params, to_decimal_year(window.end));
            forecast.real_prices = {std::min(p1, p2), std::max(p1, p2)};
        }
    } else {
        throw std::invalid_argument("forecast: no prior results (extrapolation.json or fit.json) "
                                    "in " + cfg.out);
    }

    forecast.window = crash_window(forecast.tc_range, forecast.lead_months);

    if (data.deflator) {
        // "Current prices" use the most recent deflator entry.
        const YearMonth period = data.deflator->last_period();
        forecast.nominal_prices = {nominal_from_real(forecast.real_prices.low, *data.deflator,
                                                     period),
                                   nominal_from_real(forecast.real_prices.high, *data.deflator,
                                                     period)};
    } else {
        forecast.nominal_prices = forecast.real_prices;
    }

    json jforecast = {{"tc_low", forecast.tc_range.low.value},
                      {"tc_high", forecast.tc_range.high.value},
                      {"tc_low_date", from_decimal_year(forecast.tc_range.low).to_iso()},
                      {"tc_high_date", from_decimal_year(forecast.tc_range.high).to_iso()},
                      {"crash_window_start", forecast.window.start.to_iso()},
                      {"crash_window_end", forecast.window.end.to_iso()},
                      {"lead_months", forecast.lead_months},
                      {"real_price_low", forecast.real_prices.low},
                      {"real_price_high", forecast.real_prices.high},
                      {"nominal_price_low", forecast.nominal_prices.low},
                      {"nominal_price_high", forecast.nominal_prices.high},
                      {"method", forecast.method},
                      {"inputs_digest", forecast.inputs_digest}};

    std::ostringstream summary;
    summary << "The " << forecast.method << " fit places the critical time between "
            << from_decimal_year(forecast.tc_range.low).to_iso() << " and "
            << from_decimal_year(forecast.tc_range.high).to_iso() << " (decimal "
            << format_double(forecast.tc_range.low.value) << " to "
            << format_double(forecast.tc_range.high.value)
            << "). Shifting each bound earlier by " << format_double(forecast.lead_months)
            << " mean months gives an expected growth-cessation window of "
            << forecast.window.start.to_iso() << " to " << forecast.window.end.to_iso()
            << ". The estimated price level at cessation is "
            << format_double(forecast.real_prices.low) << " to "
            << format_double(forecast.real_prices.high) << " in the fitted (deflated) units, "
            << format_double(forecast.nominal_prices.low) << " to "
            << format_double(forecast.nominal_prices.high) << " in current prices.\n";

    fs::create_directories(cfg.out);
    write_text(out_dir / "forecast.json", jforecast.dump(2) + "\n");
    write_text(out_dir / "forecast_summary.txt", summary.str());
    std::cout << summary.str();
    return 0;
}

int cmd_synth(const RunConfig& cfg) {
    if (cfg.synth.is_null())
        throw std::invalid_argument("synth: config file must contain a \"synth\" block");
    const json& js = cfg.synth;

    SynthSpec spec;
    const std::string model = js.value("model", "lppl");
    const Space space = js.value("space", "price") == "log" ? Space::log_price : Space::price;
    if (model == "lppl") {
        LpplParams p = lppl_params_from_json(js.at("params"), space);
        spec.params = p;
    } else if (model == "hyper") {
        spec.params = hyper_params_from_json(js.at("params"));
    } else {
        throw std::invalid_argument("synth.model must be 'lppl' or 'hyper'");
    }
    const Date start = parse_date_or_throw(js.at("start"), "synth.start");
    const std::size_t count = js.at("count");
    const std::string calendar = js.value("calendar", "weekdays");
    if (calendar == "weekdays") {
        spec.dates = weekday_dates(start, count);
    } else if (calendar == "daily") {
        spec.dates.reserve(count);
        for (std::size_t i = 0; i < count; ++i) spec.dates.push_back(add_days(start, long(i)));
    } else {
        throw std::invalid_argument("synth.calendar must be 'weekdays' or 'daily'");
    }
    spec.noise_sigma = js.value("noise_sigma", 0.0);
    spec.seed = cfg.seed;

    PriceSeries series = synthesize(spec);
    std::ostringstream csv;
    write_price_csv(csv, series);

    fs::create_directories(cfg.out);
    const std::string name = js.value("output", "synth.csv");
    write_text(fs::path(cfg.out) / name, csv.str());
    std::cout << "synth: " << series.size() << " observations -> "
              << (fs::path(cfg.out) / name).string() << "\n";
    return 0;
}

int cmd_ingest(const RunConfig& cfg) {
    auto data = load_data(cfg);
    PriceSeries view = data.series;
    if (cfg.window_start || cfg.window_end)
        view = slice(data.series, data.window.start, data.window.end);
    write_price_csv(std::cout, view);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Log-periodic power law and hyperbolic bubble-model fitting"};
    app.require_subcommand(1);

    std::string config_path, input, deflator, window_start, window_end, space, model, out;
    std::optional<std::uint64_t> seed;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON run configuration");
        cmd->add_option("--input", input, "price CSV path");
        cmd->add_option("--deflator", deflator, "deflator CSV path");
        cmd->add_option("--window-start", window_start, "window start YYYY-MM-DD");
        cmd->add_option("--window-end", window_end, "window end YYYY-MM-DD");
        cmd->add_option("--space", space, "fit space: price|log");
        cmd->add_option("--model", model, "model: lppl|hyper");
        cmd->add_option("--out", out, "output directory");
        cmd->add_option("--seed", seed, "RNG seed for synth");
        return cmd;
    };

    auto* fit_cmd = add_common(app.add_subcommand("fit", "fit one window, write fit.json + curve.csv"));
    auto* roll_cmd = add_common(app.add_subcommand(
        "roll", "sweep end-of-observation dates, write rolling.csv + stability.json + extrapolation.json"));
    auto* forecast_cmd = add_common(app.add_subcommand(
        "forecast", "turn prior fit/roll outputs into forecast.json + summary"));
    auto* synth_cmd = add_common(app.add_subcommand("synth", "generate a synthetic price CSV"));
    auto* ingest_cmd = add_common(app.add_subcommand("ingest", "validate and echo normalized CSV"));

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (!input.empty()) cfg.input = input;
        if (!deflator.empty()) cfg.deflator = deflator;
        if (!window_start.empty())
            cfg.window_start = parse_date_or_throw(window_start, "--window-start");
        if (!window_end.empty())
            cfg.window_end = parse_date_or_throw(window_end, "--window-end");
        if (!space.empty()) cfg.space = space;
        if (!model.empty()) cfg.model = model;
        if (!out.empty()) cfg.out = out;
        if (seed) cfg.seed = *seed;
        // Flags participate in the provenance digest exactly like config keys.
        json overrides;
        if (!input.empty()) overrides["input"] = input;
        if (!window_start.empty()) overrides["window_start"] = window_start;
        if (!window_end.empty()) overrides["window_end"] = window_end;
        if (!space.empty()) overrides["space"] = space;
        if (!model.empty()) overrides["model"] = model;
        if (seed) overrides["seed"] = *seed;
        if (!overrides.is_null()) cfg.effective["cli_overrides"] = overrides;

        if (fit_cmd->parsed()) return cmd_fit(cfg);
        if (roll_cmd->parsed()) return cmd_roll(cfg);
        if (forecast_cmd->parsed()) return cmd_forecast(cfg);
        if (synth_cmd->parsed()) return cmd_synth(cfg);
        if (ingest_cmd->parsed()) return cmd_ingest(cfg);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
