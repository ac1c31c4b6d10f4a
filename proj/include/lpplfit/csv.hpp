#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lpplfit/series.hpp"
#include "lpplfit/text.hpp"

namespace lpplfit {

struct CsvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Column names for the price CSV; overridable from the run config.
struct CsvColumns {
    std::string date = "date";
    std::string price = "price";
};

struct RejectedRow {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string reason;
};

struct PriceCsvResult {
    PriceSeries series;
    std::vector<RejectedRow> rejected;
};

namespace detail {

inline std::vector<std::string> read_header(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw CsvError("empty file");
    std::vector<std::string> names;
    for (auto f : split(line, ','))
        names.emplace_back(trim(f));
    return names;
}

inline std::size_t column_of(const std::vector<std::string>& header, const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw CsvError("missing column '" + name + "'");
}

}  // namespace detail

/// Parses a price CSV with a header row. Rows with unparseable dates or
/// non-positive prices are collected with their line numbers rather than
/// silently dropped; duplicate dates among valid rows are a hard error
/// because fit results are sensitive to data extent.
inline PriceCsvResult parse_price_csv(std::istream& in, const CsvColumns& columns = {}) {
    auto header = detail::read_header(in);
    const std::size_t date_col = detail::column_of(header, columns.date);
    const std::size_t price_col = detail::column_of(header, columns.price);

    std::vector<Observation> rows;
    std::vector<RejectedRow> rejected;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() <= std::max(date_col, price_col)) {
            rejected.push_back({line_no, "too few fields"});
            continue;
        }
        auto date = Date::parse_iso(trim(fields[date_col]));
        if (!date) {
            rejected.push_back({line_no, "unparseable date '" + std::string(trim(fields[date_col])) + "'"});
            continue;
        }
        auto price = parse_double_strict(trim(fields[price_col]));
        if (!price) {
            rejected.push_back({line_no, "unparseable price '" + std::string(trim(fields[price_col])) + "'"});
            continue;
        }
        if (!(*price > 0.0)) {
            rejected.push_back({line_no, "non-positive price at " + date->to_iso()});
            continue;
        }
        rows.push_back({*date, *price});
    }
    if (rows.empty())
        throw CsvError(rejected.empty() ? "no data rows" : "all rows rejected");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Observation& a, const Observation& b) { return a.date < b.date; });
    std::string dups;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].date == rows[i - 1].date && (dups.empty() || !dups.ends_with(rows[i].date.to_iso())))
            dups += (dups.empty() ? "" : ", ") + rows[i].date.to_iso();
    if (!dups.empty())
        throw CsvError("duplicate dates: " + dups);

    return {PriceSeries(std::move(rows), Basis::nominal()), std::move(rejected)};
}

/// Deflator CSV: header row with columns `period` (YYYY-MM) and `index`.
inline std::vector<DeflatorEntry> parse_deflator_csv(std::istream& in) {
    auto header = detail::read_header(in);
    const std::size_t period_col = detail::column_of(header, "period");
    const std::size_t index_col = detail::column_of(header, "index");

    std::vector<DeflatorEntry> entries;
    std::string line;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split(line, ',');
        if (fields.size() <= std::max(period_col, index_col))
            throw CsvError("line " + std::to_string(line_no) + ": too few fields");
        auto period = YearMonth::parse(trim(fields[period_col]));
        if (!period)
            throw CsvError("line " + std::to_string(line_no) + ": unparseable period");
        auto index = parse_double_strict(trim(fields[index_col]));
        if (!index)
            throw CsvError("line " + std::to_string(line_no) + ": unparseable index");
        entries.push_back({*period, *index});
    }
    if (entries.empty())
        throw CsvError("no deflator rows");
    return entries;
}

inline void write_price_csv(std::ostream& out, const PriceSeries& series) {
    out << "date,price\n";
    for (const auto& o : series)
        out << o.date.to_iso() << ',' << format_double(o.price) << '\n';
}

}  // namespace lpplfit
