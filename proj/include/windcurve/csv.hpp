#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "windcurve/error.hpp"
#include "windcurve/mask.hpp"
#include "windcurve/series.hpp"
#include "windcurve/time.hpp"

namespace windcurve::csv {

struct Row {
    std::size_t line;  // 1-based line in the source file
    std::vector<std::string> cells;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Row> rows;

    // Position of a named column, or -1.
    int column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return static_cast<int>(i);
        return -1;
    }

    int require_column(std::string_view name, const std::string& origin) const {
        const int c = column(name);
        if (c < 0) throw ParseError(origin + ": missing column '" + std::string(name) + "'", 1);
        return c;
    }
};

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

inline Table parse(std::istream& in, const std::string& origin) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0)
            line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError(origin + ": expected " + std::to_string(t.header.size()) +
                                 " fields, found " + std::to_string(cells.size()),
                             lineno);
        t.rows.push_back({lineno, std::move(cells)});
    }
    if (t.header.empty()) throw ParseError(origin + ": file has no header row", 1);
    return t;
}

inline Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    return parse(in, path.string());
}

// Empty cell -> missing. Anything else must be a complete decimal number.
inline double parse_number(const std::string& cell, std::size_t line, const std::string& origin) {
    if (cell.empty() || cell == "NaN" || cell == "nan") return kMissing;
    double v = 0;
    const char* first = cell.data();
    if (*first == '+') ++first;
    auto [p, ec] = std::from_chars(first, cell.data() + cell.size(), v);
    if (ec != std::errc{} || p != cell.data() + cell.size())
        throw ParseError(origin + ": not a number: '" + cell + "'", line);
    return v;
}

inline Timestamp parse_time(const std::string& cell, std::size_t line, const std::string& origin) {
    try {
        return parse_iso8601(cell);
    } catch (const InvalidSeriesError& e) {
        throw ParseError(origin + ": " + e.what(), line);
    }
}

// Fixed 9-significant-digit rendering; missing values render as an empty cell.
inline std::string format_number(double v) {
    if (is_missing(v)) return "";
    if (v == 0.0) return "0";
    std::array<char, 40> buf{};
    std::snprintf(buf.data(), buf.size(), "%.9g", v);
    return buf.data();
}

// Writes through a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot move '" + tmp.string() + "' to '" + path.string() + "'");
}

namespace detail {

inline std::pair<std::vector<Timestamp>, std::vector<double>> read_two_columns(
    const std::filesystem::path& path, std::string_view value_column) {
    const auto t = read(path);
    const auto origin = path.string();
    const int ct = t.require_column("timestamp", origin);
    const int cv = t.require_column(value_column, origin);
    std::vector<Timestamp> ts;
    std::vector<double> vs;
    ts.reserve(t.rows.size());
    vs.reserve(t.rows.size());
    for (const auto& r : t.rows) {
        ts.push_back(parse_time(r.cells[ct], r.line, origin));
        vs.push_back(parse_number(r.cells[cv], r.line, origin));
    }
    return {std::move(ts), std::move(vs)};
}

}  // namespace detail

inline EnergySeries read_energy(const std::filesystem::path& path,
                                std::int64_t period_s = kQuarterHour) {
    auto [ts, vs] = detail::read_two_columns(path, "energy_kwh");
    return EnergySeries(std::move(ts), std::move(vs), period_s);
}

inline PowerSeries read_power(const std::filesystem::path& path, double peak_rating_kw,
                              std::int64_t period_s = kQuarterHour) {
    auto [ts, vs] = detail::read_two_columns(path, "power_kw");
    return PowerSeries(std::move(ts), std::move(vs), peak_rating_kw, period_s);
}

inline HubWindSeries read_hub_wind(const std::filesystem::path& path,
                                   std::int64_t period_s = kQuarterHour) {
    auto [ts, vs] = detail::read_two_columns(path, "wind_ms");
    return HubWindSeries(std::move(ts), std::move(vs), period_s);
}

inline WeatherForecastFrame read_weather(const std::filesystem::path& path,
                                         std::int64_t period_s = kQuarterHour) {
    const auto t = read(path);
    const auto origin = path.string();
    const int ct = t.require_column("timestamp", origin);
    const int c100 = t.require_column("v100_ms", origin);
    const int c10 = t.column("v10_ms");
    const int cdir = t.require_column("dir_deg", origin);
    const int ctemp = t.require_column("temp_c", origin);
    const int cpres = t.require_column("pressure_hpa", origin);
    WeatherForecastFrame w;
    w.period_s = period_s;
    for (const auto& r : t.rows) {
        w.timestamps.push_back(parse_time(r.cells[ct], r.line, origin));
        w.v100.push_back(parse_number(r.cells[c100], r.line, origin));
        w.v10.push_back(c10 < 0 ? kMissing : parse_number(r.cells[c10], r.line, origin));
        w.direction_deg.push_back(parse_number(r.cells[cdir], r.line, origin));
        w.temperature_c.push_back(parse_number(r.cells[ctemp], r.line, origin));
        w.pressure_hpa.push_back(parse_number(r.cells[cpres], r.line, origin));
    }
    w.validate();
    return w;
}

inline std::string render_two_columns(const std::vector<Timestamp>& ts,
                                      const std::vector<double>& vs, std::string_view name) {
    std::ostringstream out;
    out << "timestamp," << name << '\n';
    for (std::size_t i = 0; i < ts.size(); ++i)
        out << format_iso8601(ts[i]) << ',' << format_number(vs[i]) << '\n';
    return out.str();
}

inline std::string render_weather(const WeatherForecastFrame& w) {
    std::ostringstream out;
    out << "timestamp,v100_ms,v10_ms,dir_deg,temp_c,pressure_hpa\n";
    for (std::size_t i = 0; i < w.size(); ++i)
        out << format_iso8601(w.timestamps[i]) << ',' << format_number(w.v100[i]) << ','
            << format_number(w.v10[i]) << ',' << format_number(w.direction_deg[i]) << ','
            << format_number(w.temperature_c[i]) << ',' << format_number(w.pressure_hpa[i])
            << '\n';
    return out.str();
}

// Mask export: timestamp,flag,source
inline std::string render_mask(const ShutdownMask& m) {
    std::ostringstream out;
    out << "timestamp,flag,source\n";
    for (std::size_t i = 0; i < m.size(); ++i)
        out << format_iso8601(m.timestamps[i]) << ',' << to_string(m.flags[i]) << ',' << m.source
            << '\n';
    return out.str();
}

inline ShutdownMask read_mask(const std::filesystem::path& path) {
    const auto t = read(path);
    const auto origin = path.string();
    const int ct = t.require_column("timestamp", origin);
    const int cf = t.require_column("flag", origin);
    const int cs = t.column("source");
    ShutdownMask m;
    for (const auto& r : t.rows) {
        m.timestamps.push_back(parse_time(r.cells[ct], r.line, origin));
        try {
            m.flags.push_back(mask_flag_from_string(r.cells[cf]));
        } catch (const SchemaError& e) {
            throw ParseError(origin + ": " + e.what(), r.line);
        }
        if (cs >= 0 && m.source.empty()) m.source = r.cells[cs];
    }
    return m;
}

}  // namespace windcurve::csv
