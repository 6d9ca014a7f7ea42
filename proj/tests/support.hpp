#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "windcurve/windcurve.hpp"

namespace testsupport {

using namespace windcurve;

inline const std::vector<NormalizedPowerCurve>& fixture_library() {
    static const auto lib = normalize_library(parse_curve_library(WINDCURVE_DATA_DIR "/curve_library.csv"));
    return lib;
}

inline const CurveLibrary& fixture_curves() {
    static const auto lib = parse_curve_library(WINDCURVE_DATA_DIR "/curve_library.csv");
    return lib;
}

inline std::vector<Timestamp> quarter_hours(Timestamp start, std::size_t n) {
    std::vector<Timestamp> ts(n);
    for (std::size_t i = 0; i < n; ++i) ts[i] = start + static_cast<std::int64_t>(i) * kQuarterHour;
    return ts;
}

inline WeatherForecastFrame weather_frame(const std::vector<Timestamp>& ts, const std::vector<double>& v100) {
    WeatherForecastFrame w;
    w.timestamps = ts;
    w.v100 = v100;
    w.v10.assign(ts.size(), kMissing);
    w.direction_deg.assign(ts.size(), 180.0);
    w.temperature_c.assign(ts.size(), 10.0);
    w.pressure_hpa.assign(ts.size(), 1013.0);
    return w;
}

// Dataset from explicit power / hub / v100 columns, all rows tagged Train.
inline AlignedDataset make_dataset(const std::vector<Timestamp>& ts, const std::vector<double>& power,
                                   const std::vector<double>& hub, const std::vector<double>& v100,
                                   double peak = 1500.0) {
    return align(PowerSeries(ts, power, peak), HubWindSeries(ts, hub), weather_frame(ts, v100));
}

// Simple synthetic generator config on an explicit curve.
inline SynthConfig small_synth(std::uint64_t seed, int days) {
    SynthConfig c;
    c.seed = seed;
    c.days = days;
    c.curve.points = {{2.5, 10.0}, {3.0, 20.0}, {6.0, 400.0}, {9.0, 1100.0}, {12.0, 1500.0}, {35.0, 1500.0}};
    return c;
}

// Textbook LOF by exhaustive search: z-score both features, take the k
// nearest other points (ties by index), reach-dist = max(k-dist(o), d(p,o)).
inline std::vector<double> reference_lof(const std::vector<Point2>& raw, std::size_t k) {
    const std::size_t n = raw.size();
    std::array<double, 2> mean{}, sd{};
    for (std::size_t d = 0; d < 2; ++d) {
        for (const auto& p : raw) mean[d] += p[d];
        mean[d] /= static_cast<double>(n);
        for (const auto& p : raw) sd[d] += (p[d] - mean[d]) * (p[d] - mean[d]);
        sd[d] = std::sqrt(sd[d] / static_cast<double>(n));
        if (sd[d] == 0) sd[d] = 1;
    }
    std::vector<Point2> z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = {(raw[i][0] - mean[0]) / sd[0], (raw[i][1] - mean[1]) / sd[1]};
    auto dist = [&](std::size_t a, std::size_t b) { return std::hypot(z[a][0] - z[b][0], z[a][1] - z[b][1]); };

    std::vector<std::vector<std::size_t>> nb(n);
    std::vector<double> kdist(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) all.emplace_back(dist(i, j), j);
        std::sort(all.begin(), all.end());
        for (std::size_t m = 0; m < k; ++m) nb[i].push_back(all[m].second);
        kdist[i] = all[k - 1].first;
    }
    std::vector<double> lrd(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (auto o : nb[i]) s += std::max(kdist[o], dist(i, o));
        lrd[i] = 1.0 / (s / static_cast<double>(k));
    }
    std::vector<double> lof(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0;
        for (auto o : nb[i]) s += lrd[o];
        lof[i] = s / static_cast<double>(k) / lrd[i];
    }
    return lof;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("windcurve_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline void write_file(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary);
    out << content;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace testsupport
