#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "windcurve/csv.hpp"
#include "windcurve/error.hpp"

namespace windcurve {

inline constexpr double kDefaultGridStep = 0.1;  // m/s
inline constexpr double kDefaultGridMax = 35.0;  // m/s
inline constexpr std::size_t kDefaultPoolSize = 10;

struct CurvePoint {
    double v_ms;
    double p_kw;
};

// Tabulated power curve. Power is zero outside [first, last] support point,
// which encodes cut-in and cut-out behaviour.
class PowerCurve {
public:
    PowerCurve() = default;

    PowerCurve(std::string id, std::vector<CurvePoint> points,
               std::optional<double> reference_height_m = std::nullopt)
        : id_(std::move(id)), points_(std::move(points)), reference_height_m_(reference_height_m) {
        if (points_.empty()) throw InvalidCurveError("curve '" + id_ + "' has no points");
        for (std::size_t i = 0; i < points_.size(); ++i) {
            const auto& p = points_[i];
            if (!std::isfinite(p.v_ms) || !std::isfinite(p.p_kw) || p.p_kw < 0 || p.v_ms < 0)
                throw InvalidCurveError("curve '" + id_ + "' has an invalid point");
            if (i > 0 && !(p.v_ms > points_[i - 1].v_ms))
                throw InvalidCurveError("curve '" + id_ + "' wind speeds are not increasing");
            peak_kw_ = std::max(peak_kw_, p.p_kw);
        }
    }

    const std::string& id() const { return id_; }
    const std::vector<CurvePoint>& points() const { return points_; }
    double peak_rating_kw() const { return peak_kw_; }
    std::optional<double> reference_height_m() const { return reference_height_m_; }
    double first_speed() const { return points_.front().v_ms; }
    double last_speed() const { return points_.back().v_ms; }

    double operator()(double v) const {
        if (std::isnan(v)) return v;
        constexpr double tol = 1e-9;
        const double lo = points_.front().v_ms;
        const double hi = points_.back().v_ms;
        if (v < lo - tol || v > hi + tol) return 0.0;
        if (v <= lo) return points_.front().p_kw;
        if (v >= hi) return points_.back().p_kw;
        auto it = std::upper_bound(points_.begin(), points_.end(), v,
                                   [](double x, const CurvePoint& p) { return x < p.v_ms; });
        const auto& b = *it;
        const auto& a = *(it - 1);
        const double u = (v - a.v_ms) / (b.v_ms - a.v_ms);
        return a.p_kw + u * (b.p_kw - a.p_kw);
    }

private:
    std::string id_;
    std::vector<CurvePoint> points_;
    std::optional<double> reference_height_m_;
    double peak_kw_ = 0.0;
};

// Dimensionless curve on a uniform wind-speed grid, values relative to the
// curve's own peak rating.
struct NormalizedPowerCurve {
    std::string id;
    double grid_start = 0.0;
    double grid_step = kDefaultGridStep;
    std::vector<double> values;

    double speed_at(std::size_t i) const { return grid_start + static_cast<double>(i) * grid_step; }

    double operator()(double v) const {
        if (std::isnan(v)) return v;
        const double pos = (v - grid_start) / grid_step;
        const double last = static_cast<double>(values.size() - 1);
        if (pos < -1e-9 || pos > last + 1e-9) return 0.0;
        if (values.size() == 1) return values[0];
        const double clamped = std::clamp(pos, 0.0, last);
        auto i = static_cast<std::size_t>(clamped);
        if (i >= values.size() - 1) i = values.size() - 2;
        const double u = clamped - static_cast<double>(i);
        return values[i] + u * (values[i + 1] - values[i]);
    }

    double sum() const { return std::accumulate(values.begin(), values.end(), 0.0); }
};

inline double evaluate_curve(const PowerCurve& c, double v) { return c(v); }
inline double evaluate_curve(const NormalizedPowerCurve& c, double v) { return c(v); }

// Linear resampling onto [0, max(grid_max, last support)] with spacing grid_step.
inline PowerCurve resample_curve(const PowerCurve& c, double grid_step = kDefaultGridStep,
                                 double grid_max = kDefaultGridMax) {
    if (!(grid_step > 0)) throw ParameterError("grid step must be positive");
    const double top = std::max(grid_max, c.last_speed());
    const auto n = static_cast<std::size_t>(std::ceil(top / grid_step - 1e-9)) + 1;
    std::vector<CurvePoint> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(i) * grid_step;
        pts[i] = {v, c(v)};
    }
    return PowerCurve(c.id(), std::move(pts), c.reference_height_m());
}

// Divides by the curve's peak rating. Requires uniformly spaced points
// (resample first).
inline NormalizedPowerCurve normalize_curve(const PowerCurve& c) {
    const double peak = c.peak_rating_kw();
    if (!(peak > 0)) throw NormalizationError("curve '" + c.id() + "' has zero peak rating");
    const auto& pts = c.points();
    NormalizedPowerCurve out;
    out.id = c.id();
    out.grid_start = pts.front().v_ms;
    out.grid_step = pts.size() > 1 ? pts[1].v_ms - pts[0].v_ms : kDefaultGridStep;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double expected = out.grid_start + static_cast<double>(i) * out.grid_step;
        if (std::abs(pts[i].v_ms - expected) > 1e-9 * std::max(1.0, expected))
            throw NormalizationError("curve '" + c.id() + "' is not on a uniform grid");
    }
    out.values.reserve(pts.size());
    for (const auto& p : pts) out.values.push_back(p.p_kw / peak);
    return out;
}

// Back to kW on the normalized curve's grid.
inline PowerCurve denormalize(const NormalizedPowerCurve& c, double peak_rating_kw) {
    std::vector<CurvePoint> pts(c.values.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        pts[i] = {c.speed_at(i), c.values[i] * peak_rating_kw};
    return PowerCurve(c.id, std::move(pts));
}

struct CurvePool {
    std::vector<NormalizedPowerCurve> curves;

    std::size_t size() const { return curves.size(); }

    std::vector<std::string> ids() const {
        std::vector<std::string> out;
        for (const auto& c : curves) out.push_back(c.id);
        return out;
    }
};

// Diversity-preserving pool: sort by total normalized power (ties by id), then
// keep pool_size curves at equally spaced ranks, always including both ends.
inline CurvePool select_pool(std::vector<NormalizedPowerCurve> curves,
                             std::size_t pool_size = kDefaultPoolSize) {
    if (curves.empty()) throw ParameterError("curve list is empty");
    if (pool_size == 0) throw ParameterError("pool size must be at least 1");
    {
        std::set<std::string> seen;
        for (const auto& c : curves)
            if (!seen.insert(c.id).second) throw ParameterError("duplicate curve id '" + c.id + "'");
    }
    std::vector<std::pair<double, std::size_t>> keyed;
    for (std::size_t i = 0; i < curves.size(); ++i) keyed.emplace_back(curves[i].sum(), i);
    std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first < b.first;
        return curves[a.second].id < curves[b.second].id;
    });
    CurvePool pool;
    const std::size_t n = curves.size();
    if (n <= pool_size) {
        for (const auto& [s, i] : keyed) pool.curves.push_back(std::move(curves[i]));
        return pool;
    }
    if (pool_size < 2) throw ParameterError("pool size must be at least 2 when selecting");
    const std::size_t m1 = pool_size - 1;
    for (std::size_t i = 0; i < pool_size; ++i) {
        // round(i*(n-1)/(m-1)), halves rounded up, in exact integer arithmetic
        const std::size_t rank = (2 * i * (n - 1) + m1) / (2 * m1);
        pool.curves.push_back(curves[keyed[rank].second]);
    }
    return pool;
}

struct CurveLibrary {
    std::vector<PowerCurve> curves;
    std::size_t skipped = 0;  // entries without a complete curve
    std::vector<std::string> skipped_ids;

    const PowerCurve& find(const std::string& id) const {
        for (const auto& c : curves)
            if (c.id() == id) return c;
        throw ConfigError("curve '" + id + "' not found in library");
    }
};

namespace detail {

struct PendingCurve {
    std::vector<CurvePoint> points;
    bool incomplete = false;
};

inline void add_point(PendingCurve& e, const std::string& id, const std::string& vs,
                      const std::string& ps, std::size_t line, const std::string& origin) {
    if (vs.empty() || ps.empty()) {
        e.incomplete = true;
        return;
    }
    const double v = csv::parse_number(vs, line, origin);
    const double p = csv::parse_number(ps, line, origin);
    if (!std::isfinite(v) || !std::isfinite(p) || v < 0 || p < 0)
        throw ParseError(origin + ": invalid point for curve '" + id + "'", line);
    if (!e.points.empty() && !(v > e.points.back().v_ms))
        throw ParseError(origin + ": wind speeds of curve '" + id + "' are not increasing", line);
    e.points.push_back({v, p});
}

inline void finish(CurveLibrary& lib, const std::string& id, const PendingCurve& e) {
    if (e.incomplete || e.points.empty()) {
        ++lib.skipped;
        lib.skipped_ids.push_back(id);
        return;
    }
    lib.curves.emplace_back(id, e.points);
}

}  // namespace detail

// Reads either a long-format file (id,v_ms,p_kw; one row per point) or a
// directory holding one v_ms,p_kw file per curve, named <id>.csv. Entries
// without a complete curve are skipped and counted.
inline CurveLibrary parse_curve_library(const std::filesystem::path& path) {
    CurveLibrary lib;
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(path))
            if (entry.path().extension() == ".csv") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const auto t = csv::read(f);
            const int cv = t.require_column("v_ms", f.string());
            const int cp = t.require_column("p_kw", f.string());
            const std::string id = f.stem().string();
            detail::PendingCurve e;
            for (const auto& r : t.rows)
                detail::add_point(e, id, r.cells[cv], r.cells[cp], r.line, f.string());
            detail::finish(lib, id, e);
        }
        return lib;
    }
    const auto t = csv::read(path);
    const auto origin = path.string();
    const int ci = t.require_column("id", origin);
    const int cv = t.require_column("v_ms", origin);
    const int cp = t.require_column("p_kw", origin);
    std::vector<std::string> order;
    std::map<std::string, detail::PendingCurve> pending;
    for (const auto& r : t.rows) {
        const auto& id = r.cells[ci];
        if (id.empty()) throw ParseError(origin + ": empty curve id", r.line);
        auto [it, inserted] = pending.try_emplace(id);
        if (inserted) order.push_back(id);
        detail::add_point(it->second, id, r.cells[cv], r.cells[cp], r.line, origin);
    }
    for (const auto& id : order) detail::finish(lib, id, pending[id]);
    return lib;
}

// Resample + normalize every library curve onto the shared grid.
inline std::vector<NormalizedPowerCurve> normalize_library(const CurveLibrary& lib,
                                                           double grid_step = kDefaultGridStep,
                                                           double grid_max = kDefaultGridMax) {
    std::vector<NormalizedPowerCurve> out;
    out.reserve(lib.curves.size());
    for (const auto& c : lib.curves) out.push_back(normalize_curve(resample_curve(c, grid_step, grid_max)));
    return out;
}

}  // namespace windcurve
