#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "windcurve/error.hpp"
#include "windcurve/time.hpp"

namespace windcurve {

enum class MaskFlag : std::uint8_t {
    Normal = 0,
    RuleShutdown = 1,
    LofOutlier = 2,
    Combined = 3,  // flagged by both detectors
};

inline MaskFlag operator|(MaskFlag a, MaskFlag b) {
    return static_cast<MaskFlag>(static_cast<std::uint8_t>(a) | static_cast<std::uint8_t>(b));
}

inline bool is_flagged(MaskFlag f) { return f != MaskFlag::Normal; }

inline std::string_view to_string(MaskFlag f) {
    switch (f) {
        case MaskFlag::Normal: return "normal";
        case MaskFlag::RuleShutdown: return "rule_shutdown";
        case MaskFlag::LofOutlier: return "lof_outlier";
        case MaskFlag::Combined: return "combined";
    }
    return "normal";
}

inline MaskFlag mask_flag_from_string(std::string_view s) {
    if (s == "normal") return MaskFlag::Normal;
    if (s == "rule_shutdown") return MaskFlag::RuleShutdown;
    if (s == "lof_outlier") return MaskFlag::LofOutlier;
    if (s == "combined") return MaskFlag::Combined;
    throw SchemaError("unknown mask flag '" + std::string(s) + "'");
}

// Per-timestamp abnormal-operation labels. `source` names the detector(s)
// that produced the mask, e.g. "rule", "lof", "rule+lof", "truth".
struct ShutdownMask {
    std::vector<Timestamp> timestamps;
    std::vector<MaskFlag> flags;
    std::string source;

    std::size_t size() const { return flags.size(); }
    bool flagged(std::size_t i) const { return is_flagged(flags[i]); }

    std::size_t flagged_count() const {
        std::size_t n = 0;
        for (auto f : flags) n += is_flagged(f) ? 1 : 0;
        return n;
    }

    static ShutdownMask empty(std::vector<Timestamp> ts, std::string source = "none") {
        ShutdownMask m{std::move(ts), {}, std::move(source)};
        m.flags.assign(m.timestamps.size(), MaskFlag::Normal);
        return m;
    }
};

inline void require_aligned(const ShutdownMask& m, const std::vector<Timestamp>& ts) {
    if (m.timestamps != ts) throw MisalignedError("shutdown mask is not aligned with the dataset");
}

}  // namespace windcurve
