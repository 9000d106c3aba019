#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "gridshed/core/time.hpp"

namespace gridshed {

/// Timestamped hourly energy sequence (kWh). Entry i belongs to start + i.
/// A missing reading is an explicit gap marker (NaN), never a silent zero.
struct HourlySeries {
    HourStamp start;
    std::vector<double> values;

    static double gap_marker() { return std::numeric_limits<double>::quiet_NaN(); }
    static bool is_gap_value(double v) { return std::isnan(v); }

    std::size_t size() const { return values.size(); }
    bool is_gap(std::size_t i) const { return is_gap_value(values[i]); }
    HourStamp stamp_at(std::size_t i) const { return start + static_cast<std::int64_t>(i); }

    std::size_t gap_count() const;

    /// Enforces the type invariants: length >= 1, no negative entries.
    /// Throws ValidationError on violation.
    void validate() const;
};

}  // namespace gridshed
