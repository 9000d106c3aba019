#pragma once

#include <cstdint>
#include <string>

namespace gridshed {

/// A calendar timestamp at hour resolution, stored as whole hours since the
/// Unix epoch (local naive time, no timezone arithmetic).
struct HourStamp {
    std::int64_t hours = 0;

    HourStamp() = default;
    explicit HourStamp(std::int64_t h) : hours(h) {}

    HourStamp operator+(std::int64_t n) const { return HourStamp{hours + n}; }
    std::int64_t operator-(HourStamp other) const { return hours - other.hours; }
    bool operator==(const HourStamp&) const = default;

    /// Hour of day in [0, 24).
    int hour_of_day() const;
    /// Hour of week in [0, 168), week starting Monday 00:00.
    int hour_of_week() const;
};

/// Parse "YYYY-MM-DDTHH:00:00" (ISO-8601 local naive, hour resolution).
/// Minutes and seconds must be zero. Throws ParseError on malformed input.
HourStamp parse_hourstamp(const std::string& text);

/// Format back to "YYYY-MM-DDTHH:00:00".
std::string format_hourstamp(HourStamp t);

/// Days since 1970-01-01 for a civil date (proleptic Gregorian).
std::int64_t days_from_civil(int year, int month, int day);

/// Inverse of days_from_civil.
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

}  // namespace gridshed
