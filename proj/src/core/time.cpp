#include "gridshed/core/time.hpp"

#include <cstdio>

#include "gridshed/core/errors.hpp"

namespace gridshed {

std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    year = static_cast<int>(y + (month <= 2));
}

int HourStamp::hour_of_day() const {
    return static_cast<int>(((hours % 24) + 24) % 24);
}

int HourStamp::hour_of_week() const {
    // 1970-01-01 was a Thursday; shift so index 0 is Monday 00:00.
    const std::int64_t shifted = hours + 3 * 24;
    return static_cast<int>(((shifted % 168) + 168) % 168);
}

HourStamp parse_hourstamp(const std::string& text) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char sep = 0;
    if (std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s) != 7 ||
        (sep != 'T' && sep != ' ')) {
        throw ParseError("bad timestamp '" + text + "' (expected YYYY-MM-DDTHH:00:00)");
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23) {
        throw ParseError("timestamp fields out of range in '" + text + "'");
    }
    if (mi != 0 || s != 0) {
        throw ParseError("sub-hour timestamp '" + text + "' (hour resolution required)");
    }
    return HourStamp{days_from_civil(y, mo, d) * 24 + h};
}

std::string format_hourstamp(HourStamp t) {
    const std::int64_t days = (t.hours >= 0 ? t.hours : t.hours - 23) / 24;
    const int hod = t.hour_of_day();
    int y = 0, m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00", y, m, d, hod);
    return buf;
}

}  // namespace gridshed
