#include "gridshed/core/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"

namespace gridshed {

namespace {

struct BuildingProfile {
    int group = 0;
    double scale = 1.0;          // overall kWh level
    double morning_shift = 0.0;  // template peak jitter, hours
    double amp_a = 1.0;          // first-peak amplitude multiplier
    double amp_b = 1.0;          // second-peak amplitude multiplier
    double mix = 0.0;            // hostel-to-library morph (middle group only)
    std::vector<int> spike_hours;
};

double gauss_bump(double h, double center, double width) {
    // Wrap the hour axis so late-evening peaks spill over midnight cleanly.
    double d = std::fabs(h - center);
    d = std::min(d, 24.0 - d);
    return std::exp(-(d * d) / (width * width));
}

/// Normalized diurnal template for one group (before scale and noise).
double template_value(const BuildingProfile& p, int hour_of_day, bool weekend, bool holiday) {
    const double h = static_cast<double>(hour_of_day);
    double v = 0.0;
    switch (p.group % 3) {
        case 0:  // high office-hours peak
            v = 0.22 + 0.78 * p.amp_a * gauss_bump(h, 13.0 + p.morning_shift, 3.6);
            if (weekend) v *= 0.55;
            if (holiday) v *= 0.50;
            break;
        case 1: {  // heterogeneous middle band: hostel double peak morphing
                   // into a library-style midday block per building
            const double hostel = 0.30 + 0.45 * p.amp_a * gauss_bump(h, 7.0 + p.morning_shift, 1.9) +
                                  0.60 * p.amp_b * gauss_bump(h, 20.0 + p.morning_shift, 2.4);
            const double library = 0.28 + 0.72 * p.amp_a * gauss_bump(h, 12.5 + p.morning_shift, 4.2);
            v = (1.0 - p.mix) * hostel + p.mix * library;
            if (weekend) v *= 1.10 - 0.45 * p.mix;
            if (holiday) v *= 0.85;
            break;
        }
        default: {  // low, irregular: flat base; the busier mixed-use tail
                    // behaves increasingly like the hostel band
            const double flat = 0.26 + 0.08 * p.amp_a *
                                    std::sin(2.0 * M_PI * h / 24.0 + p.morning_shift * 2.0);
            const double hostel_like =
                0.30 + 0.45 * gauss_bump(h, 7.0, 1.9) + 0.60 * gauss_bump(h, 20.0, 2.4);
            v = (1.0 - p.mix) * flat + p.mix * hostel_like;
            break;
        }
    }
    return v;
}

// kWh level per group, scale spreads, and how far the mixed-use tail of the
// low group drifts toward hostel-like behavior.
constexpr double kLibraryMix = 0.5;
constexpr double kMixedUseDrift = 0.3;
constexpr double kLowScaleHigh = 1.8;

double group_level(int group) {
    switch (group % 3) {
        case 0: return 60.0;
        case 1: return 22.0;
        default: return 6.0;
    }
}

/// Two-appliance inventory approximating the building's weekday profile:
/// a round-the-clock baseload and a scheduled block covering the peak hours.
ApplianceInventory make_inventory(const std::string& id, const BuildingProfile& p) {
    double profile[24];
    double lo = 1e300, hi = -1e300;
    for (int h = 0; h < 24; ++h) {
        profile[h] = p.scale * template_value(p, h, false, false);
        lo = std::min(lo, profile[h]);
        hi = std::max(hi, profile[h]);
    }

    ApplianceInventory inv;
    inv.building_id = id;

    Appliance base;
    base.name = "baseload";
    base.count = 1;
    base.rated_kw = std::max(lo, 1e-3);
    base.schedule.fill(1);
    inv.appliances.push_back(base);

    if (hi - lo > 0.05 * hi) {
        Appliance peak;
        peak.name = "scheduled";
        peak.count = 1 + p.group % 3;
        const double threshold = lo + 0.5 * (hi - lo);
        double above = 0.0;
        int on_hours = 0;
        for (int h = 0; h < 24; ++h) {
            if (profile[h] >= threshold) {
                peak.schedule[h] = 1;
                above += profile[h] - lo;
                ++on_hours;
            }
        }
        if (on_hours > 0) {
            peak.rated_kw = std::max(above / on_hours / peak.count, 1e-3);
            inv.appliances.push_back(peak);
        }
    }
    return inv;
}

bool is_holiday_day(int day, int n_days) {
    // Two fixed academic-break blocks, present when the span reaches them.
    (void)n_days;
    return (day >= 45 && day < 53) || (day >= 110 && day < 118);
}

}  // namespace

std::vector<int> planted_labels(const std::vector<int>& cluster_sizes) {
    std::vector<int> labels;
    for (std::size_t g = 0; g < cluster_sizes.size(); ++g) {
        for (int i = 0; i < cluster_sizes[g]; ++i) labels.push_back(static_cast<int>(g));
    }
    return labels;
}

SyntheticCampus generate_synthetic_campus(const SyntheticOptions& options) {
    const int total = std::accumulate(options.cluster_sizes.begin(),
                                      options.cluster_sizes.end(), 0);
    if (total != options.n_buildings) {
        throw ArgumentError("cluster_sizes sum to " + std::to_string(total) +
                            ", expected n_buildings = " + std::to_string(options.n_buildings));
    }
    if (options.n_hours < 48) {
        throw ArgumentError("n_hours must be >= 48");
    }
    if (options.gap_rate < 0.0 || options.gap_rate >= 1.0) {
        throw ArgumentError("gap_rate must be in [0, 1)");
    }

    Rng rng(derive_seed(options.seed, "synthetic-campus"));
    const std::vector<int> groups = planted_labels(options.cluster_sizes);
    const int n = options.n_buildings;
    const int hours = options.n_hours;

    // Per-building constants, drawn in building order.
    std::vector<BuildingProfile> profiles(n);
    for (int b = 0; b < n; ++b) {
        BuildingProfile& p = profiles[b];
        p.group = groups[static_cast<std::size_t>(b)];
        switch (p.group % 3) {
            case 0: p.scale = group_level(0) * rng.uniform(0.85, 1.15); break;
            case 1: p.scale = group_level(1) * rng.uniform(0.80, 1.20); break;
            default: p.scale = group_level(2) * rng.uniform(0.40, kLowScaleHigh); break;
        }
        p.morning_shift = rng.uniform(-0.8, 0.8);
        p.amp_a = rng.uniform(0.85, 1.15);
        p.amp_b = rng.uniform(0.85, 1.15);
        // The middle band mixes hostel-like and library-like behavior.
        if (p.group % 3 == 1) {
            p.mix = rng.uniform(0.0, kLibraryMix);
        } else if (p.group % 3 == 2) {
            // Busier mixed-use buildings are both larger and peakier.
            p.mix = kMixedUseDrift * (p.scale / group_level(2) - 0.4) /
                    (kLowScaleHigh - 0.4);
        }
        if (p.group % 3 == 2) {
            const int n_spikes = 3 + static_cast<int>(rng.uniform_index(3));
            for (int s = 0; s < n_spikes; ++s) {
                p.spike_hours.push_back(static_cast<int>(rng.uniform_index(24)));
            }
        }
    }

    SyntheticCampus out;
    out.planted = groups;
    out.building_series.resize(hours, n);
    CampusDataset& dataset = out.dataset;
    dataset.feeder.start = parse_hourstamp("2024-01-01T00:00:00");  // a Monday
    dataset.feeder.values.resize(static_cast<std::size_t>(hours));
    dataset.calendar.resize(static_cast<std::size_t>(hours));

    // Spike days for the irregular group, one deterministic draw per day per building.
    const int n_days = (hours + 23) / 24;
    std::vector<std::vector<std::uint8_t>> spike_day(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        spike_day[b].resize(static_cast<std::size_t>(n_days), 0);
        if (profiles[b].group % 3 == 2) {
            for (int d = 0; d < n_days; ++d) {
                spike_day[b][d] = rng.uniform() < 0.40 ? 1 : 0;
            }
        }
    }

    for (int t = 0; t < hours; ++t) {
        const HourStamp stamp = dataset.feeder.stamp_at(static_cast<std::size_t>(t));
        const int hod = stamp.hour_of_day();
        const int how = stamp.hour_of_week();
        const bool weekend = how >= 5 * 24;
        const int day = t / 24;
        const bool holiday = is_holiday_day(day, n_days);
        dataset.calendar[static_cast<std::size_t>(t)] = holiday ? 1 : 0;

        double sum = 0.0;
        for (int b = 0; b < n; ++b) {
            const BuildingProfile& p = profiles[b];
            double v = p.scale * template_value(p, hod, weekend, holiday);
            if (p.group % 3 == 2 && spike_day[b][day] &&
                std::find(p.spike_hours.begin(), p.spike_hours.end(), hod) !=
                    p.spike_hours.end()) {
                v *= 3.0;
            }
            v *= 1.0 + 0.06 * rng.gaussian();
            v = std::max(v, 0.0);
            out.building_series(t, b) = v;
            sum += v;
        }
        // Bounded measurement noise keeps |feeder - sum| / sum <= 2%.
        const double factor = 1.0 + 0.015 * rng.uniform(-1.0, 1.0);
        dataset.feeder.values[static_cast<std::size_t>(t)] = sum * factor;
    }

    if (options.gap_rate > 0.0) {
        for (int t = 0; t < hours; ++t) {
            if (rng.uniform() < options.gap_rate) {
                dataset.feeder.values[static_cast<std::size_t>(t)] = HourlySeries::gap_marker();
            }
        }
    }

    dataset.buildings.reserve(static_cast<std::size_t>(n));
    for (int b = 0; b < n; ++b) {
        char id[16];
        std::snprintf(id, sizeof(id), "B%03d", b + 1);
        dataset.buildings.push_back(make_inventory(id, profiles[b]));
    }

    dataset.validate();
    return out;
}

}  // namespace gridshed
