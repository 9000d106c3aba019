#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gridshed/core/series.hpp"

namespace gridshed {

/// One appliance class within a building: rated power, unit count and a
/// fixed hour-of-day operating schedule.
struct Appliance {
    std::string name;
    double rated_kw = 0.0;            // > 0
    int count = 0;                    // >= 1
    std::array<std::uint8_t, 24> schedule{};  // entries in {0, 1}

    void validate(const std::string& context) const;
};

/// Appliance inventory of one building.
struct ApplianceInventory {
    std::string building_id;
    std::vector<Appliance> appliances;  // length >= 1

    void validate() const;

    /// Inventory load at a given hour of day: sum of state * rated_kw * count.
    double load_at_hour(int hour_of_day) const;
};

/// Everything the pipeline ingests for one campus: the metered feeder series,
/// per-building inventories and a per-hour holiday/academic-break flag.
struct CampusDataset {
    HourlySeries feeder;
    std::vector<ApplianceInventory> buildings;
    std::vector<std::uint8_t> calendar;  // length equals feeder length

    void validate() const;
};

/// Load a campus dataset from CSV files.
///
/// Feeder CSV header: `timestamp,kwh`; one row per hour. A missing hour (a
/// jump in the timestamp column by a whole number of hours) or an empty kwh
/// field becomes an explicit gap. Inventory CSV header:
/// `building_id,appliance,rated_kw,count,h0,...,h23`. The calendar CSV
/// (`timestamp,is_holiday`) is optional; all hours default to non-holiday.
///
/// Throws ParseError (malformed row, with line number), SchemaError
/// (non-hourly spacing, bad header), ValidationError (negative kWh, bad
/// inventory entries), InputError (missing file).
CampusDataset load_campus_csv(const std::string& feeder_path,
                              const std::string& inventory_path,
                              const std::string& calendar_path = "");

/// Write the dataset back out in the canonical CSV forms. Values are printed
/// with 9 significant digits; gaps become empty kwh fields.
void write_campus_csv(const CampusDataset& dataset,
                      const std::string& feeder_path,
                      const std::string& inventory_path,
                      const std::string& calendar_path = "");

}  // namespace gridshed
