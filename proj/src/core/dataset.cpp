#include "gridshed/core/dataset.hpp"

#include <fstream>
#include <set>

#include "gridshed/core/csv.hpp"
#include "gridshed/core/errors.hpp"

namespace gridshed {

std::size_t HourlySeries::gap_count() const {
    std::size_t n = 0;
    for (double v : values) {
        if (is_gap_value(v)) ++n;
    }
    return n;
}

void HourlySeries::validate() const {
    if (values.empty()) {
        throw ValidationError("hourly series must contain at least one value");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!is_gap_value(values[i]) && values[i] < 0.0) {
            throw ValidationError("negative energy reading at " +
                                  format_hourstamp(stamp_at(i)));
        }
    }
}

void Appliance::validate(const std::string& context) const {
    if (!(rated_kw > 0.0)) {
        throw ValidationError(context + ": rated_kw must be > 0");
    }
    if (count < 1) {
        throw ValidationError(context + ": count must be >= 1");
    }
    for (auto s : schedule) {
        if (s != 0 && s != 1) {
            throw ValidationError(context + ": schedule entries must be 0 or 1");
        }
    }
}

void ApplianceInventory::validate() const {
    if (building_id.empty()) {
        throw ValidationError("building with empty id");
    }
    if (appliances.empty()) {
        throw ValidationError("building " + building_id + " has no appliances");
    }
    for (const auto& a : appliances) {
        a.validate("building " + building_id + ", appliance '" + a.name + "'");
    }
}

double ApplianceInventory::load_at_hour(int hour_of_day) const {
    double total = 0.0;
    for (const auto& a : appliances) {
        if (a.schedule[static_cast<std::size_t>(hour_of_day)]) {
            total += a.rated_kw * a.count;
        }
    }
    return total;
}

void CampusDataset::validate() const {
    feeder.validate();
    if (buildings.empty()) {
        throw ValidationError("dataset has no buildings");
    }
    std::set<std::string> seen;
    for (const auto& b : buildings) {
        b.validate();
        if (!seen.insert(b.building_id).second) {
            throw ValidationError("duplicate building_id '" + b.building_id + "'");
        }
    }
    if (calendar.size() != feeder.size()) {
        throw ValidationError("calendar length does not match feeder length");
    }
}

namespace {

HourlySeries load_feeder_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"timestamp", "kwh"});

    HourlySeries series;
    std::vector<std::string> row;
    bool first = true;
    HourStamp prev{0};
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 2) {
            throw ParseError(where + ": expected 2 fields, got " + std::to_string(row.size()));
        }
        HourStamp t;
        try {
            t = parse_hourstamp(row[0]);
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
        double kwh;
        if (row[1].empty()) {
            kwh = HourlySeries::gap_marker();
        } else {
            kwh = parse_double_field(row[1], where);
            if (kwh < 0.0) {
                throw ValidationError(where + ": negative kWh reading");
            }
        }
        if (first) {
            series.start = t;
            first = false;
        } else {
            const std::int64_t delta = t - prev;
            if (delta <= 0) {
                throw SchemaError(where + ": timestamps must be strictly increasing");
            }
            // A jump of k hours leaves k-1 explicit gaps; spacing must stay
            // on the hourly grid (parse_hourstamp already enforces :00:00).
            for (std::int64_t g = 1; g < delta; ++g) {
                series.values.push_back(HourlySeries::gap_marker());
            }
        }
        series.values.push_back(kwh);
        prev = t;
    }
    if (series.values.empty()) {
        throw SchemaError(path + ": no data rows");
    }
    return series;
}

std::vector<ApplianceInventory> load_inventory_csv(const std::string& path) {
    CsvReader reader(path);
    std::vector<std::string> expected = {"building_id", "appliance", "rated_kw", "count"};
    for (int h = 0; h < 24; ++h) expected.push_back("h" + std::to_string(h));
    reader.expect_header(expected);

    std::vector<ApplianceInventory> buildings;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 28) {
            throw ParseError(where + ": expected 28 fields, got " + std::to_string(row.size()));
        }
        Appliance app;
        app.name = row[1];
        app.rated_kw = parse_double_field(row[2], where);
        app.count = static_cast<int>(parse_int_field(row[3], where));
        for (int h = 0; h < 24; ++h) {
            const long flag = parse_int_field(row[4 + h], where);
            if (flag != 0 && flag != 1) {
                throw ValidationError(where + ": schedule flags must be 0 or 1");
            }
            app.schedule[static_cast<std::size_t>(h)] = static_cast<std::uint8_t>(flag);
        }
        if (buildings.empty() || buildings.back().building_id != row[0]) {
            // New building block; ids may not be interleaved.
            for (const auto& b : buildings) {
                if (b.building_id == row[0]) {
                    throw SchemaError(where + ": rows for building '" + row[0] +
                                      "' are not contiguous");
                }
            }
            buildings.push_back(ApplianceInventory{row[0], {}});
        }
        buildings.back().appliances.push_back(app);
    }
    if (buildings.empty()) {
        throw SchemaError(path + ": no data rows");
    }
    return buildings;
}

std::vector<std::uint8_t> load_calendar_csv(const std::string& path, const HourlySeries& feeder) {
    CsvReader reader(path);
    reader.expect_header({"timestamp", "is_holiday"});

    std::vector<std::uint8_t> calendar(feeder.size(), 0);
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 2) {
            throw ParseError(where + ": expected 2 fields, got " + std::to_string(row.size()));
        }
        const HourStamp t = parse_hourstamp(row[0]);
        const long flag = parse_int_field(row[1], where);
        if (flag != 0 && flag != 1) {
            throw ValidationError(where + ": is_holiday must be 0 or 1");
        }
        const std::int64_t idx = t - feeder.start;
        if (idx < 0 || idx >= static_cast<std::int64_t>(feeder.size())) {
            throw SchemaError(where + ": calendar timestamp outside the feeder time axis");
        }
        calendar[static_cast<std::size_t>(idx)] = static_cast<std::uint8_t>(flag);
    }
    return calendar;
}

}  // namespace

CampusDataset load_campus_csv(const std::string& feeder_path,
                              const std::string& inventory_path,
                              const std::string& calendar_path) {
    CampusDataset dataset;
    dataset.feeder = load_feeder_csv(feeder_path);
    dataset.buildings = load_inventory_csv(inventory_path);
    if (calendar_path.empty()) {
        dataset.calendar.assign(dataset.feeder.size(), 0);
    } else {
        dataset.calendar = load_calendar_csv(calendar_path, dataset.feeder);
    }
    dataset.validate();
    return dataset;
}

void write_campus_csv(const CampusDataset& dataset,
                      const std::string& feeder_path,
                      const std::string& inventory_path,
                      const std::string& calendar_path) {
    {
        std::ofstream out(feeder_path);
        if (!out) throw InputError("cannot write file: " + feeder_path);
        out << "timestamp,kwh\n";
        for (std::size_t i = 0; i < dataset.feeder.size(); ++i) {
            out << format_hourstamp(dataset.feeder.stamp_at(i)) << ",";
            if (!dataset.feeder.is_gap(i)) out << format_value(dataset.feeder.values[i]);
            out << "\n";
        }
    }
    {
        std::ofstream out(inventory_path);
        if (!out) throw InputError("cannot write file: " + inventory_path);
        out << "building_id,appliance,rated_kw,count";
        for (int h = 0; h < 24; ++h) out << ",h" << h;
        out << "\n";
        for (const auto& b : dataset.buildings) {
            for (const auto& a : b.appliances) {
                out << b.building_id << "," << a.name << "," << format_value(a.rated_kw)
                    << "," << a.count;
                for (int h = 0; h < 24; ++h) out << "," << int(a.schedule[h]);
                out << "\n";
            }
        }
    }
    if (!calendar_path.empty()) {
        std::ofstream out(calendar_path);
        if (!out) throw InputError("cannot write file: " + calendar_path);
        out << "timestamp,is_holiday\n";
        for (std::size_t i = 0; i < dataset.feeder.size(); ++i) {
            out << format_hourstamp(dataset.feeder.stamp_at(i)) << ","
                << int(dataset.calendar[i]) << "\n";
        }
    }
}

}  // namespace gridshed
