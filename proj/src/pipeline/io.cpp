#include "gridshed/pipeline/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "gridshed/core/csv.hpp"
#include "gridshed/core/errors.hpp"

namespace gridshed::pipeline {

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write file: " + path);
    return out;
}

std::string value_or_empty(double v) {
    return std::isnan(v) ? "" : format_value(v);
}

}  // namespace

void write_estimates_csv(const std::string& path, const EstimatesArtifact& artifact) {
    std::ofstream out = open_out(path);
    out << "timestamp,building_id,kwh_aim,kwh_reconciled,flag\n";
    const Eigen::Index hours = artifact.aim.values.rows();
    const Eigen::Index n = artifact.aim.values.cols();
    for (Eigen::Index t = 0; t < hours; ++t) {
        const std::string stamp = format_hourstamp(artifact.aim.start + t);
        const char* flag = disagg::hour_flag_name(artifact.flags[static_cast<std::size_t>(t)]);
        for (Eigen::Index b = 0; b < n; ++b) {
            out << stamp << "," << artifact.aim.building_ids[static_cast<std::size_t>(b)] << ","
                << format_value(artifact.aim.values(t, b)) << ","
                << format_value(artifact.reconciled.values(t, b)) << "," << flag << "\n";
        }
    }
}

EstimatesArtifact read_estimates_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"timestamp", "building_id", "kwh_aim", "kwh_reconciled", "flag"});

    std::vector<std::string> row;
    std::vector<HourStamp> stamps;
    std::vector<std::string> ids;
    std::vector<double> aim_values, rec_values;
    std::vector<std::string> flag_names;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 5) throw ParseError(where + ": expected 5 fields");
        stamps.push_back(parse_hourstamp(row[0]));
        ids.push_back(row[1]);
        aim_values.push_back(parse_double_field(row[2], where));
        rec_values.push_back(parse_double_field(row[3], where));
        flag_names.push_back(row[4]);
    }
    if (stamps.empty()) throw SchemaError(path + ": no data rows");

    // Building order = first-appearance order within the first hour block.
    std::vector<std::string> building_ids;
    for (std::size_t i = 0; i < ids.size() && stamps[i] == stamps[0]; ++i) {
        building_ids.push_back(ids[i]);
    }
    const std::size_t n = building_ids.size();
    if (n == 0 || ids.size() % n != 0) {
        throw SchemaError(path + ": rows do not form complete hour blocks");
    }
    const std::size_t hours = ids.size() / n;

    EstimatesArtifact artifact;
    artifact.aim.start = stamps[0];
    artifact.aim.building_ids = building_ids;
    artifact.aim.values.resize(static_cast<Eigen::Index>(hours), static_cast<Eigen::Index>(n));
    artifact.reconciled = artifact.aim;
    artifact.flags.resize(hours, disagg::HourFlag::Reconciled);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const std::size_t t = i / n;
        const std::size_t b = i % n;
        if (ids[i] != building_ids[b] || !(stamps[i] == stamps[0] + static_cast<std::int64_t>(t))) {
            throw SchemaError(path + ": rows are not in (hour, building) order");
        }
        artifact.aim.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) =
            aim_values[i];
        artifact.reconciled.values(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(b)) =
            rec_values[i];
        if (flag_names[i] == "gap") artifact.flags[t] = disagg::HourFlag::GapPassthrough;
        else if (flag_names[i] == "uniform") artifact.flags[t] = disagg::HourFlag::UniformSplit;
    }
    return artifact;
}

void write_features_csv(const std::string& path, const reduce::FeatureMatrix& features) {
    std::ofstream out = open_out(path);
    out << "building_id";
    for (const auto& name : features.feature_names) out << "," << name;
    out << "\n";
    for (Eigen::Index i = 0; i < features.n_rows(); ++i) {
        out << features.building_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < features.n_cols(); ++j) {
            out << "," << format_value(features.values(i, j));
        }
        out << "\n";
    }
}

reduce::FeatureMatrix read_features_csv(const std::string& path) {
    CsvReader reader(path);
    if (reader.header().size() < 2 || reader.header()[0] != "building_id") {
        throw SchemaError(path + ": expected header building_id,<features...>");
    }
    reduce::FeatureMatrix features;
    features.feature_names.assign(reader.header().begin() + 1, reader.header().end());

    std::vector<std::string> row;
    std::vector<std::vector<double>> rows;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != reader.header().size()) {
            throw ParseError(where + ": wrong field count");
        }
        features.building_ids.push_back(row[0]);
        std::vector<double> values;
        for (std::size_t j = 1; j < row.size(); ++j) {
            values.push_back(parse_double_field(row[j], where));
        }
        rows.push_back(std::move(values));
    }
    features.values.resize(static_cast<Eigen::Index>(rows.size()),
                           static_cast<Eigen::Index>(features.feature_names.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            features.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    features.validate();
    return features;
}

void write_clusters_csv(const std::string& path, const std::vector<std::string>& building_ids,
                        const std::vector<int>& labels) {
    std::ofstream out = open_out(path);
    out << "building_id,label\n";
    for (std::size_t i = 0; i < building_ids.size(); ++i) {
        out << building_ids[i] << "," << labels[i] << "\n";
    }
}

std::vector<std::pair<std::string, int>> read_clusters_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"building_id", "label"});
    std::vector<std::pair<std::string, int>> out;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 2) throw ParseError(where + ": expected 2 fields");
        out.emplace_back(row[0], static_cast<int>(parse_int_field(row[1], where)));
    }
    return out;
}

void write_validity_csv(const std::string& path,
                        const std::vector<cluster::ValidityRow>& rows) {
    std::ofstream out = open_out(path);
    out << "algorithm,k,silhouette,davies_bouldin,calinski_harabasz,wcss\n";
    for (const auto& row : rows) {
        out << cluster::algorithm_name(row.algorithm) << "," << row.k << ","
            << value_or_empty(row.scores.silhouette) << ","
            << value_or_empty(row.scores.davies_bouldin) << ","
            << value_or_empty(row.scores.calinski_harabasz) << ","
            << value_or_empty(row.scores.wcss) << "\n";
    }
}

void write_cluster_series_csv(const std::string& path,
                              const std::vector<forecast::ClusterSeries>& series) {
    std::ofstream out = open_out(path);
    out << "timestamp,cluster_id,kwh\n";
    if (series.empty()) return;
    const std::size_t hours = series.front().series.size();
    for (std::size_t t = 0; t < hours; ++t) {
        const std::string stamp = format_hourstamp(series.front().series.stamp_at(t));
        for (const auto& cs : series) {
            out << stamp << "," << cs.cluster_id << ",";
            if (!cs.series.is_gap(t)) out << format_value(cs.series.values[t]);
            out << "\n";
        }
    }
}

std::vector<forecast::ClusterSeries> read_cluster_series_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"timestamp", "cluster_id", "kwh"});
    std::map<int, std::map<std::int64_t, double>> by_cluster;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 3) throw ParseError(where + ": expected 3 fields");
        const HourStamp stamp = parse_hourstamp(row[0]);
        const int cluster = static_cast<int>(parse_int_field(row[1], where));
        const double value = row[2].empty() ? HourlySeries::gap_marker()
                                            : parse_double_field(row[2], where);
        by_cluster[cluster][stamp.hours] = value;
    }
    if (by_cluster.empty()) throw SchemaError(path + ": no data rows");

    std::vector<forecast::ClusterSeries> out;
    for (const auto& [cluster, entries] : by_cluster) {
        forecast::ClusterSeries cs;
        cs.cluster_id = cluster;
        const std::int64_t first = entries.begin()->first;
        const std::int64_t last = entries.rbegin()->first;
        cs.series.start = HourStamp{first};
        cs.series.values.assign(static_cast<std::size_t>(last - first + 1),
                                HourlySeries::gap_marker());
        for (const auto& [hour, value] : entries) {
            cs.series.values[static_cast<std::size_t>(hour - first)] = value;
        }
        out.push_back(std::move(cs));
    }
    return out;
}

void write_forecast_csv(const std::string& path, const ForecastArtifact& artifact) {
    std::ofstream out = open_out(path);
    out << "timestamp,cluster_id,point,lower,upper\n";
    if (artifact.cluster_ids.empty()) return;
    const std::size_t horizon =
        artifact.results.at(artifact.cluster_ids.front()).point.size();
    for (std::size_t j = 0; j < horizon; ++j) {
        const std::string stamp =
            format_hourstamp(artifact.start + static_cast<std::int64_t>(j));
        for (int cluster : artifact.cluster_ids) {
            const forecast::ForecastResult& r = artifact.results.at(cluster);
            out << stamp << "," << cluster << "," << format_value(r.point[j]) << ",";
            if (r.has_intervals()) {
                out << format_value(r.lower[j]) << "," << format_value(r.upper[j]);
            } else {
                out << ",";
            }
            out << "\n";
        }
    }
}

ForecastArtifact read_forecast_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"timestamp", "cluster_id", "point", "lower", "upper"});
    std::map<int, std::map<std::int64_t, std::array<double, 3>>> rows;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 5) throw ParseError(where + ": expected 5 fields");
        const HourStamp stamp = parse_hourstamp(row[0]);
        const int cluster = static_cast<int>(parse_int_field(row[1], where));
        const double point = parse_double_field(row[2], where);
        const double lo = row[3].empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : parse_double_field(row[3], where);
        const double hi = row[4].empty() ? std::numeric_limits<double>::quiet_NaN()
                                         : parse_double_field(row[4], where);
        rows[cluster][stamp.hours] = {point, lo, hi};
    }
    if (rows.empty()) throw SchemaError(path + ": no data rows");

    ForecastArtifact artifact;
    artifact.start = HourStamp{rows.begin()->second.begin()->first};
    for (const auto& [cluster, entries] : rows) {
        artifact.cluster_ids.push_back(cluster);
        forecast::ForecastResult result;
        bool intervals = true;
        for (const auto& [hour, vals] : entries) {
            result.point.push_back(vals[0]);
            if (std::isnan(vals[1]) || std::isnan(vals[2])) intervals = false;
            result.lower.push_back(vals[1]);
            result.upper.push_back(vals[2]);
        }
        if (!intervals) {
            result.lower.clear();
            result.upper.clear();
        }
        artifact.results[cluster] = std::move(result);
    }
    return artifact;
}

void write_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
    std::ofstream out = open_out(path);
    out << "model,cluster_id,rmse,mape,r2,crps\n";
    for (const auto& row : rows) {
        out << row.model << "," << row.cluster << "," << format_value(row.metrics.rmse) << ","
            << value_or_empty(row.metrics.mape_percent) << ","
            << format_value(row.metrics.r_squared) << ","
            << value_or_empty(row.metrics.crps) << "\n";
    }
}

HourlySeries read_supply_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"timestamp", "kwh"});
    std::map<std::int64_t, double> entries;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 2) throw ParseError(where + ": expected 2 fields");
        entries[parse_hourstamp(row[0]).hours] = parse_double_field(row[1], where);
    }
    if (entries.empty()) throw SchemaError(path + ": no data rows");
    HourlySeries series;
    series.start = HourStamp{entries.begin()->first};
    const std::int64_t last = entries.rbegin()->first;
    series.values.assign(static_cast<std::size_t>(last - series.start.hours + 1),
                         HourlySeries::gap_marker());
    for (const auto& [hour, value] : entries) {
        series.values[static_cast<std::size_t>(hour - series.start.hours)] = value;
    }
    return series;
}

std::map<int, double> read_weights_csv(const std::string& path) {
    CsvReader reader(path);
    reader.expect_header({"cluster_id", "weight"});
    std::map<int, double> weights;
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = path + ":" + std::to_string(reader.line_number());
        if (row.size() != 2) throw ParseError(where + ": expected 2 fields");
        weights[static_cast<int>(parse_int_field(row[0], where))] =
            parse_double_field(row[1], where);
    }
    return weights;
}

void write_weights_csv(const std::string& path, const std::map<int, double>& weights) {
    std::ofstream out = open_out(path);
    out << "cluster_id,weight\n";
    for (const auto& [cluster, weight] : weights) {
        out << cluster << "," << format_value(weight) << "\n";
    }
}

void write_plan_csv(const std::string& path, HourStamp start,
                    const std::vector<int>& cluster_ids,
                    const std::vector<std::vector<double>>& demands,
                    const std::vector<allocate::SheddingPlan>& plans) {
    std::ofstream out = open_out(path);
    out << "timestamp,cluster_id,demand_kwh,shed_kwh,feasible\n";
    for (std::size_t t = 0; t < plans.size(); ++t) {
        const std::string stamp = format_hourstamp(start + static_cast<std::int64_t>(t));
        for (std::size_t c = 0; c < cluster_ids.size(); ++c) {
            out << stamp << "," << cluster_ids[c] << "," << format_value(demands[t][c]) << ","
                << format_value(plans[t].curtailment[c]) << ","
                << (plans[t].feasible ? 1 : 0) << "\n";
        }
    }
}

}  // namespace gridshed::pipeline
