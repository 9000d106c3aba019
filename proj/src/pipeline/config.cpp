#include "gridshed/pipeline/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gridshed/core/csv.hpp"
#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"

namespace gridshed::pipeline {

namespace {

std::string trim(const std::string& text) {
    std::size_t begin = text.find_first_not_of(" \t");
    std::size_t end = text.find_last_not_of(" \t");
    if (begin == std::string::npos) return "";
    return text.substr(begin, end - begin + 1);
}

std::vector<int> parse_int_list(const std::string& value, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string token;
    while (std::getline(ss, token, ',')) {
        out.push_back(static_cast<int>(parse_int_field(trim(token), key)));
    }
    if (out.empty()) throw ArgumentError(key + ": empty list");
    return out;
}

std::vector<std::string> parse_string_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string token;
    while (std::getline(ss, token, ',')) out.push_back(trim(token));
    return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "on") return true;
    if (value == "false" || value == "0" || value == "off") return false;
    throw ArgumentError(key + ": expected a boolean, got '" + value + "'");
}

std::string join_ints(const std::vector<int>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(values[i]);
    }
    return out;
}

std::string join_strings(const std::vector<std::string>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ",";
        out += values[i];
    }
    return out;
}

}  // namespace

void apply_config_entry(PipelineConfig& c, const std::string& key, const std::string& value) {
    if (key == "paths.feeder") c.feeder_path = value;
    else if (key == "paths.inventory") c.inventory_path = value;
    else if (key == "paths.calendar") c.calendar_path = value;
    else if (key == "paths.out") c.out_dir = value;
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(parse_int_field(value, key));
    else if (key == "generator.buildings") c.gen_buildings = static_cast<int>(parse_int_field(value, key));
    else if (key == "generator.hours") c.gen_hours = static_cast<int>(parse_int_field(value, key));
    else if (key == "generator.cluster_sizes") c.gen_cluster_sizes = parse_int_list(value, key);
    else if (key == "generator.gap_rate") c.gen_gap_rate = parse_double_field(value, key);
    else if (key == "cluster.algorithm") c.cluster_algorithm = value;
    else if (key == "cluster.k") c.cluster_k = static_cast<int>(parse_int_field(value, key));
    else if (key == "cluster.k_min") c.cluster_k_min = static_cast<int>(parse_int_field(value, key));
    else if (key == "cluster.k_max") c.cluster_k_max = static_cast<int>(parse_int_field(value, key));
    else if (key == "cluster.batch_size") c.cluster_batch_size = static_cast<int>(parse_int_field(value, key));
    else if (key == "cluster.dbscan_min_pts") c.dbscan_min_pts = static_cast<int>(parse_int_field(value, key));
    else if (key == "cluster.dbscan_eps") c.dbscan_eps = parse_double_field(value, key);
    else if (key == "pca.enabled") c.pca_enabled = parse_bool(value, key);
    else if (key == "pca.variance_target") c.pca_variance_target = parse_double_field(value, key);
    else if (key == "forecast.families") c.forecast_families = parse_string_list(value);
    else if (key == "forecast.model") c.forecast_model = value;
    else if (key == "forecast.horizon") c.forecast_horizon = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.cv_step") c.forecast_cv_step = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.train_fraction") c.forecast_train_fraction = parse_double_field(value, key);
    else if (key == "forecast.arima") c.arima_order = parse_int_list(value, key);
    else if (key == "forecast.sarima") c.sarima_order = parse_int_list(value, key);
    else if (key == "forecast.prophet_changepoints") c.prophet_changepoints = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.prophet_daily") c.prophet_daily_order = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.prophet_weekly") c.prophet_weekly_order = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.prophet_lambda") c.prophet_ridge_lambda = parse_double_field(value, key);
    else if (key == "forecast.gru_hidden") c.gru_hidden = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.gru_lookback") c.gru_lookback = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.gru_epochs") c.gru_epochs = static_cast<int>(parse_int_field(value, key));
    else if (key == "forecast.gru_lr") c.gru_learning_rate = parse_double_field(value, key);
    else if (key == "allocate.weights") c.weights_path = value;
    else if (key == "allocate.supply") c.supply_path = value;
    else if (key == "allocate.supply_factor") c.supply_factor = parse_double_field(value, key);
    else throw ArgumentError("unknown config key '" + key + "'");
}

void PipelineConfig::validate() const {
    if (gen_hours < 48) throw ArgumentError("generator.hours must be >= 48");
    if (gen_gap_rate < 0.0 || gen_gap_rate >= 1.0) {
        throw ArgumentError("generator.gap_rate must be in [0, 1)");
    }
    if (cluster_k < 1) throw ArgumentError("cluster.k must be >= 1");
    if (cluster_k_min < 2 || cluster_k_max < cluster_k_min) {
        throw ArgumentError("cluster.k_min/k_max must satisfy 2 <= k_min <= k_max");
    }
    if (!(pca_variance_target > 0.0) || pca_variance_target > 1.0) {
        throw ArgumentError("pca.variance_target must be in (0, 1]");
    }
    if (forecast_horizon < 1) throw ArgumentError("forecast.horizon must be >= 1");
    if (forecast_cv_step < 1) throw ArgumentError("forecast.cv_step must be >= 1");
    if (!(forecast_train_fraction > 0.0) || forecast_train_fraction >= 1.0) {
        throw ArgumentError("forecast.train_fraction must be in (0, 1)");
    }
    if (arima_order.size() != 3) throw ArgumentError("forecast.arima expects p,d,q");
    if (sarima_order.size() != 7) throw ArgumentError("forecast.sarima expects p,d,q,P,D,Q,s");
    if (supply_factor <= 0.0) throw ArgumentError("allocate.supply_factor must be > 0");
}

std::string PipelineConfig::canonical() const {
    std::vector<std::pair<std::string, std::string>> entries = {
        {"allocate.supply", supply_path},
        {"allocate.supply_factor", format_value(supply_factor)},
        {"allocate.weights", weights_path},
        {"cluster.algorithm", cluster_algorithm},
        {"cluster.batch_size", std::to_string(cluster_batch_size)},
        {"cluster.dbscan_eps", format_value(dbscan_eps)},
        {"cluster.dbscan_min_pts", std::to_string(dbscan_min_pts)},
        {"cluster.k", std::to_string(cluster_k)},
        {"cluster.k_max", std::to_string(cluster_k_max)},
        {"cluster.k_min", std::to_string(cluster_k_min)},
        {"forecast.arima", join_ints(arima_order)},
        {"forecast.cv_step", std::to_string(forecast_cv_step)},
        {"forecast.families", join_strings(forecast_families)},
        {"forecast.gru_epochs", std::to_string(gru_epochs)},
        {"forecast.gru_hidden", std::to_string(gru_hidden)},
        {"forecast.gru_lookback", std::to_string(gru_lookback)},
        {"forecast.gru_lr", format_value(gru_learning_rate)},
        {"forecast.horizon", std::to_string(forecast_horizon)},
        {"forecast.model", forecast_model},
        {"forecast.prophet_changepoints", std::to_string(prophet_changepoints)},
        {"forecast.prophet_daily", std::to_string(prophet_daily_order)},
        {"forecast.prophet_lambda", format_value(prophet_ridge_lambda)},
        {"forecast.prophet_weekly", std::to_string(prophet_weekly_order)},
        {"forecast.sarima", join_ints(sarima_order)},
        {"forecast.train_fraction", format_value(forecast_train_fraction)},
        {"generator.buildings", std::to_string(gen_buildings)},
        {"generator.cluster_sizes", join_ints(gen_cluster_sizes)},
        {"generator.gap_rate", format_value(gen_gap_rate)},
        {"generator.hours", std::to_string(gen_hours)},
        {"paths.calendar", calendar_path},
        {"paths.feeder", feeder_path},
        {"paths.inventory", inventory_path},
        {"paths.out", out_dir},
        {"pca.enabled", pca_enabled ? "true" : "false"},
        {"pca.variance_target", format_value(pca_variance_target)},
        {"seed", std::to_string(seed)},
    };
    std::string out;
    for (const auto& [key, value] : entries) {
        out += key + " = " + value + "\n";
    }
    return out;
}

std::uint64_t PipelineConfig::hash() const { return fnv1a(canonical()); }

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    PipelineConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ArgumentError(path + ":" + std::to_string(line_no) +
                                ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            apply_config_entry(config, key, value);
        } catch (const ArgumentError& e) {
            throw ArgumentError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    config.validate();
    return config;
}

}  // namespace gridshed::pipeline
