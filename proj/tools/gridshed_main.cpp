#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/cluster/validity.hpp"
#include "gridshed/core/csv.hpp"
#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"
#include "gridshed/core/synthetic.hpp"
#include "gridshed/forecast/evaluate.hpp"
#include "gridshed/pipeline/io.hpp"
#include "gridshed/pipeline/pipeline.hpp"
#include "gridshed/reduce/pca.hpp"

namespace {

using namespace gridshed;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInput = 3;
constexpr int kExitStage = 4;

struct GlobalOptions {
    std::string config_path;
    std::string out_dir;
    long seed = -1;
    bool quiet = false;
};

pipeline::PipelineConfig resolve_config(const GlobalOptions& global) {
    pipeline::PipelineConfig config;
    if (!global.config_path.empty()) {
        config = pipeline::load_config(global.config_path);
    }
    if (global.seed >= 0) config.seed = static_cast<std::uint64_t>(global.seed);
    if (!global.out_dir.empty()) config.out_dir = global.out_dir;
    config.validate();
    return config;
}

std::vector<int> parse_k_range(const std::string& text) {
    const std::size_t dots = text.find("..");
    std::vector<int> range;
    if (dots == std::string::npos) {
        range.push_back(static_cast<int>(parse_int_field(text, "--select-k")));
        return range;
    }
    const int lo = static_cast<int>(parse_int_field(text.substr(0, dots), "--select-k"));
    const int hi = static_cast<int>(parse_int_field(text.substr(dots + 2), "--select-k"));
    for (int k = lo; k <= hi; ++k) range.push_back(k);
    return range;
}

int run_generate(const GlobalOptions& global) {
    pipeline::PipelineConfig config = resolve_config(global);
    SyntheticOptions options;
    options.seed = derive_seed(config.seed, "generate");
    options.n_buildings = config.gen_buildings;
    options.n_hours = config.gen_hours;
    options.cluster_sizes = config.gen_cluster_sizes;
    options.gap_rate = config.gen_gap_rate;
    const SyntheticCampus campus = generate_synthetic_campus(options);
    std::filesystem::create_directories(config.out_dir);
    write_campus_csv(campus.dataset, config.out_dir + "/feeder.csv",
                     config.out_dir + "/inventory.csv", config.out_dir + "/calendar.csv");
    if (!global.quiet) {
        std::cout << "wrote " << config.out_dir << "/feeder.csv, inventory.csv, calendar.csv\n";
    }
    return kExitOk;
}

int run_disaggregate(const std::string& feeder, const std::string& inventory,
                     const std::string& calendar, const std::string& out) {
    const CampusDataset dataset = load_campus_csv(feeder, inventory, calendar);
    pipeline::EstimatesArtifact artifact;
    artifact.aim = disagg::aim_estimate(dataset);
    disagg::ReconciliationResult result = disagg::reconcile_all(artifact.aim, dataset.feeder);
    artifact.reconciled = std::move(result.reconciled);
    artifact.flags = std::move(result.flags);
    pipeline::write_estimates_csv(out, artifact);
    return kExitOk;
}

int run_features(const std::string& estimates_path, const std::string& out) {
    const pipeline::EstimatesArtifact artifact = pipeline::read_estimates_csv(estimates_path);
    pipeline::write_features_csv(out, reduce::extract_features(artifact.reconciled));
    return kExitOk;
}

struct ClusterArgs {
    std::string features_path;
    std::string algorithm = "minibatch";
    int k = 3;
    std::string select_k;
    std::string out = "clusters.csv";
    bool no_pca = false;
    double variance_target = 0.95;
    double eps = 0.0;
    int min_pts = 4;
    int batch_size = 32;
};

int run_cluster(const ClusterArgs& args, const GlobalOptions& global) {
    pipeline::PipelineConfig config = resolve_config(global);
    const reduce::FeatureMatrix raw = pipeline::read_features_csv(args.features_path);
    const reduce::ZscoreResult normalized = reduce::zscore_normalize(raw);
    reduce::FeatureMatrix space = normalized.normalized;
    if (!args.no_pca) {
        const reduce::PcaModel model = reduce::pca_fit(space, args.variance_target);
        space = reduce::pca_transform(model, space);
        space.building_ids = raw.building_ids;
    }
    const std::uint64_t seed = derive_seed(config.seed, "cluster");
    const cluster::Algorithm algorithm = cluster::parse_algorithm(args.algorithm);

    if (!args.select_k.empty()) {
        const cluster::ValidityReport report =
            cluster::select_k(space, algorithm, parse_k_range(args.select_k), seed);
        std::vector<cluster::ValidityRow> rows = report.rows;
        pipeline::write_validity_csv(args.out, rows);
        if (!global.quiet) {
            std::cout << "space: " << (args.no_pca ? "normalized" : "pca") << "\n"
                      << "best_k: silhouette=" << report.silhouette_best_k
                      << " davies_bouldin=" << report.davies_bouldin_best_k
                      << " calinski_harabasz=" << report.calinski_harabasz_best_k << "\n";
        }
        return kExitOk;
    }

    cluster::ClusterModel model;
    switch (algorithm) {
        case cluster::Algorithm::KMeans:
            model = cluster::fit_kmeans(space, args.k, seed);
            break;
        case cluster::Algorithm::MiniBatch:
            model = cluster::fit_minibatch_kmeans(space, args.k, args.batch_size, seed);
            break;
        case cluster::Algorithm::Hierarchical:
            model = cluster::fit_hierarchical(space, args.k);
            break;
        case cluster::Algorithm::Gmm:
            model = cluster::fit_gmm(space, args.k, seed);
            break;
        case cluster::Algorithm::Spectral:
            model = cluster::fit_spectral(space, args.k, seed);
            break;
        case cluster::Algorithm::Dbscan: {
            const double eps =
                args.eps > 0.0 ? args.eps : cluster::dbscan_default_eps(space, args.min_pts);
            model = cluster::fit_dbscan(space, eps, args.min_pts);
            break;
        }
    }
    pipeline::write_clusters_csv(args.out, raw.building_ids, model.labels);
    return kExitOk;
}

struct ForecastArgs {
    std::string series_path;
    std::string model = "prophet";
    std::string calendar_path;
    int horizon = 24;
    std::string out = "forecast.csv";
};

std::vector<std::uint8_t> calendar_for(const HourlySeries& series,
                                       const std::string& calendar_path) {
    std::vector<std::uint8_t> flags(series.size(), 0);
    if (calendar_path.empty()) return flags;
    CsvReader reader(calendar_path);
    reader.expect_header({"timestamp", "is_holiday"});
    std::vector<std::string> row;
    while (reader.next_row(row)) {
        const std::string where = calendar_path + ":" + std::to_string(reader.line_number());
        if (row.size() != 2) throw ParseError(where + ": expected 2 fields");
        const std::int64_t idx = parse_hourstamp(row[0]) - series.start;
        if (idx >= 0 && idx < static_cast<std::int64_t>(series.size())) {
            flags[static_cast<std::size_t>(idx)] =
                static_cast<std::uint8_t>(parse_int_field(row[1], where) != 0);
        }
    }
    return flags;
}

forecast::ForecasterSpec spec_from_config(const pipeline::PipelineConfig& config,
                                          forecast::Family family) {
    forecast::ForecasterSpec spec;
    spec.family = family;
    spec.arima = forecast::ArimaSpec{config.arima_order[0], config.arima_order[1],
                                     config.arima_order[2], std::nullopt};
    spec.sarima = forecast::ArimaSpec{
        config.sarima_order[0], config.sarima_order[1], config.sarima_order[2],
        forecast::SeasonalSpec{config.sarima_order[3], config.sarima_order[4],
                               config.sarima_order[5], config.sarima_order[6]}};
    spec.prophet = forecast::ProphetSpec{config.prophet_changepoints, config.prophet_daily_order,
                                         config.prophet_weekly_order, config.prophet_ridge_lambda};
    spec.gru = forecast::GruSpec{config.gru_hidden, config.gru_lookback, config.gru_epochs,
                                 config.gru_learning_rate, derive_seed(config.seed, "gru")};
    return spec;
}

int run_forecast(const ForecastArgs& args, const GlobalOptions& global) {
    pipeline::PipelineConfig config = resolve_config(global);
    const auto series = pipeline::read_cluster_series_csv(args.series_path);
    if (series.empty()) throw InputError("no cluster series in " + args.series_path);
    const forecast::ForecasterSpec spec =
        spec_from_config(config, forecast::parse_family(args.model));

    pipeline::ForecastArtifact artifact;
    artifact.start = HourStamp{series.front().series.start.hours +
                               static_cast<std::int64_t>(series.front().series.size())};
    const std::vector<std::uint8_t> future_flags(static_cast<std::size_t>(args.horizon), 0);
    for (const auto& cs : series) {
        auto forecaster = forecast::make_forecaster(spec);
        forecaster->fit(cs.series, calendar_for(cs.series, args.calendar_path));
        artifact.cluster_ids.push_back(cs.cluster_id);
        artifact.results[cs.cluster_id] = forecaster->predict(args.horizon, future_flags);
    }
    pipeline::write_forecast_csv(args.out, artifact);
    return kExitOk;
}

struct EvaluateArgs {
    std::string series_path;
    std::string model = "all";
    std::string calendar_path;
    double train_fraction = 0.8;
    int horizon = 24;
    int step = 24;
    std::string out = "metrics.csv";
};

int run_evaluate(const EvaluateArgs& args, const GlobalOptions& global) {
    pipeline::PipelineConfig config = resolve_config(global);
    const auto series = pipeline::read_cluster_series_csv(args.series_path);
    if (series.empty()) throw InputError("no cluster series in " + args.series_path);

    std::vector<std::string> families;
    if (args.model == "all") {
        families = config.forecast_families;
    } else {
        families.push_back(args.model);
    }

    forecast::EvaluationOptions options;
    options.initial_train_fraction = args.train_fraction;
    options.horizon = args.horizon;
    options.step = args.step;

    std::vector<pipeline::MetricsRow> rows;
    for (const std::string& name : families) {
        const forecast::ForecasterSpec spec =
            spec_from_config(config, forecast::parse_family(name));
        double rmse = 0.0, r2 = 0.0;
        for (const auto& cs : series) {
            const auto calendar = calendar_for(cs.series, args.calendar_path);
            const forecast::EvaluationResult eval =
                forecast::rolling_origin_evaluate(cs, calendar, spec, options);
            rows.push_back({name, std::to_string(cs.cluster_id), eval.mean});
            rmse += eval.mean.rmse;
            r2 += eval.mean.r_squared;
        }
        forecast::Metrics mean;
        mean.rmse = rmse / static_cast<double>(series.size());
        mean.r_squared = r2 / static_cast<double>(series.size());
        rows.push_back({name, "mean", mean});
    }
    pipeline::write_metrics_csv(args.out, rows);
    return kExitOk;
}

struct AllocateArgs {
    std::string forecast_path;
    std::string supply_path;
    std::string weights_path;
    std::string out = "plan.csv";
};

int run_allocate(const AllocateArgs& args) {
    const pipeline::ForecastArtifact artifact = pipeline::read_forecast_csv(args.forecast_path);
    const HourlySeries supply = pipeline::read_supply_csv(args.supply_path);
    const std::map<int, double> weight_map = pipeline::read_weights_csv(args.weights_path);

    const std::size_t horizon = artifact.results.begin()->second.point.size();
    allocate::DeficitSchedule schedule;
    schedule.supply.resize(horizon);
    schedule.cluster_demands.assign(horizon,
                                    std::vector<double>(artifact.cluster_ids.size(), 0.0));
    std::vector<double> weights;
    for (int cluster : artifact.cluster_ids) {
        auto it = weight_map.find(cluster);
        if (it == weight_map.end()) {
            throw InputError("weights file has no entry for cluster " + std::to_string(cluster));
        }
        weights.push_back(it->second);
    }
    for (std::size_t t = 0; t < horizon; ++t) {
        const std::int64_t idx =
            (artifact.start + static_cast<std::int64_t>(t)) - supply.start;
        if (idx < 0 || idx >= static_cast<std::int64_t>(supply.size()) ||
            supply.is_gap(static_cast<std::size_t>(idx))) {
            throw InputError("supply series does not cover forecast hour " +
                             format_hourstamp(artifact.start + static_cast<std::int64_t>(t)));
        }
        schedule.supply[t] = supply.values[static_cast<std::size_t>(idx)];
        for (std::size_t c = 0; c < artifact.cluster_ids.size(); ++c) {
            schedule.cluster_demands[t][c] =
                std::max(artifact.results.at(artifact.cluster_ids[c]).point[t], 0.0);
        }
    }
    const auto plans = allocate::schedule_shedding(schedule, weights);
    pipeline::write_plan_csv(args.out, artifact.start, artifact.cluster_ids,
                             schedule.cluster_demands, plans);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridshed - campus load estimation, clustering, forecasting and shedding"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--config", global.config_path, "pipeline config file");
    app.add_option("--seed", global.seed, "root seed (overrides config)");
    app.add_option("--out", global.out_dir, "output directory (overrides config)");
    app.add_flag("--quiet", global.quiet, "suppress progress output");

    auto* generate = app.add_subcommand("generate", "write a synthetic campus dataset");
    long gen_buildings = -1, gen_hours = -1;
    std::string gen_sizes;
    double gen_gaps = -1.0;
    generate->add_option("--buildings", gen_buildings, "number of buildings");
    generate->add_option("--hours", gen_hours, "number of hours");
    generate->add_option("--sizes", gen_sizes, "planted group sizes, e.g. 9,37,9");
    generate->add_option("--gaps", gen_gaps, "feeder gap-injection rate");

    auto* disaggregate = app.add_subcommand("disaggregate", "estimate and reconcile building loads");
    std::string feeder, inventory, calendar, disagg_out = "estimates.csv";
    disaggregate->add_option("--feeder", feeder)->required();
    disaggregate->add_option("--inventory", inventory)->required();
    disaggregate->add_option("--calendar", calendar);
    disaggregate->add_option("--out", disagg_out);

    auto* features = app.add_subcommand("features", "extract per-building demand features");
    std::string estimates_path, features_out = "features.csv";
    features->add_option("--estimates", estimates_path)->required();
    features->add_option("--out", features_out);

    auto* cluster_cmd = app.add_subcommand("cluster", "cluster buildings by demand pattern");
    ClusterArgs cluster_args;
    cluster_cmd->add_option("--features", cluster_args.features_path)->required();
    cluster_cmd->add_option("--algorithm", cluster_args.algorithm);
    cluster_cmd->add_option("--k", cluster_args.k);
    cluster_cmd->add_option("--select-k", cluster_args.select_k, "k range, e.g. 2..8");
    cluster_cmd->add_option("--out", cluster_args.out);
    cluster_cmd->add_flag("--no-pca", cluster_args.no_pca, "cluster on normalized features");
    cluster_cmd->add_option("--variance-target", cluster_args.variance_target);
    cluster_cmd->add_option("--eps", cluster_args.eps, "dbscan eps (0 = heuristic)");
    cluster_cmd->add_option("--min-pts", cluster_args.min_pts);
    cluster_cmd->add_option("--batch-size", cluster_args.batch_size);

    auto* forecast_cmd = app.add_subcommand("forecast", "forecast cluster series");
    ForecastArgs forecast_args;
    forecast_cmd->add_option("--series", forecast_args.series_path)->required();
    forecast_cmd->add_option("--model", forecast_args.model);
    forecast_cmd->add_option("--calendar", forecast_args.calendar_path);
    forecast_cmd->add_option("--horizon", forecast_args.horizon);
    forecast_cmd->add_option("--out", forecast_args.out);

    auto* evaluate = app.add_subcommand("evaluate", "rolling-origin model evaluation");
    EvaluateArgs eval_args;
    evaluate->add_option("--series", eval_args.series_path)->required();
    evaluate->add_option("--model", eval_args.model, "family name or 'all'");
    evaluate->add_option("--calendar", eval_args.calendar_path);
    evaluate->add_option("--train-fraction", eval_args.train_fraction);
    evaluate->add_option("--horizon", eval_args.horizon);
    evaluate->add_option("--step", eval_args.step);
    evaluate->add_option("--out", eval_args.out);

    auto* allocate_cmd = app.add_subcommand("allocate", "allocate curtailment under deficits");
    AllocateArgs alloc_args;
    allocate_cmd->add_option("--forecast", alloc_args.forecast_path)->required();
    allocate_cmd->add_option("--supply", alloc_args.supply_path)->required();
    allocate_cmd->add_option("--weights", alloc_args.weights_path)->required();
    allocate_cmd->add_option("--out", alloc_args.out);

    auto* simulate_cmd = app.add_subcommand("simulate", "synthetic end-to-end pipeline run");
    double sim_gaps = -1.0;
    std::string sim_sizes;
    simulate_cmd->add_option("--gaps", sim_gaps, "feeder gap-injection rate");
    simulate_cmd->add_option("--sizes", sim_sizes, "planted group sizes");

    auto* run_cmd = app.add_subcommand("run", "run the pipeline on existing CSV inputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (generate->parsed()) {
            GlobalOptions g = global;
            pipeline::PipelineConfig config = resolve_config(g);
            if (gen_buildings >= 0) config.gen_buildings = static_cast<int>(gen_buildings);
            if (gen_hours >= 0) config.gen_hours = static_cast<int>(gen_hours);
            if (!gen_sizes.empty()) {
                config.gen_cluster_sizes.clear();
                apply_config_entry(config, "generator.cluster_sizes", gen_sizes);
            }
            if (gen_gaps >= 0.0) config.gen_gap_rate = gen_gaps;
            SyntheticOptions options;
            options.seed = derive_seed(config.seed, "generate");
            options.n_buildings = config.gen_buildings;
            options.n_hours = config.gen_hours;
            options.cluster_sizes = config.gen_cluster_sizes;
            options.gap_rate = config.gen_gap_rate;
            const SyntheticCampus campus = generate_synthetic_campus(options);
            std::filesystem::create_directories(config.out_dir);
            write_campus_csv(campus.dataset, config.out_dir + "/feeder.csv",
                             config.out_dir + "/inventory.csv", config.out_dir + "/calendar.csv");
            if (!global.quiet) std::cout << "wrote synthetic campus to " << config.out_dir << "\n";
            return kExitOk;
        }
        if (disaggregate->parsed()) return run_disaggregate(feeder, inventory, calendar, disagg_out);
        if (features->parsed()) return run_features(estimates_path, features_out);
        if (cluster_cmd->parsed()) return run_cluster(cluster_args, global);
        if (forecast_cmd->parsed()) return run_forecast(forecast_args, global);
        if (evaluate->parsed()) return run_evaluate(eval_args, global);
        if (allocate_cmd->parsed()) return run_allocate(alloc_args);
        if (simulate_cmd->parsed()) {
            pipeline::PipelineConfig config = resolve_config(global);
            if (sim_gaps >= 0.0) config.gen_gap_rate = sim_gaps;
            if (!sim_sizes.empty()) {
                config.gen_cluster_sizes.clear();
                apply_config_entry(config, "generator.cluster_sizes", sim_sizes);
                config.gen_buildings = 0;
                for (int s : config.gen_cluster_sizes) config.gen_buildings += s;
            }
            pipeline::simulate(config, global.quiet);
            return kExitOk;
        }
        if (run_cmd->parsed()) {
            pipeline::PipelineConfig config = resolve_config(global);
            pipeline::run_pipeline(config, global.quiet);
            return kExitOk;
        }
    } catch (const pipeline::StageError& e) {
        std::cerr << "error in stage '" << e.stage() << "': " << e.what() << "\n";
        return e.input_failure() ? kExitInput : kExitStage;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const ArgumentError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    }
    return kExitConfig;
}
