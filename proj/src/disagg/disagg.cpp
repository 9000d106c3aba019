#include "gridshed/disagg/disagg.hpp"

#include <algorithm>
#include <cmath>

#include "gridshed/core/errors.hpp"

namespace gridshed::disagg {

const char* hour_flag_name(HourFlag flag) {
    switch (flag) {
        case HourFlag::Reconciled: return "ok";
        case HourFlag::GapPassthrough: return "gap";
        case HourFlag::UniformSplit: return "uniform";
    }
    return "?";
}

BuildingEstimates aim_estimate(const CampusDataset& dataset) {
    const auto hours = static_cast<Eigen::Index>(dataset.feeder.size());
    const auto n = static_cast<Eigen::Index>(dataset.buildings.size());

    BuildingEstimates est;
    est.start = dataset.feeder.start;
    est.building_ids.reserve(dataset.buildings.size());
    for (const auto& b : dataset.buildings) est.building_ids.push_back(b.building_id);
    est.values.resize(hours, n);

    // The schedule only depends on hour of day, so evaluate each building's
    // 24 levels once.
    Eigen::MatrixXd by_hour(24, n);
    for (Eigen::Index b = 0; b < n; ++b) {
        for (int h = 0; h < 24; ++h) {
            by_hour(h, b) = dataset.buildings[static_cast<std::size_t>(b)].load_at_hour(h);
        }
    }
    for (Eigen::Index t = 0; t < hours; ++t) {
        const int hod = dataset.feeder.stamp_at(static_cast<std::size_t>(t)).hour_of_day();
        est.values.row(t) = by_hour.row(hod);
    }
    return est;
}

Eigen::VectorXd project_to_scaled_simplex(const Eigen::VectorXd& x, double mass) {
    const Eigen::Index n = x.size();
    if (n == 0) throw ArgumentError("cannot project an empty vector");
    if (!(mass >= 0.0) || !std::isfinite(mass)) {
        throw ArgumentError("projection mass must be finite and >= 0");
    }
    if (mass == 0.0) return Eigen::VectorXd::Zero(n);

    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<double>());

    double cumulative = 0.0;
    double threshold = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        cumulative += sorted[static_cast<std::size_t>(j)];
        const double candidate = (cumulative - mass) / static_cast<double>(j + 1);
        if (sorted[static_cast<std::size_t>(j)] - candidate > 0.0) {
            threshold = candidate;
        }
    }
    return (x.array() - threshold).cwiseMax(0.0);
}

HourReconciliation reconcile_hour(const Eigen::VectorXd& aim_row, double feeder_value) {
    if (aim_row.size() == 0) throw ArgumentError("reconcile_hour: empty estimate row");
    if (!std::isfinite(feeder_value) || feeder_value < 0.0) {
        throw ArgumentError("reconcile_hour: feeder value must be finite and >= 0");
    }
    HourReconciliation out;
    if (aim_row.maxCoeff() <= 0.0 && feeder_value > 0.0) {
        out.values = Eigen::VectorXd::Constant(
            aim_row.size(), feeder_value / static_cast<double>(aim_row.size()));
        out.flag = HourFlag::UniformSplit;
        return out;
    }
    out.values = project_to_scaled_simplex(aim_row, feeder_value);
    out.flag = HourFlag::Reconciled;
    return out;
}

ReconciliationResult reconcile_all(const BuildingEstimates& estimates,
                                   const HourlySeries& feeder) {
    if (estimates.n_hours() != feeder.size()) {
        throw ArgumentError("reconcile_all: estimate and feeder lengths differ");
    }
    if (!(estimates.start == feeder.start)) {
        throw ArgumentError("reconcile_all: estimate and feeder start times differ");
    }

    const auto hours = static_cast<Eigen::Index>(feeder.size());
    ReconciliationResult result;
    result.reconciled = estimates;
    result.residual_norm = Eigen::VectorXd::Zero(hours);
    result.flags.assign(static_cast<std::size_t>(hours), HourFlag::Reconciled);

    for (Eigen::Index t = 0; t < hours; ++t) {
        if (feeder.is_gap(static_cast<std::size_t>(t))) {
            result.flags[static_cast<std::size_t>(t)] = HourFlag::GapPassthrough;
            continue;
        }
        HourReconciliation hour = reconcile_hour(estimates.values.row(t).transpose(),
                                                 feeder.values[static_cast<std::size_t>(t)]);
        result.residual_norm(t) =
            (hour.values - estimates.values.row(t).transpose()).squaredNorm();
        result.reconciled.values.row(t) = hour.values.transpose();
        result.flags[static_cast<std::size_t>(t)] = hour.flag;
    }

    const Eigen::Index n = static_cast<Eigen::Index>(estimates.n_buildings());
    result.weights.resize(n);
    for (Eigen::Index b = 0; b < n; ++b) {
        const double est_total = estimates.values.col(b).sum();
        result.weights(b) =
            est_total > 0.0 ? result.reconciled.values.col(b).sum() / est_total : 1.0;
    }
    return result;
}

}  // namespace gridshed::disagg
