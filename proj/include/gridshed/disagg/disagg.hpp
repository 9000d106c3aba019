#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "gridshed/core/dataset.hpp"

namespace gridshed::disagg {

/// Bottom-up hourly load estimates, one column per building.
struct BuildingEstimates {
    std::vector<std::string> building_ids;
    HourStamp start;
    Eigen::MatrixXd values;  // hours x buildings, kWh, all >= 0

    std::size_t n_hours() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t n_buildings() const { return static_cast<std::size_t>(values.cols()); }
};

/// Per-hour outcome of the reconciliation step.
enum class HourFlag : std::uint8_t {
    Reconciled,      ///< projected onto the feeder-sum constraint
    GapPassthrough,  ///< feeder reading missing; inventory estimates kept as-is
    UniformSplit,    ///< all-zero estimates with positive feeder; split evenly
};

const char* hour_flag_name(HourFlag flag);

struct ReconciliationResult {
    BuildingEstimates reconciled;
    /// Aggregate reconciled-to-estimated energy ratio per building (1 when a
    /// building's estimate is identically zero).
    Eigen::VectorXd weights;
    /// Squared distance between reconciled and estimated vectors, per hour.
    Eigen::VectorXd residual_norm;
    std::vector<HourFlag> flags;
};

/// Inventory-based estimate: entry (t, b) is the sum over building b's
/// appliances of state(hour-of-day) * rated_kw * count.
BuildingEstimates aim_estimate(const CampusDataset& dataset);

/// Euclidean projection of x onto the scaled simplex {v >= 0, sum v = mass}.
/// Sort-based threshold algorithm, exact in O(n log n). mass must be >= 0.
Eigen::VectorXd project_to_scaled_simplex(const Eigen::VectorXd& x, double mass);

struct HourReconciliation {
    Eigen::VectorXd values;
    HourFlag flag = HourFlag::Reconciled;
};

/// Reconcile one hour: the closest non-negative per-building vector summing
/// to the feeder reading. All-zero estimates with a positive reading fall
/// back to a uniform split (flagged). Throws ArgumentError for an empty row
/// or a negative/non-finite feeder value.
HourReconciliation reconcile_hour(const Eigen::VectorXd& aim_row, double feeder_value);

/// Apply reconcile_hour independently to every hour. Hours where the feeder
/// has a gap pass the estimates through unchanged and are flagged. Throws
/// ArgumentError when the time axes disagree.
ReconciliationResult reconcile_all(const BuildingEstimates& estimates,
                                   const HourlySeries& feeder);

}  // namespace gridshed::disagg
