#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "gridshed/disagg/disagg.hpp"

namespace gridshed::reduce {

/// Buildings-by-features numeric table.
struct FeatureMatrix {
    std::vector<std::string> building_ids;
    Eigen::MatrixXd values;  // n x d, all finite
    std::vector<std::string> feature_names;

    Eigen::Index n_rows() const { return values.rows(); }
    Eigen::Index n_cols() const { return values.cols(); }

    /// Throws ValidationError on non-finite entries or shape mismatches.
    void validate() const;
};

/// Per-building diurnal and statistical summary: 24 mean hour-of-day loads,
/// overall mean, population standard deviation, peak value, peak hour (the
/// hour of day with the highest mean load) and load factor (mean/peak,
/// 0 when the peak is 0). Gap entries are excluded from all averages.
///
/// Requires at least 48 hours of data; throws ValidationError for a building
/// whose entries are all gaps (naming it).
FeatureMatrix extract_features(const disagg::BuildingEstimates& estimates);

struct ZscoreResult {
    FeatureMatrix normalized;
    Eigen::VectorXd mean;
    Eigen::VectorXd std_dev;  // population standard deviation per column
    std::vector<Eigen::Index> constant_columns;  // mapped to all-zeros
};

/// Column-wise z-score normalization (population std). Constant columns map
/// to zeros and are reported. Throws ArgumentError for fewer than 2 rows.
ZscoreResult zscore_normalize(const FeatureMatrix& features);

}  // namespace gridshed::reduce
