#include "gridshed/reduce/features.hpp"

#include <cmath>
#include <cstdio>

#include "gridshed/core/errors.hpp"
#include "gridshed/core/series.hpp"

namespace gridshed::reduce {

void FeatureMatrix::validate() const {
    if (values.rows() != static_cast<Eigen::Index>(building_ids.size())) {
        throw ValidationError("feature matrix row count does not match building ids");
    }
    if (values.cols() != static_cast<Eigen::Index>(feature_names.size())) {
        throw ValidationError("feature matrix column count does not match feature names");
    }
    if (!values.allFinite()) {
        throw ValidationError("feature matrix contains non-finite entries");
    }
}

FeatureMatrix extract_features(const disagg::BuildingEstimates& estimates) {
    const Eigen::Index hours = estimates.values.rows();
    const Eigen::Index n = estimates.values.cols();
    if (hours < 48) {
        throw ArgumentError("extract_features: need at least 48 hours of data");
    }

    FeatureMatrix out;
    out.building_ids = estimates.building_ids;
    for (int h = 0; h < 24; ++h) {
        char name[16];
        std::snprintf(name, sizeof(name), "mean_h%02d", h);
        out.feature_names.push_back(name);
    }
    out.feature_names.insert(out.feature_names.end(),
                             {"mean", "std_dev", "peak", "peak_hour", "load_factor"});
    out.values.resize(n, 29);

    for (Eigen::Index b = 0; b < n; ++b) {
        double hod_sum[24] = {};
        int hod_count[24] = {};
        double sum = 0.0, sum_sq = 0.0, peak = 0.0;
        long count = 0;
        for (Eigen::Index t = 0; t < hours; ++t) {
            const double v = estimates.values(t, b);
            if (HourlySeries::is_gap_value(v)) continue;
            const int hod = estimates.start.hour_of_day() + static_cast<int>(t % 24);
            hod_sum[hod % 24] += v;
            hod_count[hod % 24] += 1;
            sum += v;
            sum_sq += v * v;
            peak = std::max(peak, v);
            ++count;
        }
        if (count == 0) {
            throw ValidationError("building " + estimates.building_ids[static_cast<std::size_t>(b)] +
                                  " has no non-gap data");
        }
        const double mean = sum / static_cast<double>(count);
        const double var = std::max(sum_sq / static_cast<double>(count) - mean * mean, 0.0);

        int peak_hour = 0;
        double peak_hour_mean = -1.0;
        for (int h = 0; h < 24; ++h) {
            const double m = hod_count[h] > 0 ? hod_sum[h] / hod_count[h] : 0.0;
            out.values(b, h) = m;
            if (m > peak_hour_mean) {
                peak_hour_mean = m;
                peak_hour = h;
            }
        }
        out.values(b, 24) = mean;
        out.values(b, 25) = std::sqrt(var);
        out.values(b, 26) = peak;
        out.values(b, 27) = static_cast<double>(peak_hour);
        out.values(b, 28) = peak > 0.0 ? mean / peak : 0.0;
    }
    out.validate();
    return out;
}

ZscoreResult zscore_normalize(const FeatureMatrix& features) {
    features.validate();
    const Eigen::Index n = features.n_rows();
    const Eigen::Index d = features.n_cols();
    if (n < 2) {
        throw ArgumentError("zscore_normalize: need at least 2 rows");
    }

    ZscoreResult out;
    out.normalized = features;
    out.mean = features.values.colwise().mean();
    out.std_dev.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double var =
            (features.values.col(j).array() - out.mean(j)).square().sum() /
            static_cast<double>(n);
        out.std_dev(j) = std::sqrt(var);
        if (out.std_dev(j) > 0.0) {
            out.normalized.values.col(j) =
                (features.values.col(j).array() - out.mean(j)) / out.std_dev(j);
        } else {
            out.normalized.values.col(j).setZero();
            out.constant_columns.push_back(j);
        }
    }
    return out;
}

}  // namespace gridshed::reduce
