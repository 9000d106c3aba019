#include "gridshed/reduce/pca.hpp"

#include <cmath>
#include <cstdio>

#include "gridshed/core/errors.hpp"
#include "gridshed/numeric/symeig.hpp"

namespace gridshed::reduce {

PcaModel pca_fit(const FeatureMatrix& features, double variance_target) {
    features.validate();
    if (features.n_rows() < 2) {
        throw ArgumentError("pca_fit: need at least 2 rows");
    }
    if (!(variance_target > 0.0) || variance_target > 1.0) {
        throw ArgumentError("pca_fit: variance_target must be in (0, 1]");
    }

    const Eigen::Index n = features.n_rows();
    const Eigen::Index d = features.n_cols();

    PcaModel model;
    model.mean = features.values.colwise().mean();
    Eigen::MatrixXd centered = features.values.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n);

    numeric::SymmetricEigen eig = numeric::symmetric_eigen(cov);
    // Covariance eigenvalues are >= 0 up to roundoff.
    Eigen::VectorXd lambda = eig.values.cwiseMax(0.0);
    model.total_variance = lambda.sum();

    Eigen::Index k = 1;
    if (model.total_variance > 0.0) {
        double cumulative = 0.0;
        for (k = 0; k < d; ) {
            cumulative += lambda(k);
            ++k;
            if (cumulative / model.total_variance >= variance_target - 1e-12) break;
        }
    }

    model.components.resize(k, d);
    model.explained_variance = lambda.head(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        Eigen::VectorXd component = eig.vectors.col(i);
        // Deterministic sign: largest-magnitude entry positive (first on ties).
        Eigen::Index arg = 0;
        component.cwiseAbs().maxCoeff(&arg);
        if (component(arg) < 0.0) component = -component;
        model.components.row(i) = component.transpose();
    }
    return model;
}

FeatureMatrix pca_transform(const PcaModel& model, const FeatureMatrix& features) {
    features.validate();
    if (features.n_cols() != model.mean.size()) {
        throw ArgumentError("pca_transform: feature dimension does not match the model");
    }
    FeatureMatrix out;
    out.building_ids = features.building_ids;
    out.values = (features.values.rowwise() - model.mean.transpose()) *
                 model.components.transpose();
    for (Eigen::Index i = 0; i < model.n_components(); ++i) {
        char name[16];
        std::snprintf(name, sizeof(name), "pc%d", static_cast<int>(i) + 1);
        out.feature_names.push_back(name);
    }
    return out;
}

}  // namespace gridshed::reduce
