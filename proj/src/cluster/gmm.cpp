#include <Eigen/Cholesky>
#include <cmath>
#include <limits>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"

namespace gridshed::cluster {

namespace {

constexpr double kRidge = 1e-6;
constexpr double kLogTwoPi = 1.8378770664093454836;

struct Component {
    double weight = 0.0;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::LLT<Eigen::MatrixXd> llt;
    double log_det = 0.0;

    void refresh() {
        cov.diagonal().array() += kRidge;
        llt.compute(cov);
        double jitter = kRidge;
        while (llt.info() != Eigen::Success && jitter < 1e3) {
            jitter *= 10.0;
            cov.diagonal().array() += jitter;
            llt.compute(cov);
        }
        log_det = 0.0;
        for (Eigen::Index i = 0; i < cov.rows(); ++i) {
            log_det += 2.0 * std::log(llt.matrixL()(i, i));
        }
    }

    double log_pdf(const Eigen::VectorXd& x) const {
        const Eigen::VectorXd diff = x - mean;
        const double maha = llt.matrixL().solve(diff).squaredNorm();
        return -0.5 * (static_cast<double>(cov.rows()) * kLogTwoPi + log_det + maha);
    }
};

double log_sum_exp(const Eigen::VectorXd& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((v.array() - m).exp().sum());
}

}  // namespace

ClusterModel fit_gmm(const FeatureMatrix& features, int k, std::uint64_t seed,
                     std::vector<double>* log_likelihood_trace) {
    features.validate();
    const Eigen::Index n = features.n_rows();
    const Eigen::Index d = features.n_cols();
    if (k < 1 || k > n) throw ArgumentError("fit_gmm: k must be in [1, n]");

    // Initialize from a k-means fit.
    ClusterModel init = fit_kmeans(features, k, derive_seed(seed, "gmm-init"));
    Eigen::MatrixXd global_cov = Eigen::MatrixXd::Zero(d, d);
    {
        const Eigen::RowVectorXd mu = features.values.colwise().mean();
        Eigen::MatrixXd centered = features.values.rowwise() - mu;
        global_cov = centered.transpose() * centered / static_cast<double>(n);
    }

    std::vector<Component> comps(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
        Component& comp = comps[static_cast<std::size_t>(c)];
        comp.mean = init.centroids.row(c).transpose();
        comp.cov = Eigen::MatrixXd::Zero(d, d);
        double count = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (init.labels[static_cast<std::size_t>(i)] != c) continue;
            const Eigen::VectorXd diff = features.values.row(i).transpose() - comp.mean;
            comp.cov += diff * diff.transpose();
            count += 1.0;
        }
        if (count >= 2.0) {
            comp.cov /= count;
        } else {
            comp.cov = global_cov;
        }
        comp.weight = std::max(count, 1.0) / static_cast<double>(n);
        comp.refresh();
    }
    {
        double wsum = 0.0;
        for (const auto& comp : comps) wsum += comp.weight;
        for (auto& comp : comps) comp.weight /= wsum;
    }

    Eigen::MatrixXd log_resp(n, k);
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 500; ++iter) {
        // E step
        double ll = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            Eigen::VectorXd row(k);
            for (int c = 0; c < k; ++c) {
                row(c) = std::log(comps[static_cast<std::size_t>(c)].weight) +
                         comps[static_cast<std::size_t>(c)].log_pdf(
                             features.values.row(i).transpose());
            }
            const double norm = log_sum_exp(row);
            ll += norm;
            log_resp.row(i) = (row.array() - norm).transpose();
        }
        if (log_likelihood_trace) log_likelihood_trace->push_back(ll);
        if (ll - prev_ll < 1e-8 && iter > 0) break;
        prev_ll = ll;

        // M step
        for (int c = 0; c < k; ++c) {
            Component& comp = comps[static_cast<std::size_t>(c)];
            const Eigen::VectorXd resp = log_resp.col(c).array().exp();
            const double total = std::max(resp.sum(), 1e-300);
            comp.weight = total / static_cast<double>(n);
            comp.mean = (features.values.transpose() * resp) / total;
            Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Eigen::VectorXd diff = features.values.row(i).transpose() - comp.mean;
                cov += resp(i) * (diff * diff.transpose());
            }
            comp.cov = cov / total;
            comp.refresh();
        }
    }

    ClusterModel model;
    model.algorithm = Algorithm::Gmm;
    model.seed = seed;
    model.memberships = log_resp.array().exp();
    // Renormalize rows against accumulated roundoff.
    for (Eigen::Index i = 0; i < n; ++i) {
        model.memberships.row(i) /= model.memberships.row(i).sum();
    }
    model.labels.resize(static_cast<std::size_t>(n));
    model.centroids.resize(k, d);
    for (int c = 0; c < k; ++c) {
        model.centroids.row(c) = comps[static_cast<std::size_t>(c)].mean.transpose();
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index arg = 0;
        model.memberships.row(i).maxCoeff(&arg);
        // maxCoeff returns the first maximum, so ties go to the lowest index.
        model.labels[static_cast<std::size_t>(i)] = static_cast<int>(arg);
    }
    model.params["k"] = k;
    model.params["ridge"] = kRidge;
    model.params["log_likelihood"] = prev_ll;
    return model;
}

}  // namespace gridshed::cluster
