#include <doctest.h>

#include <algorithm>

#include "gridshed/cluster/algorithms.hpp"
#include "gridshed/cluster/validity.hpp"
#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"
#include "gridshed/numeric/symeig.hpp"
#include "support/datasets.hpp"
#include "support/oracles.hpp"

using namespace gridshed;
using namespace gridshed::cluster;

namespace {

/// Exhaustive minimum WCSS over all assignments of n points to k clusters.
double brute_force_wcss(const Eigen::MatrixXd& points, int k) {
    const int n = static_cast<int>(points.rows());
    std::vector<int> assignment(static_cast<std::size_t>(n), 0);
    double best = std::numeric_limits<double>::infinity();
    const long total = static_cast<long>(std::pow(k, n));
    for (long code = 0; code < total; ++code) {
        long rest = code;
        for (int i = 0; i < n; ++i) {
            assignment[static_cast<std::size_t>(i)] = static_cast<int>(rest % k);
            rest /= k;
        }
        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
        Eigen::VectorXd counts = Eigen::VectorXd::Zero(k);
        for (int i = 0; i < n; ++i) {
            sums.row(assignment[static_cast<std::size_t>(i)]) += points.row(i);
            counts(assignment[static_cast<std::size_t>(i)]) += 1.0;
        }
        double wcss = 0.0;
        bool valid = true;
        for (int c = 0; c < k; ++c) {
            if (counts(c) == 0.0) {
                valid = false;
                break;
            }
        }
        if (!valid) continue;
        for (int i = 0; i < n; ++i) {
            const int c = assignment[static_cast<std::size_t>(i)];
            wcss += (points.row(i) - sums.row(c) / counts(c)).squaredNorm();
        }
        best = std::min(best, wcss);
    }
    return best;
}

const std::vector<Eigen::Vector2d> kThreeCenters = {
    {0.0, 0.0}, {10.0, 0.0}, {0.0, 10.0}};

}  // namespace

TEST_CASE("kmeans: two points, two clusters") {
    Eigen::MatrixXd values(2, 2);
    values << 0, 0, 5, 5;
    const auto model = fit_kmeans(datasets::wrap(values), 2, 1);
    CHECK(model.labels[0] != model.labels[1]);
    CHECK(model.params.at("wcss") == doctest::Approx(0.0));
}

TEST_CASE("kmeans: k=1 gives the global mean and total scatter") {
    Eigen::MatrixXd values(4, 1);
    values << 1, 2, 3, 6;
    const auto model = fit_kmeans(datasets::wrap(values), 1, 1);
    CHECK(model.centroids(0, 0) == doctest::Approx(3.0));
    // WCSS = sum (x - mean)^2 = 4 + 1 + 0 + 9 = 14.
    CHECK(model.params.at("wcss") == doctest::Approx(14.0));
}

TEST_CASE("kmeans reaches the exhaustive optimum on 12 planted points") {
    const auto data = datasets::blobs(kThreeCenters, 4, 0.5, 7);
    const auto model = fit_kmeans(data.features, 3, 11);
    CHECK(datasets::best_permutation_accuracy(data.labels, model.labels) == doctest::Approx(1.0));
    const double optimum = brute_force_wcss(data.features.values, 3);
    CHECK(model.params.at("wcss") == doctest::Approx(optimum).epsilon(1e-9));
}

TEST_CASE("kmeans: k > n is rejected; labels are deterministic per seed") {
    Eigen::MatrixXd values(3, 1);
    values << 1, 2, 3;
    CHECK_THROWS_AS(fit_kmeans(datasets::wrap(values), 4, 1), ArgumentError);
    const auto data = datasets::blobs(kThreeCenters, 6, 0.8, 3);
    const auto a = fit_kmeans(data.features, 3, 5);
    const auto b = fit_kmeans(data.features, 3, 5);
    CHECK(a.labels == b.labels);
}

TEST_CASE("kmeans labels are invariant under positive feature scaling") {
    const auto data = datasets::blobs(kThreeCenters, 6, 0.7, 19);
    const auto base = fit_kmeans(data.features, 3, 21);
    auto scaled = data.features;
    scaled.values *= 3.7;
    const auto rescaled = fit_kmeans(scaled, 3, 21);
    CHECK(base.labels == rescaled.labels);
}

TEST_CASE("minibatch with full batches matches the Lloyd optimum on separated blobs") {
    const auto data = datasets::blobs(kThreeCenters, 8, 0.5, 13);
    const auto lloyd = fit_kmeans(data.features, 3, 5);
    const auto mb = fit_minibatch_kmeans(data.features, 3,
                                         static_cast<int>(data.features.n_rows()), 5);
    CHECK(mb.params.at("wcss") ==
          doctest::Approx(lloyd.params.at("wcss")).epsilon(1e-6));
}

TEST_CASE("minibatch wcss stays within 5% of kmeans on planted blobs") {
    const auto data = datasets::blobs(kThreeCenters, 10, 0.8, 29);
    const auto lloyd = fit_kmeans(data.features, 3, 31);
    const auto mb = fit_minibatch_kmeans(data.features, 3, 8, 31);
    CHECK(mb.params.at("wcss") <= 1.05 * lloyd.params.at("wcss"));
    const auto again = fit_minibatch_kmeans(data.features, 3, 8, 31);
    CHECK(mb.labels == again.labels);
}

TEST_CASE("hierarchical: k = n leaves singletons") {
    Eigen::MatrixXd values(4, 1);
    values << 0, 1, 10, 11;
    const auto model = fit_hierarchical(datasets::wrap(values), 4);
    std::vector<int> sorted = model.labels;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("hierarchical recovers the two pairs on the 0-1-10-11 line") {
    Eigen::MatrixXd values(4, 1);
    values << 0, 1, 10, 11;
    const auto model = fit_hierarchical(datasets::wrap(values), 2);
    CHECK(model.labels[0] == model.labels[1]);
    CHECK(model.labels[2] == model.labels[3]);
    CHECK(model.labels[0] != model.labels[2]);
}

TEST_CASE("ward merge costs are non-decreasing") {
    const auto data = datasets::blobs(kThreeCenters, 7, 1.0, 41);
    const auto merges = ward_linkage(data.features.values);
    for (std::size_t i = 1; i < merges.size(); ++i) {
        CHECK(merges[i].cost >= merges[i - 1].cost - 1e-12);
    }
}

TEST_CASE("dbscan: huge eps with min_pts 1 is one cluster, no noise") {
    const auto data = datasets::blobs(kThreeCenters, 5, 1.0, 3);
    const auto model = fit_dbscan(data.features, 1e6, 1);
    CHECK(model.n_clusters() == 1);
    CHECK_FALSE(model.has_noise());
}

TEST_CASE("dbscan labels an isolated point as noise") {
    Eigen::MatrixXd values(6, 2);
    values << 0, 0, 0.1, 0, 0, 0.1, 0.1, 0.1, 0.05, 0.05, 50, 50;
    const auto model = fit_dbscan(datasets::wrap(values), 0.5, 3);
    CHECK(model.labels[5] == -1);
    CHECK(model.n_clusters() == 1);
}

TEST_CASE("dbscan separates two moons where kmeans cannot") {
    const auto data = datasets::two_moons(30, 0.05, 17);
    const auto db = fit_dbscan(data.features, 0.3, 3);
    CHECK(datasets::best_permutation_accuracy(data.labels, db.labels) >= 0.95);
    const auto km = fit_kmeans(data.features, 2, 17);
    CHECK(datasets::best_permutation_accuracy(data.labels, km.labels) < 0.95);
}

TEST_CASE("gmm log-likelihood is non-decreasing") {
    const auto data = datasets::blobs({{0, 0}, {6, 0}}, 15, 1.0, 23);
    std::vector<double> trace;
    fit_gmm(data.features, 2, 23, &trace);
    REQUIRE(trace.size() >= 2);
    for (std::size_t i = 1; i < trace.size(); ++i) {
        CHECK(trace[i] >= trace[i - 1] - 1e-7 * (1.0 + std::fabs(trace[i - 1])));
    }
}

TEST_CASE("gmm with one component recovers the sample moments") {
    Rng rng(5);
    Eigen::MatrixXd values(200, 2);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        values(i, 0) = 2.0 + rng.gaussian();
        values(i, 1) = -1.0 + 0.5 * rng.gaussian();
    }
    const auto features = datasets::wrap(values);
    const auto model = fit_gmm(features, 1, 5);
    const Eigen::RowVectorXd mean = values.colwise().mean();
    CHECK((model.centroids.row(0) - mean).norm() < 1e-6);
    CHECK(model.memberships.col(0).minCoeff() == doctest::Approx(1.0));
}

TEST_CASE("gmm memberships are confident on well-separated gaussians") {
    const auto data = datasets::blobs({{0, 0}, {12, 12}}, 20, 1.0, 31);
    const auto model = fit_gmm(data.features, 2, 31);
    for (Eigen::Index i = 0; i < model.memberships.rows(); ++i) {
        CHECK(model.memberships.row(i).sum() == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(model.memberships.row(i).maxCoeff() >= 0.99);
    }
    CHECK(datasets::best_permutation_accuracy(data.labels, model.labels) == doctest::Approx(1.0));
}

TEST_CASE("normalized laplacian has a zero eigenvalue with eigenvector D^(1/2) 1") {
    const auto data = datasets::blobs({{0, 0}, {4, 0}}, 6, 0.6, 43);
    const Eigen::MatrixXd& x = data.features.values;
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd affinity(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            affinity(i, j) = i == j ? 0.0 : std::exp(-(x.row(i) - x.row(j)).squaredNorm() / 4.0);
        }
    }
    const Eigen::MatrixXd lap = normalized_laplacian(affinity);
    const auto eig = numeric::symmetric_eigen(lap);
    const double smallest = eig.values(n - 1);
    CHECK(std::fabs(smallest) < 1e-9);
    Eigen::VectorXd expected(n);
    const Eigen::VectorXd degree = affinity.rowwise().sum();
    for (Eigen::Index i = 0; i < n; ++i) expected(i) = std::sqrt(degree(i));
    expected.normalize();
    const double overlap = std::fabs(expected.dot(eig.vectors.col(n - 1)));
    CHECK(overlap == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("spectral clustering labels disconnected affinity components exactly") {
    const int n = 10;
    Eigen::MatrixXd affinity = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool same = (i < 4) == (j < 4);
            if (same) affinity(i, j) = 1.0;
        }
    }
    const auto model = fit_spectral_affinity(affinity, 2, 7);
    for (int i = 0; i < 4; ++i) CHECK(model.labels[static_cast<std::size_t>(i)] == model.labels[0]);
    for (int i = 4; i < n; ++i) CHECK(model.labels[static_cast<std::size_t>(i)] == model.labels[4]);
    CHECK(model.labels[0] != model.labels[4]);
}

TEST_CASE("spectral clustering recovers concentric rings") {
    // n = 80; the inner ring carries most points so the median pairwise
    // distance (the pinned bandwidth) stays below the ring gap.
    const auto data = datasets::rings(60, 20, 0.5, 5.0, 0.03, 11);
    const auto model = fit_spectral(data.features, 2, 11);
    CHECK(datasets::best_permutation_accuracy(data.labels, model.labels) >= 0.95);
}

TEST_CASE("spectral clustering rejects identical points") {
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(5, 2);
    CHECK_THROWS_AS(fit_spectral(datasets::wrap(values), 2, 1), ValidationError);
}

TEST_CASE("validity: two singleton clusters at distinct points") {
    Eigen::MatrixXd values(2, 1);
    values << 0, 3;
    const auto scores = compute_validity(datasets::wrap(values), {0, 1});
    CHECK(scores.silhouette == doctest::Approx(0.0));
    CHECK(scores.davies_bouldin == doctest::Approx(0.0));
}

TEST_CASE("validity: tight far-apart blobs score near-perfect") {
    const auto data = datasets::blobs({{0, 0}, {100, 0}}, 20, 0.5, 3);
    const auto scores = compute_validity(data.features, data.labels);
    CHECK(scores.silhouette > 0.9);
    CHECK(scores.davies_bouldin < 0.1);
    CHECK(scores.calinski_harabasz > 100.0);
}

TEST_CASE("validity: random labels on uniform data give near-zero silhouette") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed);
        Eigen::MatrixXd values(200, 2);
        for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = rng.uniform(0.0, 1.0);
        std::vector<int> labels(200);
        for (auto& l : labels) l = static_cast<int>(rng.uniform_index(3));
        const auto scores = compute_validity(datasets::wrap(values), labels);
        CHECK(std::fabs(scores.silhouette) < 0.1);
    }
}

TEST_CASE("validity indices match the naive oracles") {
    Rng rng(71);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 30 + static_cast<int>(rng.uniform_index(80));
        const int k = 2 + static_cast<int>(rng.uniform_index(4));
        Eigen::MatrixXd values(n, 3);
        for (Eigen::Index i = 0; i < values.size(); ++i) values(i) = rng.gaussian();
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i < k
            ? i  // guarantee every cluster is non-empty
            : static_cast<int>(rng.uniform_index(k));
        const auto features = datasets::wrap(values);
        const auto scores = compute_validity(features, labels);
        CHECK(scores.silhouette ==
              doctest::Approx(oracles::silhouette(values, labels)).epsilon(1e-9));
        CHECK(scores.davies_bouldin ==
              doctest::Approx(oracles::davies_bouldin(values, labels)).epsilon(1e-9));
        CHECK(scores.calinski_harabasz ==
              doctest::Approx(oracles::calinski_harabasz(values, labels)).epsilon(1e-9));
    }
}

TEST_CASE("validity indices are exactly invariant under label permutation") {
    const auto data = datasets::blobs(kThreeCenters, 8, 1.2, 9);
    const auto base = compute_validity(data.features, data.labels);
    std::vector<int> permuted = data.labels;
    for (auto& l : permuted) l = (l + 1) % 3;
    const auto scores = compute_validity(data.features, permuted);
    CHECK(scores.silhouette == base.silhouette);
    CHECK(scores.davies_bouldin == base.davies_bouldin);
    CHECK(scores.calinski_harabasz == base.calinski_harabasz);
    CHECK(scores.wcss == base.wcss);
}

TEST_CASE("validity excludes noise and requires two clusters") {
    Eigen::MatrixXd values(4, 1);
    values << 0, 1, 2, 3;
    CHECK_THROWS_AS(compute_validity(datasets::wrap(values), {0, 0, 0, 0}), ValidationError);
    CHECK_THROWS_AS(compute_validity(datasets::wrap(values), {0, 0, -1, -1}), ValidationError);
    CHECK_NOTHROW(compute_validity(datasets::wrap(values), {0, 0, 1, -1}));
}

TEST_CASE("select_k tabulates every k and agrees with direct validity calls") {
    const auto data = datasets::blobs(kThreeCenters, 8, 0.8, 57);
    const auto report = select_k(data.features, Algorithm::KMeans, {2, 3, 4}, 57);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.silhouette_best_k == 3);
    for (const auto& row : report.rows) {
        const auto refit = fit_kmeans(data.features, row.k, 57);
        const auto direct = compute_validity(data.features, refit.labels);
        CHECK(row.scores.silhouette == direct.silhouette);
        CHECK(row.scores.wcss == direct.wcss);
    }
}

TEST_CASE("select_k rejects dbscan and out-of-range k") {
    const auto data = datasets::blobs(kThreeCenters, 4, 0.5, 5);
    CHECK_THROWS_AS(select_k(data.features, Algorithm::Dbscan, {2, 3}, 1), ArgumentError);
    CHECK_THROWS_AS(select_k(data.features, Algorithm::KMeans, {1, 2}, 1), ArgumentError);
    const auto single = select_k(data.features, Algorithm::KMeans, {2}, 1);
    CHECK(single.rows.size() == 1);
    CHECK(single.silhouette_best_k == 2);
}

TEST_CASE("kmeans wcss is non-increasing as k grows") {
    const auto data = datasets::blobs(kThreeCenters, 8, 1.5, 87);
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 6; ++k) {
        const auto model = fit_kmeans(data.features, k, 87);
        CHECK(model.params.at("wcss") <= previous + 1e-9);
        previous = model.params.at("wcss");
    }
}
