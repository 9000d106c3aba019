#include <doctest.h>

#include "gridshed/core/errors.hpp"
#include "gridshed/core/rng.hpp"
#include "gridshed/core/synthetic.hpp"
#include "gridshed/disagg/disagg.hpp"
#include "support/oracles.hpp"

using namespace gridshed;
using disagg::HourFlag;

namespace {

Appliance make_appliance(double kw, int count, int on_from, int on_to) {
    Appliance a;
    a.name = "a";
    a.rated_kw = kw;
    a.count = count;
    for (int h = 0; h < 24; ++h) {
        a.schedule[static_cast<std::size_t>(h)] = (h >= on_from && h <= on_to) ? 1 : 0;
    }
    return a;
}

CampusDataset single_building_dataset(const std::vector<Appliance>& appliances, int hours) {
    CampusDataset dataset;
    dataset.feeder.start = parse_hourstamp("2024-01-01T00:00:00");
    dataset.feeder.values.assign(static_cast<std::size_t>(hours), 1.0);
    dataset.calendar.assign(static_cast<std::size_t>(hours), 0);
    dataset.buildings.push_back({"B1", appliances});
    return dataset;
}

}  // namespace

TEST_CASE("aim estimate: constant schedule gives rated * count everywhere") {
    const CampusDataset dataset =
        single_building_dataset({make_appliance(2.0, 3, 0, 23)}, 48);
    const auto est = disagg::aim_estimate(dataset);
    for (Eigen::Index t = 0; t < est.values.rows(); ++t) {
        CHECK(est.values(t, 0) == doctest::Approx(6.0));
    }
}

TEST_CASE("aim estimate: all-zero schedule annihilates the sum") {
    Appliance off = make_appliance(5.0, 2, 0, 23);
    off.schedule.fill(0);
    const CampusDataset dataset = single_building_dataset({off}, 24);
    const auto est = disagg::aim_estimate(dataset);
    CHECK(est.values.maxCoeff() == 0.0);
}

TEST_CASE("aim estimate: two scheduled blocks evaluate by hand") {
    // 1 kW x 2 on hours 0-11 and 0.5 kW x 4 on hours 12-23: 2 kWh all day.
    const CampusDataset dataset = single_building_dataset(
        {make_appliance(1.0, 2, 0, 11), make_appliance(0.5, 4, 12, 23)}, 48);
    const auto est = disagg::aim_estimate(dataset);
    for (Eigen::Index t = 0; t < est.values.rows(); ++t) {
        CHECK(est.values(t, 0) == doctest::Approx(2.0));
    }
}

TEST_CASE("reconcile_hour keeps an already-feasible row") {
    Eigen::VectorXd row(3);
    row << 10, 20, 30;
    const auto result = disagg::reconcile_hour(row, 60.0);
    CHECK(result.flag == HourFlag::Reconciled);
    CHECK((result.values - row).norm() < 1e-12);
}

TEST_CASE("reconcile_hour projects onto the deficit simplex") {
    Eigen::VectorXd row(3);
    row << 10, 20, 30;
    const auto result = disagg::reconcile_hour(row, 30.0);
    CHECK(result.values.sum() == doctest::Approx(30.0).epsilon(1e-12));
    CHECK(result.values.minCoeff() >= 0.0);
    const Eigen::VectorXd expected = oracles::simplex_projection(row, 30.0);
    CHECK((result.values - expected).norm() < 1e-9);
}

TEST_CASE("single building is forced to the feeder value") {
    Eigen::VectorXd row(1);
    row << 5;
    const auto result = disagg::reconcile_hour(row, 42.0);
    CHECK(result.values(0) == doctest::Approx(42.0));
}

TEST_CASE("all-zero estimates with positive feeder split uniformly, flagged") {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(4);
    const auto result = disagg::reconcile_hour(row, 10.0);
    CHECK(result.flag == HourFlag::UniformSplit);
    for (int i = 0; i < 4; ++i) CHECK(result.values(i) == doctest::Approx(2.5));
}

TEST_CASE("negative feeder value is an argument error") {
    Eigen::VectorXd row(2);
    row << 1, 2;
    CHECK_THROWS_AS(disagg::reconcile_hour(row, -1.0), ArgumentError);
}

TEST_CASE("projection matches the exhaustive support-set oracle") {
    Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform_index(6));
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.uniform(0.0, 50.0);
        const double mass = rng.uniform(0.0, 80.0);
        const Eigen::VectorXd got = disagg::project_to_scaled_simplex(x, mass);
        const Eigen::VectorXd want = oracles::simplex_projection(x, mass);
        REQUIRE(want.size() == got.size());
        CHECK((got - want).norm() < 1e-9);
        CHECK(got.sum() == doctest::Approx(mass).epsilon(1e-9));
    }
}

TEST_CASE("projection is idempotent and non-expansive") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform_index(5));
        Eigen::VectorXd x(n), y(n);
        for (int i = 0; i < n; ++i) {
            x(i) = rng.uniform(0.0, 30.0);
            y(i) = rng.uniform(0.0, 30.0);
        }
        const double mass = rng.uniform(0.1, 60.0);
        const Eigen::VectorXd px = disagg::project_to_scaled_simplex(x, mass);
        const Eigen::VectorXd ppx = disagg::project_to_scaled_simplex(px, mass);
        CHECK((px - ppx).norm() < 1e-9);
        const Eigen::VectorXd py = disagg::project_to_scaled_simplex(y, mass);
        CHECK((px - py).norm() <= (x - y).norm() + 1e-12);
    }
}

TEST_CASE("reconcile_all: exact estimates pass through with zero residual") {
    const CampusDataset dataset =
        single_building_dataset({make_appliance(2.0, 3, 0, 23)}, 24);
    auto est = disagg::aim_estimate(dataset);
    HourlySeries feeder;
    feeder.start = est.start;
    feeder.values.assign(24, 6.0);
    const auto result = disagg::reconcile_all(est, feeder);
    CHECK(result.residual_norm.maxCoeff() == doctest::Approx(0.0));
    CHECK((result.reconciled.values - est.values).norm() == doctest::Approx(0.0));
    CHECK(result.weights(0) == doctest::Approx(1.0));
}

TEST_CASE("reconcile_all conserves feeder mass on synthetic data") {
    SyntheticOptions options;
    options.seed = 3;
    options.n_buildings = 5;
    options.n_hours = 96;
    options.cluster_sizes = {2, 2, 1};
    const SyntheticCampus campus = generate_synthetic_campus(options);
    const auto est = disagg::aim_estimate(campus.dataset);
    const auto result = disagg::reconcile_all(est, campus.dataset.feeder);
    for (Eigen::Index t = 0; t < est.values.rows(); ++t) {
        const double feeder = campus.dataset.feeder.values[static_cast<std::size_t>(t)];
        const double total = result.reconciled.values.row(t).sum();
        CHECK(std::fabs(total - feeder) <= 1e-9 * std::max(1.0, std::fabs(feeder)));
    }
}

TEST_CASE("gap hours pass estimates through and are flagged") {
    const CampusDataset dataset =
        single_building_dataset({make_appliance(2.0, 3, 0, 23)}, 24);
    auto est = disagg::aim_estimate(dataset);
    HourlySeries feeder;
    feeder.start = est.start;
    feeder.values.assign(24, 10.0);
    feeder.values[7] = HourlySeries::gap_marker();
    const auto result = disagg::reconcile_all(est, feeder);
    CHECK(result.flags[7] == HourFlag::GapPassthrough);
    CHECK(result.reconciled.values(7, 0) == doctest::Approx(est.values(7, 0)));
    CHECK(result.flags[6] == HourFlag::Reconciled);
    CHECK(result.reconciled.values(6, 0) == doctest::Approx(10.0));
}

TEST_CASE("axis mismatch is an argument error") {
    const CampusDataset dataset =
        single_building_dataset({make_appliance(2.0, 3, 0, 23)}, 24);
    auto est = disagg::aim_estimate(dataset);
    HourlySeries feeder;
    feeder.start = est.start;
    feeder.values.assign(23, 1.0);
    CHECK_THROWS_AS(disagg::reconcile_all(est, feeder), ArgumentError);
}
