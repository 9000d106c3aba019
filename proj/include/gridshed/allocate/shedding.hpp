#pragma once

#include <vector>

#include "gridshed/core/series.hpp"

namespace gridshed::allocate {

/// One hour's allocation problem: cover `deficit` by curtailing clusters,
/// each bounded by its demand, at minimum weighted cost. Lower weight means
/// cheaper to shed (sheds first); critical clusters get high weights.
struct SheddingProblem {
    double deficit = 0.0;                 // kWh, >= 0
    std::vector<double> cluster_demands;  // kWh, >= 0 each
    std::vector<double> weights;          // > 0 each

    void validate() const;
};

struct SheddingPlan {
    std::vector<double> curtailment;  // kWh per cluster, within [0, demand]
    double total_shed = 0.0;
    double objective = 0.0;           // sum of weight * curtailment
    bool feasible = true;
    double infeasibility_gap = 0.0;   // deficit - sum(demands) when infeasible
};

/// Deficit = max(0, forecast - supply). supply must be >= 0.
double compute_deficit(double forecast_total, double supply);

/// Exact continuous-knapsack optimum: shed clusters in ascending weight
/// order (ties: larger demand first, then cluster index) until the deficit
/// is covered; the marginal cluster sheds the fractional remainder. When the
/// deficit exceeds total demand the plan sheds everything and reports the
/// gap instead of failing (a blackout still needs a plan).
SheddingPlan solve_shedding(const SheddingProblem& problem);

/// Verification oracle: enumerates every candidate LP vertex (all
/// coordinates at a bound except at most one fractional one covering the
/// deficit exactly) and returns the feasible minimum-objective candidate.
/// Test-scale only: throws ArgumentError above 12 clusters.
SheddingPlan lp_oracle(const SheddingProblem& problem);

/// Hour-aligned supply and per-cluster demand forecasts.
struct DeficitSchedule {
    std::vector<double> supply;                        // per hour
    std::vector<std::vector<double>> cluster_demands;  // per hour, per cluster

    void validate() const;
};

/// Independent per-hour solves over a schedule.
std::vector<SheddingPlan> schedule_shedding(const DeficitSchedule& schedule,
                                            const std::vector<double>& weights);

}  // namespace gridshed::allocate
