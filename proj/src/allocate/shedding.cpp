#include "gridshed/allocate/shedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "gridshed/core/errors.hpp"

namespace gridshed::allocate {

void SheddingProblem::validate() const {
    if (!(deficit >= 0.0) || !std::isfinite(deficit)) {
        throw ArgumentError("shedding deficit must be finite and >= 0");
    }
    if (cluster_demands.size() != weights.size() || cluster_demands.empty()) {
        throw ArgumentError("demands and weights must be non-empty and equal length");
    }
    for (double d : cluster_demands) {
        if (!(d >= 0.0) || !std::isfinite(d)) {
            throw ArgumentError("cluster demands must be finite and >= 0");
        }
    }
    for (double w : weights) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw ArgumentError("priority weights must be finite and > 0");
        }
    }
}

double compute_deficit(double forecast_total, double supply) {
    if (!std::isfinite(forecast_total) || !std::isfinite(supply)) {
        throw ArgumentError("compute_deficit: inputs must be finite");
    }
    if (supply < 0.0) {
        throw ArgumentError("compute_deficit: supply must be >= 0");
    }
    return std::max(0.0, forecast_total - supply);
}

SheddingPlan solve_shedding(const SheddingProblem& problem) {
    problem.validate();
    const std::size_t n = problem.cluster_demands.size();

    SheddingPlan plan;
    plan.curtailment.assign(n, 0.0);

    const double total_demand =
        std::accumulate(problem.cluster_demands.begin(), problem.cluster_demands.end(), 0.0);
    if (problem.deficit > total_demand) {
        plan.curtailment = problem.cluster_demands;
        plan.total_shed = total_demand;
        plan.feasible = false;
        plan.infeasibility_gap = problem.deficit - total_demand;
        for (std::size_t c = 0; c < n; ++c) {
            plan.objective += problem.weights[c] * plan.curtailment[c];
        }
        return plan;
    }

    // Greedy fill in ascending weight; ties prefer the larger demand, then
    // the lower cluster index.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (problem.weights[a] != problem.weights[b]) {
            return problem.weights[a] < problem.weights[b];
        }
        if (problem.cluster_demands[a] != problem.cluster_demands[b]) {
            return problem.cluster_demands[a] > problem.cluster_demands[b];
        }
        return a < b;
    });

    double remaining = problem.deficit;
    for (std::size_t c : order) {
        if (remaining <= 0.0) break;
        const double shed = std::min(problem.cluster_demands[c], remaining);
        plan.curtailment[c] = shed;
        remaining -= shed;
    }
    plan.total_shed = problem.deficit - std::max(remaining, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        plan.objective += problem.weights[c] * plan.curtailment[c];
    }
    return plan;
}

SheddingPlan lp_oracle(const SheddingProblem& problem) {
    problem.validate();
    const std::size_t n = problem.cluster_demands.size();
    if (n > 12) {
        throw ArgumentError("lp_oracle: enumeration bound is 12 clusters");
    }

    const double total_demand =
        std::accumulate(problem.cluster_demands.begin(), problem.cluster_demands.end(), 0.0);
    if (problem.deficit > total_demand) {
        SheddingPlan plan;
        plan.curtailment = problem.cluster_demands;
        plan.total_shed = total_demand;
        plan.feasible = false;
        plan.infeasibility_gap = problem.deficit - total_demand;
        for (std::size_t c = 0; c < n; ++c) {
            plan.objective += problem.weights[c] * plan.curtailment[c];
        }
        return plan;
    }

    constexpr double kEps = 1e-12;
    SheddingPlan best;
    best.objective = std::numeric_limits<double>::infinity();
    std::vector<double> candidate(n);

    for (std::size_t mask = 0; mask < (1u << n); ++mask) {
        double at_bound = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
            candidate[c] = (mask >> c) & 1u ? problem.cluster_demands[c] : 0.0;
            at_bound += candidate[c];
        }
        const double residual = problem.deficit - at_bound;
        if (std::fabs(residual) <= kEps) {
            double objective = 0.0;
            for (std::size_t c = 0; c < n; ++c) objective += problem.weights[c] * candidate[c];
            if (objective < best.objective) {
                best.curtailment = candidate;
                best.objective = objective;
                best.total_shed = at_bound;
            }
        } else if (residual > 0.0) {
            // One fractional coordinate covers the remainder exactly.
            for (std::size_t f = 0; f < n; ++f) {
                if ((mask >> f) & 1u) continue;
                if (problem.cluster_demands[f] + kEps < residual) continue;
                double objective = problem.weights[f] * residual;
                for (std::size_t c = 0; c < n; ++c) objective += problem.weights[c] * candidate[c];
                if (objective < best.objective) {
                    best.curtailment = candidate;
                    best.curtailment[f] = residual;
                    best.objective = objective;
                    best.total_shed = at_bound + residual;
                }
            }
        }
    }
    best.feasible = true;
    best.infeasibility_gap = 0.0;
    return best;
}

void DeficitSchedule::validate() const {
    if (supply.size() != cluster_demands.size()) {
        throw ArgumentError("deficit schedule axes are misaligned");
    }
    std::size_t clusters = cluster_demands.empty() ? 0 : cluster_demands.front().size();
    for (const auto& hour : cluster_demands) {
        if (hour.size() != clusters) {
            throw ArgumentError("deficit schedule has ragged cluster demands");
        }
    }
}

std::vector<SheddingPlan> schedule_shedding(const DeficitSchedule& schedule,
                                            const std::vector<double>& weights) {
    schedule.validate();
    std::vector<SheddingPlan> plans;
    plans.reserve(schedule.supply.size());
    for (std::size_t t = 0; t < schedule.supply.size(); ++t) {
        const auto& demands = schedule.cluster_demands[t];
        if (demands.size() != weights.size()) {
            throw ArgumentError("schedule_shedding: weights do not match cluster count");
        }
        SheddingProblem problem;
        problem.cluster_demands = demands;
        problem.weights = weights;
        problem.deficit =
            compute_deficit(std::accumulate(demands.begin(), demands.end(), 0.0),
                            schedule.supply[t]);
        plans.push_back(solve_shedding(problem));
    }
    return plans;
}

}  // namespace gridshed::allocate
