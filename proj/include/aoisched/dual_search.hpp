#pragma once

// Lagrangian treatment of the time-average bandwidth constraint. A price C
// per scheduled slot decouples the sensors; a subgradient walk on C brackets
// the price at which the fleet uses exactly M uploads per slot, and the two
// bracketing solutions are mixed to hit it.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "aoisched/model.hpp"
#include "aoisched/single_sensor.hpp"

namespace aoi {

struct DualParams {
    double initial_step = 100.0;
    double shrink = 0.5;
    double step_tol = 1e-4;
    std::size_t max_evaluations = 200;

    void validate() const;
};

struct SubgradientEval {
    double price = 0.0;
    double d = 0.0;                        ///< sum_n b_n - M
    std::vector<double> bandwidth;         ///< b_n, per-sensor scheduling fraction
    std::vector<OccupancyMeasure> occupancy;

    double total_bandwidth() const noexcept;
};

/// Per-sensor truncation; an empty vector means auto_truncation for every sensor.
std::vector<int> resolve_truncations(const NetworkSpec& network, const std::vector<int>& truncations);

/// Per-sensor decoupled solutions kept across subgradient evaluations. A
/// stored solution is reused at any price inside its optimality interval.
struct SolutionCache {
    std::vector<std::vector<DecoupledSolution>> per_sensor;
    std::size_t hits = 0;
    std::size_t solves = 0;
};

/// Solves every sensor's decoupled program at `price` (in parallel when the
/// machine has more than one core). InfeasiblePower errors name the sensor.
SubgradientEval evaluate_subgradient(const NetworkSpec& network, double price, const std::vector<int>& truncations,
                                     SolutionCache* cache = nullptr);

struct DualTraceRow {
    std::size_t k;
    double price;
    double d;
    double step;
};

struct MultiplierSearch {
    bool single = false;          ///< one price balances (C = 0 slack, or d = 0 exactly)
    SubgradientEval low;          ///< lower price, sum b >= M (equals `high` when single)
    SubgradientEval high;         ///< higher price, sum b <= M
    std::vector<DualTraceRow> trace;
    std::size_t evaluations = 0;
    bool converged = false;       ///< step fell below step_tol before the budget ran out
    std::size_t lp_solves = 0;    ///< per-sensor programs actually solved (cache misses)
};

/// Subgradient walk C <- max(0, C + s d) from C = 0, shrinking s by `shrink`
/// on every sign change of d. Throws Error(BracketNotFound) when the budget
/// is exhausted without observing both signs.
MultiplierSearch search_multipliers(const NetworkSpec& network, const DualParams& params,
                                    const std::vector<int>& truncations);

/// Weight on the high-price solution that balances bandwidth, clamped to [0,1].
double mixing_weight(double b_sum_high, double b_sum_low, double bandwidth);

struct SensorRelaxed {
    OccupancyMeasure occupancy;
    ThresholdPolicy policy;
    OccupancyStats stats;
};

struct RelaxedSolution {
    std::vector<SensorRelaxed> sensors;
    double price_low = 0.0;
    double price_high = 0.0;
    double weight_high = 0.0;  ///< lambda, weight on the high-price occupancy
    bool single = false;
    double total_bandwidth = 0.0;
    double lower_bound = 0.0;  ///< (1/N) sum_n avg_aoi of the mixed occupancies
    std::vector<DualTraceRow> trace;
    std::size_t evaluations = 0;

    std::vector<ThresholdPolicy> policies() const;
};

/// Componentwise lambda * high + (1 - lambda) * low per sensor, then policy recovery.
RelaxedSolution mix_and_recover(const NetworkSpec& network, const std::vector<OccupancyMeasure>& high,
                                const std::vector<OccupancyMeasure>& low, double weight_high);

/// Full pipeline: multiplier search followed by mixing.
RelaxedSolution solve_relaxed(const NetworkSpec& network, const DualParams& params = {},
                              const std::vector<int>& truncations = {});

/// (1/N) sum_n avg_aoi over the relaxed per-sensor occupancies.
double analytic_lower_bound(const RelaxedSolution& relaxed);

void write_dual_trace_csv(std::ostream& os, const std::vector<DualTraceRow>& trace);

}  // namespace aoi
