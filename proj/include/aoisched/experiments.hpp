#pragma once

// Preset networks and experiment runners behind the CLI. Generators are pure
// functions of their arguments; runners write CSV files plus manifest.json
// into an output directory and return the rows they wrote.

#include <cstdint>
#include <string>
#include <vector>

#include "aoisched/dual_search.hpp"
#include "aoisched/model.hpp"
#include "aoisched/simulator.hpp"

namespace aoi {

inline constexpr const char* kToolVersion = "0.1.0";

inline const std::vector<double> kTable1Eps{0.0, 0.2, 0.4, 0.6};
inline const std::vector<double> kFig4Eta{0.135, 0.239, 0.232, 0.394};
inline const std::vector<double> kFig4Eps{0.1, 0.2, 0.3, 0.4};

/// Q = 4, eta = 0.25, omega = 2^q, eps uniform, E = fraction * sum eta omega.
SensorSpec table1_sensor(double eps, double budget_fraction = 0.5);

/// E_G = (M/N) sum eta omega for the fig4/fig5 channel (omega_q = q).
double greedy_power(int sensors, int bandwidth);

int fig4_bandwidth(int sensors) noexcept;

/// M = max(1, round(N/5)); rho_n = 0.2 + 1.4 n/(N-1), n = 0..N-1; E_n = rho_n E_G.
NetworkSpec fig4_network(int sensors);

/// M = 2; eps_n = (n-1)/N in every estimate; E_n = E_G.
NetworkSpec fig5_network(int sensors);

/// Per-sensor average loss sum_q eta_q eps_q used by the Whittle baseline.
std::vector<double> average_losses(const NetworkSpec& network);

struct ExperimentOptions {
    std::string preset;
    std::string spec_path;
    std::string out_dir = "out";
    std::uint64_t horizon = 0;  ///< 0 selects the preset default
    std::uint64_t seed = 7;
    int replications = 0;       ///< 0 selects the preset default
    int truncation = 0;         ///< 0 selects auto_truncation per sensor
    DualParams dual;
    double budget_fraction = 0.5;
    std::vector<int> sizes;     ///< N sweep; empty selects the preset default
    bool trace = false;
    bool quiet = false;
};

struct Table1Row {
    double eps;
    double budget;
    int truncation;
    double analytic;
    double analytic_power;
    double simulated;
    double ci;
    double sim_power;
    double sim_power_se;
    std::uint64_t violations;
    std::vector<int> thresholds;
    bool threshold_structure;
    OccupancyMeasure occupancy;
    ThresholdPolicy policy;
    std::vector<SimMetrics> runs;
};

struct GapRow {
    int sensors;
    int bandwidth;
    double j_hat;
    double j_r;
    double gap;
    double ci;
    double j_relaxed_sim;
    double ci_relaxed;
    double sum_b;
    double price_low;
    double price_high;
    double weight_high;
    std::size_t evaluations;
    bool single;
    std::uint64_t violations;
    int power_excess;  ///< (run, sensor) pairs with power above E_n + 3 se, truncated and relaxed runs
    bool bracket_ok;   ///< sum b(low price) >= M >= sum b(high price)
    std::vector<DualTraceRow> trace;
    std::vector<SimMetrics> hat_runs;
    std::vector<SimMetrics> relaxed_runs;
};

struct CompareRow {
    int sensors;
    double j_hat;
    double j_whittle;
    double ci;
    double ci_whittle;
    double sum_b;
    bool single;
    std::uint64_t violations_hat;
    std::uint64_t violations_whittle;
    int power_excess;
    std::vector<DualTraceRow> trace;
    std::vector<SimMetrics> hat_runs;
    std::vector<SimMetrics> whittle_runs;
};

struct ExperimentResult {
    std::vector<Table1Row> table1;
    std::vector<GapRow> fig4;
    std::vector<CompareRow> fig5;
    std::vector<std::string> files;
};

/// Dispatches on options.preset (table1 | fig3 | fig4 | fig5 | custom).
/// Creates options.out_dir, writes the preset's files and manifest.json.
ExperimentResult run_experiment(const ExperimentOptions& options);

/// Compute-only runners; they do not touch the filesystem.
std::vector<Table1Row> run_table1(const ExperimentOptions& options, bool simulate = true);
std::vector<GapRow> run_fig4(const ExperimentOptions& options);
std::vector<CompareRow> run_fig5(const ExperimentOptions& options);

}  // namespace aoi
