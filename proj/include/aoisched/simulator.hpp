#pragma once

// Slot-based network simulation. Slot t (1-based) proceeds as: draw every
// estimate q_n(t), ask the policy for a schedule, draw success for each
// scheduled sensor, charge omega(q_n) energy, then advance the ages. Ages are
// counted at the start of the slot, matching the stationary measure mu_x.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "aoisched/model.hpp"
#include "aoisched/single_sensor.hpp"

namespace aoi {

enum class PolicyKind { Truncated, Relaxed, GreedyWhittle };

std::string to_string(PolicyKind kind);

/// What to run: threshold policies for Truncated/Relaxed, per-sensor
/// average loss for GreedyWhittle.
struct SimPolicy {
    PolicyKind kind = PolicyKind::Truncated;
    std::vector<ThresholdPolicy> policies;
    std::vector<double> eps_bar;

    static SimPolicy truncated(std::vector<ThresholdPolicy> p) { return {PolicyKind::Truncated, std::move(p), {}}; }
    static SimPolicy relaxed(std::vector<ThresholdPolicy> p) { return {PolicyKind::Relaxed, std::move(p), {}}; }
    static SimPolicy greedy_whittle(std::vector<double> e) { return {PolicyKind::GreedyWhittle, {}, std::move(e)}; }
};

inline constexpr long kAoiHistogramBins = 512;

struct SimConfig {
    std::uint64_t horizon = 100000;  ///< T
    std::uint64_t seed = 1;
    long long warmup = -1;           ///< slots excluded from averages; negative means T/10
    int batches = 20;                ///< batch count for the within-run error estimates
    std::ostream* trace = nullptr;   ///< per-slot rows (slot, sensor, q, scheduled, success, age)

    std::uint64_t effective_warmup() const noexcept {
        return warmup < 0 ? horizon / 10 : static_cast<std::uint64_t>(warmup);
    }
    void validate() const;
};

struct SimMetrics {
    std::uint64_t seed = 0;
    std::uint64_t measured_slots = 0;
    double avg_aoi = 0.0;
    double avg_aoi_half_width = 0.0;         ///< 95% batch-means half-width
    std::vector<double> per_sensor_aoi;
    std::vector<double> per_sensor_power;     ///< energy per measured slot
    std::vector<double> per_sensor_power_se;  ///< batch-means standard error
    std::vector<double> per_sensor_sched;     ///< fraction of measured slots scheduled
    std::vector<std::uint64_t> bandwidth_histogram;  ///< [k] = slots with k uploads, k = 0..N
    double mean_bandwidth = 0.0;
    std::uint64_t bandwidth_violations = 0;  ///< slots with more than M uploads, over the whole run
    int max_scheduled = 0;
    /// aoi_histogram[n][x-1] for ages 1..kAoiHistogramBins; larger ages land in aoi_overflow[n].
    std::vector<std::vector<std::uint64_t>> aoi_histogram;
    std::vector<std::uint64_t> aoi_overflow;
};

SimMetrics run_simulation(const NetworkSpec& network, const SimPolicy& policy, const SimConfig& config);

/// Seed of replication r; independent of the replication count.
std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t r) noexcept;

/// K independent replications, run concurrently. Traces are not supported here.
std::vector<SimMetrics> run_replications(const NetworkSpec& network, const SimPolicy& policy,
                                         const SimConfig& config, int replications);

struct ReplicationSummary {
    int count = 0;
    double mean = 0.0;
    double stddev = 0.0;
    double half_width = 0.0;  ///< 95% Student-t half-width; 0 for a single replication
};

ReplicationSummary summarize(std::span<const double> values);
ReplicationSummary summarize_aoi(std::span<const SimMetrics> runs);

/// Two-sided 95% Student-t quantile for `dof` degrees of freedom.
double t_quantile_975(int dof);

void write_trace_header(std::ostream& os);

}  // namespace aoi
