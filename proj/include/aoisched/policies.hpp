#pragma once

// Online per-slot scheduling rules. Every random draw is keyed by
// (seed, slot, sensor); two rules run on the same seed consume identical
// candidate draws.

#include <cstdint>
#include <span>
#include <vector>

#include "aoisched/model.hpp"
#include "aoisched/single_sensor.hpp"

namespace aoi {

struct ScheduleDecision {
    std::vector<int> scheduled;  ///< sensor indices (0-based), ascending
};

struct SlotKey {
    std::uint64_t seed = 0;
    std::uint64_t slot = 0;
};

/// Candidate set I(t): sensor n enters with probability p_n(x_n, q_n), one
/// draw per sensor in index order. `estimates` are 1-based.
std::vector<int> candidate_set(std::span<const long> ages, std::span<const int> estimates,
                               std::span<const ThresholdPolicy> policies, SlotKey key);

/// Truncated rule: schedule I(t) if |I(t)| <= M, else a uniform M-subset of it
/// chosen by a Fisher-Yates prefix.
ScheduleDecision truncated_schedule(std::span<const long> ages, std::span<const int> estimates,
                                    std::span<const ThresholdPolicy> policies, int bandwidth, SlotKey key);

/// Relaxed rule: schedule all of I(t) with no cap.
ScheduleDecision relaxed_schedule(std::span<const long> ages, std::span<const int> estimates,
                                  std::span<const ThresholdPolicy> policies, SlotKey key);

/// Closed-form index (1 - e) x^2 + (1 + e) x. Throws DegenerateLoss for e >= 1.
double whittle_index(long age, double eps_bar);

/// Running energy ledger. Sensor n may transmit in slot t (1-based) when
/// used[n] + omega(q_n) <= E_n * t.
struct EnergyLedger {
    std::vector<double> used;

    explicit EnergyLedger(std::size_t sensors = 0) : used(sensors, 0.0) {}
    bool eligible(const SensorSpec& sensor, std::size_t n, int estimate, std::uint64_t slot) const noexcept;
};

/// Up to M eligible sensors with the largest index; ties go to the lower sensor index.
ScheduleDecision greedy_whittle_schedule(std::span<const long> ages, std::span<const int> estimates,
                                         std::span<const double> eps_bar, const NetworkSpec& network,
                                         const EnergyLedger& ledger, std::uint64_t slot);

}  // namespace aoi
