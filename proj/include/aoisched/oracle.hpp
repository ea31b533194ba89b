#pragma once

// Exhaustive reference solver for small decoupled problems. It never touches
// the LP: every candidate is evaluated through the induced Markov chain.

#include <vector>

#include "aoisched/model.hpp"
#include "aoisched/single_sensor.hpp"

namespace aoi {

struct OracleResult {
    bool feasible = false;
    double cost = 0.0;           ///< average age + price * scheduling fraction
    double avg_power = 0.0;
    ThresholdPolicy policy;      ///< policy realizing the best occupancy
    std::vector<int> thresholds_a;
    std::vector<int> thresholds_b;
    double weight_a = 1.0;       ///< occupancy weight on thresholds_a
};

/// Enumerates every deterministic threshold vector (t_q in 1..X) and every
/// occupancy mixture of two of them, with weights on a 1e-3 grid plus the
/// weight at which the power budget binds. Cost is X^Q squared; keep
/// X^Q small (a few hundred at most).
OracleResult oracle_best_threshold_policy(const SensorSpec& spec, double price, int truncation);

}  // namespace aoi
