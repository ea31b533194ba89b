#pragma once

// Domain types shared by the optimizer and the simulator. Channel estimates
// are numbered q = 1..Q at every interface; vectors below are stored in that
// order, so element [k] belongs to estimate q = k + 1.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aoisched/error.hpp"
#include "aoisched/rng.hpp"

namespace aoi {

inline constexpr double kNormalizationTol = 1e-12;
inline constexpr double kGammaMargin = 1e-9;

struct ChannelModel {
    std::vector<double> eta;    ///< probability of estimate q in a slot
    std::vector<double> eps;    ///< packet-loss probability given estimate q
    std::vector<double> omega;  ///< transmit energy given estimate q

    int num_states() const noexcept { return static_cast<int>(eta.size()); }
};

struct SensorSpec {
    ChannelModel channel;
    double power_budget = 0.0;  ///< average energy per slot
};

struct NetworkSpec {
    std::vector<SensorSpec> sensors;
    int bandwidth = 1;  ///< M, maximum simultaneous uploads

    int num_sensors() const noexcept { return static_cast<int>(sensors.size()); }
};

struct AoiState {
    long x = 1;  ///< age in slots, >= 1
    int q = 1;   ///< channel estimate, 1-based
};

struct ValidationError {
    ErrorCode code;
    std::string message;
};

/// Returns nullopt when every ChannelModel invariant holds.
std::optional<ValidationError> validate_channel_model(const ChannelModel& model);
std::optional<ValidationError> validate_sensor(const SensorSpec& sensor);
std::optional<ValidationError> validate_network(const NetworkSpec& network);

/// Throwing forms of the validators above.
void require_valid(const ChannelModel& model);
void require_valid(const SensorSpec& sensor);
void require_valid(const NetworkSpec& network);

/// Unconditional per-attempt failure probability, sum_q eta[q] * eps[q].
double gamma(const ChannelModel& model) noexcept;

/// Expected energy of one attempt, sum_q eta[q] * omega[q].
double mean_power(const ChannelModel& model) noexcept;

/// Maps a uniform u in [0,1) to a 1-based estimate by inverse CDF.
int channel_state_from_uniform(const ChannelModel& model, double u) noexcept;

/// Draws one estimate q (1-based) with probability eta[q].
int sample_channel_state(const ChannelModel& model, RandomStream& rng) noexcept;

/// Age after one slot: reset to 1 on a successful scheduled upload, else x + 1.
constexpr long step_aoi(long x, bool scheduled, bool success) noexcept {
    return (scheduled && success) ? 1 : x + 1;
}

struct TransferProbs {
    double alpha;  ///< age x -> x + 1
    double beta;   ///< age x -> 1
};

/// Forward/backward transition probabilities of the age chain at one age.
/// `policy_row[k]` is the scheduling probability under estimate q = k + 1;
/// it is ignored when `at_or_beyond_truncation` is set (always schedule).
TransferProbs transfer_probs(std::span<const double> policy_row, const ChannelModel& model,
                             bool at_or_beyond_truncation) noexcept;

}  // namespace aoi
