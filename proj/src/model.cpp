#include "aoisched/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aoi {

namespace {

std::string describe(const char* what, int index, double value) {
    std::ostringstream os;
    os << what << " at q=" << (index + 1) << " (value " << value << ")";
    return os.str();
}

}  // namespace

std::optional<ValidationError> validate_channel_model(const ChannelModel& model) {
    const auto q_count = model.eta.size();
    if (q_count == 0) {
        return ValidationError{ErrorCode::InvalidSpec, "channel model has no states"};
    }
    if (model.eps.size() != q_count || model.omega.size() != q_count) {
        return ValidationError{ErrorCode::InvalidSpec, "eta, eps and omega must have equal length"};
    }
    double total = 0.0;
    for (std::size_t k = 0; k < q_count; ++k) {
        if (!std::isfinite(model.eta[k]) || model.eta[k] < 0.0) {
            return ValidationError{ErrorCode::ProbabilityNotNormalized,
                                   describe("negative or non-finite eta", static_cast<int>(k), model.eta[k])};
        }
        total += model.eta[k];
    }
    if (std::abs(total - 1.0) > kNormalizationTol) {
        std::ostringstream os;
        os << "eta sums to " << total;
        return ValidationError{ErrorCode::ProbabilityNotNormalized, os.str()};
    }
    for (std::size_t k = 0; k < q_count; ++k) {
        if (!(model.eps[k] >= 0.0 && model.eps[k] <= 1.0)) {
            return ValidationError{ErrorCode::LossOutOfRange,
                                   describe("loss probability outside [0,1]", static_cast<int>(k), model.eps[k])};
        }
    }
    for (std::size_t k = 0; k < q_count; ++k) {
        if (!std::isfinite(model.omega[k])) {
            return ValidationError{ErrorCode::PowersNotAscending,
                                   describe("non-finite power", static_cast<int>(k), model.omega[k])};
        }
        if (k > 0 && !(model.omega[k - 1] < model.omega[k])) {
            return ValidationError{ErrorCode::PowersNotAscending,
                                   describe("power not strictly above previous state", static_cast<int>(k), model.omega[k])};
        }
    }
    const double g = gamma(model);
    if (g >= 1.0 - kGammaMargin) {
        std::ostringstream os;
        os << "gamma = " << g << " leaves no finite-age steady state";
        return ValidationError{ErrorCode::DegenerateGammaOne, os.str()};
    }
    return std::nullopt;
}

std::optional<ValidationError> validate_sensor(const SensorSpec& sensor) {
    if (auto err = validate_channel_model(sensor.channel)) {
        return err;
    }
    if (!(sensor.power_budget > 0.0) || !std::isfinite(sensor.power_budget)) {
        return ValidationError{ErrorCode::InvalidSpec, "power_budget must be positive and finite"};
    }
    return std::nullopt;
}

std::optional<ValidationError> validate_network(const NetworkSpec& network) {
    if (network.sensors.empty()) {
        return ValidationError{ErrorCode::InvalidSpec, "network has no sensors"};
    }
    for (std::size_t n = 0; n < network.sensors.size(); ++n) {
        if (auto err = validate_sensor(network.sensors[n])) {
            err->message = "sensor " + std::to_string(n) + ": " + err->message;
            return err;
        }
    }
    if (network.bandwidth < 1 || network.bandwidth > network.num_sensors()) {
        return ValidationError{ErrorCode::InvalidSpec, "bandwidth M must satisfy 1 <= M <= N"};
    }
    return std::nullopt;
}

void require_valid(const ChannelModel& model) {
    if (auto err = validate_channel_model(model)) {
        throw Error(err->code, err->message);
    }
}

void require_valid(const SensorSpec& sensor) {
    if (auto err = validate_sensor(sensor)) {
        throw Error(err->code, err->message);
    }
}

void require_valid(const NetworkSpec& network) {
    if (auto err = validate_network(network)) {
        throw Error(err->code, err->message);
    }
}

double gamma(const ChannelModel& model) noexcept {
    return std::inner_product(model.eta.begin(), model.eta.end(), model.eps.begin(), 0.0);
}

double mean_power(const ChannelModel& model) noexcept {
    return std::inner_product(model.eta.begin(), model.eta.end(), model.omega.begin(), 0.0);
}

int channel_state_from_uniform(const ChannelModel& model, double u) noexcept {
    double cumulative = 0.0;
    const int q_count = model.num_states();
    for (int k = 0; k < q_count - 1; ++k) {
        cumulative += model.eta[k];
        if (u < cumulative) {
            return k + 1;
        }
    }
    // Rounding in the cumulative sum must never yield a zero-probability tail state.
    for (int k = q_count - 1; k > 0; --k) {
        if (model.eta[k] > 0.0) {
            return k + 1;
        }
    }
    return 1;
}

int sample_channel_state(const ChannelModel& model, RandomStream& rng) noexcept {
    return channel_state_from_uniform(model, rng.uniform());
}

TransferProbs transfer_probs(std::span<const double> policy_row, const ChannelModel& model,
                             bool at_or_beyond_truncation) noexcept {
    if (at_or_beyond_truncation) {
        const double g = gamma(model);
        return {g, 1.0 - g};
    }
    double beta = 0.0;
    for (int k = 0; k < model.num_states(); ++k) {
        beta += model.eta[k] * policy_row[k] * (1.0 - model.eps[k]);
    }
    return {1.0 - beta, beta};
}

}  // namespace aoi
