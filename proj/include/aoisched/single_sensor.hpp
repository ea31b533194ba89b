#pragma once

// Per-sensor problem for a fixed scheduling price C: minimize average
// (age + C * scheduled) under the sensor's average power budget. The problem
// is solved as a linear program over the truncated occupancy measure; ages
// at or beyond the truncation X always schedule and are folded into a
// geometric tail.

#include <cstddef>
#include <span>
#include <vector>

#include "aoisched/lp.hpp"
#include "aoisched/model.hpp"

namespace aoi {

inline constexpr double kMassFloor = 1e-9;
inline constexpr double kClampTol = 1e-6;

/// Stationary age distribution and scheduling mass. Ages and estimates are 1-based.
class OccupancyMeasure {
public:
    OccupancyMeasure() = default;
    OccupancyMeasure(int truncation, int num_states)
        : x_(truncation), q_(num_states), mu_(truncation, 0.0),
          y_(static_cast<std::size_t>(truncation - 1) * num_states, 0.0) {}

    int truncation() const noexcept { return x_; }
    int num_states() const noexcept { return q_; }

    /// Probability that the age equals x, 1 <= x <= X (mass at X excludes the tail beyond it).
    double& mu(int x) noexcept { return mu_[x - 1]; }
    double mu(int x) const noexcept { return mu_[x - 1]; }

    /// Probability of (age x, estimate q, scheduled) for 1 <= x < X.
    double& y(int x, int q) noexcept { return y_[index(x, q)]; }
    double y(int x, int q) const noexcept { return y_[index(x, q)]; }

    std::span<const double> mu_values() const noexcept { return mu_; }
    std::span<const double> y_values() const noexcept { return y_; }
    std::span<double> mu_values() noexcept { return mu_; }
    std::span<double> y_values() noexcept { return y_; }

private:
    std::size_t index(int x, int q) const noexcept {
        return static_cast<std::size_t>(x - 1) * q_ + static_cast<std::size_t>(q - 1);
    }

    int x_ = 0;
    int q_ = 0;
    std::vector<double> mu_;
    std::vector<double> y_;
};

/// Scheduling probabilities p(x, q) for x <= X; ages beyond X always schedule.
class ThresholdPolicy {
public:
    ThresholdPolicy() = default;
    ThresholdPolicy(int truncation, int num_states, double fill = 0.0)
        : x_(truncation), q_(num_states), p_(static_cast<std::size_t>(truncation) * num_states, fill) {
        for (int q = 1; q <= q_; ++q) at(x_, q) = 1.0;
    }

    int truncation() const noexcept { return x_; }
    int num_states() const noexcept { return q_; }

    double& at(int x, int q) noexcept { return p_[index(x, q)]; }
    double at(int x, int q) const noexcept { return p_[index(x, q)]; }

    /// Scheduling probability at any age; 1 beyond the truncation.
    double prob(long x, int q) const noexcept { return x >= x_ ? 1.0 : p_[index(static_cast<int>(x), q)]; }

    /// Row of probabilities over q at age x (x <= X).
    std::span<const double> row(int x) const noexcept {
        return {p_.data() + static_cast<std::size_t>(x - 1) * q_, static_cast<std::size_t>(q_)};
    }

    /// Policy that schedules at ages >= thresholds[q-1] under estimate q.
    static ThresholdPolicy from_thresholds(int truncation, std::span<const int> thresholds);

private:
    std::size_t index(int x, int q) const noexcept {
        return static_cast<std::size_t>(x - 1) * q_ + static_cast<std::size_t>(q - 1);
    }

    int x_ = 0;
    int q_ = 0;
    std::vector<double> p_;
};

struct OccupancyStats {
    double avg_aoi = 0.0;
    double avg_power = 0.0;
    double sched_fraction = 0.0;
};

/// Default truncation. The accuracy term ceil(3 * mean_power / (E (1 - gamma)))
/// is clamped to [50, kMaxAutoTruncation]; the result is then raised, if
/// needed, past the age at which the never-schedule-below-X policy fits the
/// budget with 25% headroom.
inline constexpr int kMaxAutoTruncation = 200;
int auto_truncation(const SensorSpec& spec);

/// Variable layout of the decoupled program.
struct DecoupledLayout {
    int truncation;
    int num_states;
    std::size_t mu(int x) const noexcept { return static_cast<std::size_t>(x - 1); }
    std::size_t y(int x, int q) const noexcept {
        return static_cast<std::size_t>(truncation) + static_cast<std::size_t>(x - 1) * num_states +
               static_cast<std::size_t>(q - 1);
    }
    std::size_t num_vars() const noexcept {
        return static_cast<std::size_t>(truncation) + static_cast<std::size_t>(truncation - 1) * num_states;
    }
};

/// Builds the occupancy-measure program. Row order: normalization, renewal
/// balance at age 1, flow rows for ages 2..X; inequality rows: power first,
/// then y(x,q) - eta[q] mu(x) <= 0 in (x, q) order.
lp::LinearProgram build_decoupled_lp(const SensorSpec& spec, double price, int truncation);

struct DecoupledSolution {
    OccupancyMeasure occupancy;
    double objective = 0.0;  ///< average age + price * scheduling fraction
    std::size_t lp_iterations = 0;
    /// Prices over which this occupancy stays optimal (final-basis cost ranging).
    double price_lo = 0.0;
    double price_hi = 0.0;
};

/// Solves the decoupled program. Throws Error(InfeasiblePower) when even the
/// lowest-power admissible policy exceeds the budget for this truncation.
DecoupledSolution solve_decoupled(const SensorSpec& spec, double price, int truncation,
                                  const lp::SolveOptions& options = {});

/// Minimum average power any policy with always-schedule beyond X can reach.
double minimum_truncated_power(const ChannelModel& model, int truncation);

/// Steady-state age distribution mu(1..X) of the chain induced by `policy`,
/// normalized so that sum_{x<X} mu(x) + mu(X)/(1-gamma) = 1.
std::vector<double> steady_state_distribution(const ThresholdPolicy& policy, const ChannelModel& model);

/// Occupancy measure induced by a stationary policy: y(x,q) = mu(x) eta[q] p(x,q).
OccupancyMeasure occupancy_from_policy(const ThresholdPolicy& policy, const ChannelModel& model);

OccupancyStats occupancy_stats(const OccupancyMeasure& occ, const ChannelModel& model);

/// Largest residual of the occupancy constraints (normalization, balance, flow,
/// 0 <= y <= mu eta). Power is not included.
double occupancy_residual(const OccupancyMeasure& occ, const ChannelModel& model);

/// Scheduling probabilities p = y / (mu eta), with p(X, .) = 1. Ages whose
/// mass is below kMassFloor inherit the threshold pattern of the last
/// well-massed age.
ThresholdPolicy recover_policy(const OccupancyMeasure& occ, const ChannelModel& model);

/// Per-estimate threshold t_q: first age with p(x,q) > tol (X if none).
std::vector<int> policy_thresholds(const ThresholdPolicy& policy, double tol = 1e-6);

/// True when, for every q, p(x,q) is 0 below t_q, 1 above it, with at most one
/// fractional entry at t_q (all up to `tol`).
bool has_threshold_structure(const ThresholdPolicy& policy, double tol = 1e-6);

}  // namespace aoi
