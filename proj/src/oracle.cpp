#include "aoisched/oracle.hpp"

#include <cmath>
#include <limits>

namespace aoi {

namespace {

struct Candidate {
    std::vector<int> thresholds;
    OccupancyMeasure occupancy;
    double cost;
    double power;
};

std::vector<Candidate> enumerate(const SensorSpec& spec, double price, int truncation) {
    const int Q = spec.channel.num_states();
    std::vector<Candidate> out;
    std::vector<int> t(Q, 1);
    while (true) {
        const ThresholdPolicy policy = ThresholdPolicy::from_thresholds(truncation, t);
        OccupancyMeasure occ = occupancy_from_policy(policy, spec.channel);
        const OccupancyStats s = occupancy_stats(occ, spec.channel);
        out.push_back({t, std::move(occ), s.avg_aoi + price * s.sched_fraction, s.avg_power});
        int k = 0;
        while (k < Q && ++t[k] > truncation) t[k++] = 1;
        if (k == Q) break;
    }
    return out;
}

OccupancyMeasure blend(const OccupancyMeasure& a, const OccupancyMeasure& b, double w) {
    OccupancyMeasure out = a;
    auto mu = out.mu_values();
    auto y = out.y_values();
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = w * a.mu_values()[i] + (1.0 - w) * b.mu_values()[i];
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = w * a.y_values()[i] + (1.0 - w) * b.y_values()[i];
    return out;
}

}  // namespace

OracleResult oracle_best_threshold_policy(const SensorSpec& spec, double price, int truncation) {
    require_valid(spec);
    const std::vector<Candidate> cands = enumerate(spec, price, truncation);
    const double budget = spec.power_budget * (1.0 + 1e-12) + 1e-12;

    OracleResult best;
    best.cost = std::numeric_limits<double>::infinity();
    std::size_t best_a = 0;
    std::size_t best_b = 0;

    auto consider = [&](std::size_t a, std::size_t b, double w) {
        const double power = w * cands[a].power + (1.0 - w) * cands[b].power;
        if (power > budget) return;
        const double cost = w * cands[a].cost + (1.0 - w) * cands[b].cost;
        if (cost < best.cost) {
            best.cost = cost;
            best.avg_power = power;
            best.weight_a = w;
            best.feasible = true;
            best_a = a;
            best_b = b;
        }
    };

    constexpr int kGrid = 1000;
    for (std::size_t a = 0; a < cands.size(); ++a) {
        consider(a, a, 1.0);
        for (std::size_t b = a + 1; b < cands.size(); ++b) {
            for (int k = 1; k < kGrid; ++k) consider(a, b, static_cast<double>(k) / kGrid);
            const double dp = cands[a].power - cands[b].power;
            if (dp != 0.0) {
                const double w = (spec.power_budget - cands[b].power) / dp;
                if (w > 0.0 && w < 1.0) consider(a, b, w);
            }
        }
    }
    if (!best.feasible) return best;

    best.thresholds_a = cands[best_a].thresholds;
    best.thresholds_b = cands[best_b].thresholds;
    best.policy = recover_policy(blend(cands[best_a].occupancy, cands[best_b].occupancy, best.weight_a),
                                 spec.channel);
    return best;
}

}  // namespace aoi
