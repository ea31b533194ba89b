#include "aoisched/policies.hpp"

#include <algorithm>
#include <numeric>

namespace aoi {

std::vector<int> candidate_set(std::span<const long> ages, std::span<const int> estimates,
                               std::span<const ThresholdPolicy> policies, SlotKey key) {
    std::vector<int> out;
    for (std::size_t n = 0; n < ages.size(); ++n) {
        const double p = policies[n].prob(ages[n], estimates[n]);
        if (p <= 0.0) continue;
        if (p >= 1.0 || counter_uniform(key.seed, StreamId::Candidate, n, key.slot) < p) {
            out.push_back(static_cast<int>(n));
        }
    }
    return out;
}

ScheduleDecision truncated_schedule(std::span<const long> ages, std::span<const int> estimates,
                                    std::span<const ThresholdPolicy> policies, int bandwidth, SlotKey key) {
    ScheduleDecision d;
    d.scheduled = candidate_set(ages, estimates, policies, key);
    const std::size_t m = static_cast<std::size_t>(bandwidth);
    if (d.scheduled.size() > m) {
        RandomStream rng(key.seed, StreamId::Subset, key.slot);
        auto& idx = d.scheduled;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(m);
        std::sort(idx.begin(), idx.end());
    }
    return d;
}

ScheduleDecision relaxed_schedule(std::span<const long> ages, std::span<const int> estimates,
                                  std::span<const ThresholdPolicy> policies, SlotKey key) {
    return {candidate_set(ages, estimates, policies, key)};
}

double whittle_index(long age, double eps_bar) {
    if (!(eps_bar < 1.0) || eps_bar < 0.0) {
        throw Error(ErrorCode::DegenerateLoss, "Whittle index needs 0 <= loss < 1");
    }
    const double x = static_cast<double>(age);
    return (1.0 - eps_bar) * x * x + (1.0 + eps_bar) * x;
}

bool EnergyLedger::eligible(const SensorSpec& sensor, std::size_t n, int estimate, std::uint64_t slot) const noexcept {
    return used[n] + sensor.channel.omega[estimate - 1] <= sensor.power_budget * static_cast<double>(slot);
}

ScheduleDecision greedy_whittle_schedule(std::span<const long> ages, std::span<const int> estimates,
                                         std::span<const double> eps_bar, const NetworkSpec& network,
                                         const EnergyLedger& ledger, std::uint64_t slot) {
    std::vector<std::pair<double, int>> ranked;
    for (std::size_t n = 0; n < ages.size(); ++n) {
        if (!ledger.eligible(network.sensors[n], n, estimates[n], slot)) continue;
        ranked.emplace_back(whittle_index(ages[n], eps_bar[n]), static_cast<int>(n));
    }
    const std::size_t m = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(network.bandwidth));
    std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(m), ranked.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
    ScheduleDecision d;
    d.scheduled.reserve(m);
    for (std::size_t i = 0; i < m; ++i) d.scheduled.push_back(ranked[i].second);
    std::sort(d.scheduled.begin(), d.scheduled.end());
    return d;
}

}  // namespace aoi
