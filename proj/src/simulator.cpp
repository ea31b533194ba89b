#include "aoisched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <boost/math/distributions/students_t.hpp>

#include "aoisched/parallel.hpp"
#include "aoisched/policies.hpp"

namespace aoi {

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Truncated: return "truncated";
        case PolicyKind::Relaxed: return "relaxed";
        case PolicyKind::GreedyWhittle: return "greedy_whittle";
    }
    return "unknown";
}

void SimConfig::validate() const {
    if (horizon < 1) throw Error(ErrorCode::InvalidSpec, "horizon T must be at least 1");
    if (effective_warmup() >= horizon) throw Error(ErrorCode::InvalidSpec, "warmup must be shorter than T");
    if (batches < 2) throw Error(ErrorCode::InvalidSpec, "at least two batches are needed");
}

double t_quantile_975(int dof) {
    if (dof < 1) return 0.0;
    return boost::math::quantile(boost::math::students_t(dof), 0.975);
}

namespace {

struct BatchStats {
    double mean = 0.0;
    double se = 0.0;
};

BatchStats batch_stats(const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

void check_policy(const NetworkSpec& network, const SimPolicy& policy) {
    const std::size_t n = network.sensors.size();
    if (policy.kind == PolicyKind::GreedyWhittle) {
        if (policy.eps_bar.size() != n) throw Error(ErrorCode::InvalidSpec, "one average loss per sensor required");
        return;
    }
    if (policy.policies.size() != n) throw Error(ErrorCode::InvalidSpec, "one threshold policy per sensor required");
    for (std::size_t i = 0; i < n; ++i) {
        if (policy.policies[i].num_states() != network.sensors[i].channel.num_states()) {
            throw Error(ErrorCode::InvalidSpec, "policy state count differs from the channel model of sensor " +
                                                    std::to_string(i));
        }
    }
}

}  // namespace

SimMetrics run_simulation(const NetworkSpec& network, const SimPolicy& policy, const SimConfig& config) {
    require_valid(network);
    config.validate();
    check_policy(network, policy);

    const std::size_t N = network.sensors.size();
    const std::uint64_t T = config.horizon;
    const std::uint64_t warmup = config.effective_warmup();
    const std::uint64_t measured = T - warmup;
    const std::uint64_t B = std::min<std::uint64_t>(static_cast<std::uint64_t>(config.batches), measured);
    const std::uint64_t seed = config.seed;

    std::vector<long> ages(N, 1);
    std::vector<int> q(N, 1);
    std::vector<char> scheduled(N, 0);
    EnergyLedger ledger(N);

    SimMetrics m;
    m.seed = seed;
    m.measured_slots = measured;
    m.per_sensor_aoi.assign(N, 0.0);
    m.per_sensor_power.assign(N, 0.0);
    m.per_sensor_power_se.assign(N, 0.0);
    m.per_sensor_sched.assign(N, 0.0);
    m.bandwidth_histogram.assign(N + 1, 0);
    m.aoi_histogram.assign(N, std::vector<std::uint64_t>(kAoiHistogramBins, 0));
    m.aoi_overflow.assign(N, 0);

    // Integer sums keep long runs exact; energy is summed per batch.
    std::vector<long double> age_sum(N, 0.0L);
    std::vector<std::uint64_t> sched_count(N, 0);
    std::vector<double> batch_aoi(B, 0.0);
    std::vector<std::vector<double>> batch_power(N, std::vector<double>(B, 0.0));
    std::vector<std::uint64_t> batch_len(B, 0);
    long double total_sched = 0.0L;

    for (std::uint64_t t = 1; t <= T; ++t) {
        for (std::size_t n = 0; n < N; ++n) {
            q[n] = channel_state_from_uniform(network.sensors[n].channel,
                                              counter_uniform(seed, StreamId::Channel, n, t));
        }
        ScheduleDecision d;
        switch (policy.kind) {
            case PolicyKind::Truncated:
                d = truncated_schedule(ages, q, policy.policies, network.bandwidth, {seed, t});
                break;
            case PolicyKind::Relaxed:
                d = relaxed_schedule(ages, q, policy.policies, {seed, t});
                break;
            case PolicyKind::GreedyWhittle:
                d = greedy_whittle_schedule(ages, q, policy.eps_bar, network, ledger, t);
                break;
        }
        const int count = static_cast<int>(d.scheduled.size());
        if (count > network.bandwidth) ++m.bandwidth_violations;
        m.max_scheduled = std::max(m.max_scheduled, count);
        std::fill(scheduled.begin(), scheduled.end(), 0);
        for (int n : d.scheduled) scheduled[static_cast<std::size_t>(n)] = 1;

        const bool measuring = t > warmup;
        const std::uint64_t b = measuring ? (t - warmup - 1) * B / measured : 0;
        if (measuring) {
            ++m.bandwidth_histogram[static_cast<std::size_t>(count)];
            total_sched += count;
            ++batch_len[b];
        }
        double slot_age = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            const int qn = q[n];
            const ChannelModel& ch = network.sensors[n].channel;
            const bool on = scheduled[n] != 0;
            const bool success = on && counter_uniform(seed, StreamId::Success, n, t) >= ch.eps[qn - 1];
            const double energy = on ? ch.omega[qn - 1] : 0.0;
            ledger.used[n] += energy;
            if (config.trace != nullptr) {
                *config.trace << t << ',' << n << ',' << qn << ',' << (on ? 1 : 0) << ',' << (success ? 1 : 0) << ','
                              << ages[n] << '\n';
            }
            if (measuring) {
                const long x = ages[n];
                age_sum[n] += x;
                slot_age += static_cast<double>(x);
                if (x <= kAoiHistogramBins) {
                    ++m.aoi_histogram[n][static_cast<std::size_t>(x - 1)];
                } else {
                    ++m.aoi_overflow[n];
                }
                if (on) {
                    ++sched_count[n];
                    batch_power[n][b] += energy;
                }
            }
            ages[n] = step_aoi(ages[n], on, success);
        }
        if (measuring) batch_aoi[b] += slot_age / static_cast<double>(N);
    }

    const double tm = static_cast<double>(measured);
    for (std::uint64_t b = 0; b < B; ++b) {
        const double len = static_cast<double>(batch_len[b]);
        batch_aoi[b] /= len;
        for (std::size_t n = 0; n < N; ++n) batch_power[n][b] /= len;
    }
    long double aoi_total = 0.0L;
    for (std::size_t n = 0; n < N; ++n) {
        aoi_total += age_sum[n];
        m.per_sensor_aoi[n] = static_cast<double>(age_sum[n] / measured);
        m.per_sensor_sched[n] = static_cast<double>(sched_count[n]) / tm;
        double energy = 0.0;
        for (std::uint64_t b = 0; b < B; ++b) energy += batch_power[n][b] * static_cast<double>(batch_len[b]);
        m.per_sensor_power[n] = energy / tm;
        if (B >= 2) m.per_sensor_power_se[n] = batch_stats(batch_power[n]).se;
    }
    m.avg_aoi = static_cast<double>(aoi_total / (static_cast<long double>(measured) * N));
    m.mean_bandwidth = static_cast<double>(total_sched / measured);
    if (B >= 2) m.avg_aoi_half_width = t_quantile_975(static_cast<int>(B) - 1) * batch_stats(batch_aoi).se;
    return m;
}

std::uint64_t replication_seed(std::uint64_t base_seed, std::uint64_t r) noexcept {
    return counter_hash(base_seed, StreamId::Generic, 0x7265706cULL, r);
}

std::vector<SimMetrics> run_replications(const NetworkSpec& network, const SimPolicy& policy,
                                         const SimConfig& config, int replications) {
    if (replications < 1) throw Error(ErrorCode::InvalidSpec, "at least one replication required");
    std::vector<SimMetrics> out(static_cast<std::size_t>(replications));
    parallel_for(out.size(), [&](std::size_t r) {
        SimConfig c = config;
        c.seed = replication_seed(config.seed, r);
        c.trace = nullptr;
        out[r] = run_simulation(network, policy, c);
    });
    return out;
}

ReplicationSummary summarize(std::span<const double> values) {
    ReplicationSummary s;
    s.count = static_cast<int>(values.size());
    if (values.empty()) return s;
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / s.count;
    if (s.count < 2) return s;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (s.count - 1));
    s.half_width = t_quantile_975(s.count - 1) * s.stddev / std::sqrt(static_cast<double>(s.count));
    return s;
}

ReplicationSummary summarize_aoi(std::span<const SimMetrics> runs) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& r : runs) v.push_back(r.avg_aoi);
    return summarize(v);
}

void write_trace_header(std::ostream& os) { os << "slot,sensor,q,scheduled,success,age\n"; }

}  // namespace aoi
