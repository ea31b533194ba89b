#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <tuple>

#include "aoisched/dual_search.hpp"
#include "aoisched/experiments.hpp"
#include "aoisched/simulator.hpp"

using namespace aoi;

namespace {

NetworkSpec single(double eps, double budget) { return {{{{{1.0}, {eps}, {1.0}}, budget}}, 1}; }

std::vector<ThresholdPolicy> always(const NetworkSpec& net) {
    std::vector<ThresholdPolicy> out;
    for (const auto& s : net.sensors) out.emplace_back(4, s.channel.num_states(), 1.0);
    return out;
}

struct TraceRow {
    int q;
    int scheduled;
    int success;
};

std::map<std::pair<long, int>, TraceRow> parse_trace(const std::string& text) {
    std::map<std::pair<long, int>, TraceRow> out;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        long slot;
        int sensor, q, sched, succ;
        long age;
        char c;
        std::istringstream ls(line);
        ls >> slot >> c >> sensor >> c >> q >> c >> sched >> c >> succ >> c >> age;
        out[{slot, sensor}] = {q, sched, succ};
    }
    return out;
}

NetworkSpec small_net() {
    NetworkSpec net;
    net.bandwidth = 1;
    const ChannelModel m{kFig4Eta, kFig4Eps, {1, 2, 3, 4}};
    for (double e : {0.5, 1.0, 2.0}) net.sensors.push_back({m, e});
    return net;
}

}  // namespace

TEST(Simulation, LosslessAlwaysScheduleHasUnitAge) {
    const NetworkSpec net = single(0.0, 1.0);
    SimConfig cfg;
    cfg.horizon = 10000;
    const SimMetrics m = run_simulation(net, SimPolicy::truncated(always(net)), cfg);
    EXPECT_DOUBLE_EQ(m.avg_aoi, 1.0);
    EXPECT_DOUBLE_EQ(m.per_sensor_power[0], 1.0);
    EXPECT_EQ(m.measured_slots, 9000u);
    EXPECT_EQ(m.bandwidth_violations, 0u);
    EXPECT_EQ(m.aoi_histogram[0][0], 9000u);
}

TEST(Simulation, GeometricAgeUnderLoss) {
    const NetworkSpec net = single(0.4, 1.0);
    SimConfig cfg;
    cfg.horizon = 400000;
    const SimMetrics m = run_simulation(net, SimPolicy::relaxed(always(net)), cfg);
    EXPECT_NEAR(m.avg_aoi, 1 / 0.6, 4 * m.avg_aoi_half_width + 1e-3);
    EXPECT_GT(m.avg_aoi_half_width, 0.0);
}

TEST(Simulation, DeterministicForSeed) {
    const NetworkSpec net = small_net();
    const RelaxedSolution r = solve_relaxed(net);
    SimConfig cfg;
    cfg.horizon = 20000;
    cfg.seed = 3;
    const SimMetrics a = run_simulation(net, SimPolicy::truncated(r.policies()), cfg);
    const SimMetrics b = run_simulation(net, SimPolicy::truncated(r.policies()), cfg);
    EXPECT_EQ(a.avg_aoi, b.avg_aoi);
    EXPECT_EQ(a.per_sensor_power, b.per_sensor_power);
    EXPECT_EQ(a.aoi_histogram, b.aoi_histogram);
    cfg.seed = 4;
    EXPECT_NE(run_simulation(net, SimPolicy::truncated(r.policies()), cfg).avg_aoi, a.avg_aoi);
}

TEST(Simulation, CommonRandomNumbersAcrossPolicies) {
    const NetworkSpec net = small_net();
    const RelaxedSolution r = solve_relaxed(net);
    SimConfig cfg;
    cfg.horizon = 3000;
    cfg.seed = 11;
    std::ostringstream ta, tb;
    cfg.trace = &ta;
    run_simulation(net, SimPolicy::truncated(r.policies()), cfg);
    cfg.trace = &tb;
    run_simulation(net, SimPolicy::greedy_whittle(average_losses(net)), cfg);
    const auto a = parse_trace(ta.str());
    const auto b = parse_trace(tb.str());
    ASSERT_EQ(a.size(), 3000u * net.sensors.size());
    ASSERT_EQ(a.size(), b.size());
    int both = 0;
    for (const auto& [key, ra] : a) {
        const TraceRow& rb = b.at(key);
        EXPECT_EQ(ra.q, rb.q);
        if (ra.scheduled && rb.scheduled) {
            EXPECT_EQ(ra.success, rb.success);
            ++both;
        }
    }
    EXPECT_GT(both, 100);
}

TEST(Simulation, TraceHeader) {
    std::ostringstream os;
    write_trace_header(os);
    EXPECT_EQ(os.str(), "slot,sensor,q,scheduled,success,age\n");
}

TEST(Simulation, RelaxedMatchesAnalyticAndAudits) {
    const NetworkSpec net = small_net();
    const RelaxedSolution r = solve_relaxed(net);
    SimConfig cfg;
    cfg.horizon = 1000000;
    cfg.seed = 5;
    const SimMetrics rel = run_simulation(net, SimPolicy::relaxed(r.policies()), cfg);
    EXPECT_NEAR(rel.avg_aoi, r.lower_bound, 0.02 * r.lower_bound);
    EXPECT_NEAR(rel.mean_bandwidth, 1.0, 0.01);
    for (std::size_t n = 0; n < net.sensors.size(); ++n) {
        EXPECT_LE(rel.per_sensor_power[n], net.sensors[n].power_budget + 3 * rel.per_sensor_power_se[n] + 1e-12);
        EXPECT_NEAR(rel.per_sensor_aoi[n], r.sensors[n].stats.avg_aoi, 0.03 * r.sensors[n].stats.avg_aoi);
    }

    const SimMetrics hat = run_simulation(net, SimPolicy::truncated(r.policies()), cfg);
    EXPECT_EQ(hat.bandwidth_violations, 0u);
    EXPECT_LE(hat.max_scheduled, 1);
    EXPECT_GE(hat.avg_aoi, r.lower_bound);

    const SimMetrics gw = run_simulation(net, SimPolicy::greedy_whittle(average_losses(net)), cfg);
    EXPECT_EQ(gw.bandwidth_violations, 0u);
    for (std::size_t n = 0; n < net.sensors.size(); ++n) {
        EXPECT_LE(gw.per_sensor_power[n], net.sensors[n].power_budget + 3 * gw.per_sensor_power_se[n]);
    }
}

TEST(Simulation, RejectsBadConfig) {
    const NetworkSpec net = single(0.0, 1.0);
    SimConfig cfg;
    cfg.horizon = 10;
    cfg.warmup = 10;
    EXPECT_THROW(run_simulation(net, SimPolicy::truncated(always(net)), cfg), Error);
    cfg.warmup = 0;
    EXPECT_THROW(run_simulation(net, SimPolicy::truncated({}), cfg), Error);
    EXPECT_THROW(run_simulation(net, SimPolicy::greedy_whittle({}), cfg), Error);
}

TEST(Replications, SeedsAndSummary) {
    EXPECT_EQ(replication_seed(7, 0), replication_seed(7, 0));
    EXPECT_NE(replication_seed(7, 0), replication_seed(7, 1));
    EXPECT_NE(replication_seed(7, 0), replication_seed(8, 0));

    const NetworkSpec net = small_net();
    const RelaxedSolution r = solve_relaxed(net);
    SimConfig cfg;
    cfg.horizon = 50000;
    const auto runs = run_replications(net, SimPolicy::truncated(r.policies()), cfg, 10);
    ASSERT_EQ(runs.size(), 10u);
    for (int k = 0; k < 10; ++k) {
        EXPECT_EQ(runs[k].seed, replication_seed(cfg.seed, k));
        SimConfig one = cfg;
        one.seed = runs[k].seed;
        if (k < 2) EXPECT_EQ(run_simulation(net, SimPolicy::truncated(r.policies()), one).avg_aoi, runs[k].avg_aoi);
    }
    const ReplicationSummary s = summarize_aoi(runs);
    EXPECT_EQ(s.count, 10);
    EXPECT_NEAR(s.half_width, t_quantile_975(9) * s.stddev / std::sqrt(10.0), 1e-12);
    // The spread across seeds and the average within-run half-width agree to a factor of a few.
    double within = 0.0;
    for (const auto& m : runs) within += m.avg_aoi_half_width / 10;
    const double across = 1.96 * s.stddev;
    EXPECT_LT(across, 4 * within);
    EXPECT_GT(across, within / 4);
}

TEST(Replications, StudentQuantile) {
    EXPECT_NEAR(t_quantile_975(9), 2.262157, 1e-6);
    EXPECT_NEAR(t_quantile_975(1000000), 1.959964, 1e-5);
    const std::vector<double> v{1.0, 2.0, 3.0};
    const ReplicationSummary s = summarize(v);
    EXPECT_DOUBLE_EQ(s.mean, 2.0);
    EXPECT_DOUBLE_EQ(s.stddev, 1.0);
    const std::vector<double> one{4.0};
    EXPECT_EQ(summarize(one).half_width, 0.0);
}
