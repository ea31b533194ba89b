// Acceptance suite: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is the number of failed criteria (0 when everything passes).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "aoisched/dual_search.hpp"
#include "aoisched/experiments.hpp"
#include "aoisched/io.hpp"
#include "aoisched/oracle.hpp"
#include "aoisched/rng.hpp"

using namespace aoi;

namespace {

constexpr double kTable1Target[] = {1.8518, 2.2648, 2.9795, 4.3508};
constexpr double kAnalyticTol = 0.02;
constexpr double kSimulatedTol = 0.03;
constexpr double kTable1Seconds = 30.0;
constexpr int kOracleInstances = 24;
constexpr double kOracleAbs = 1e-3;
constexpr double kOracleRel = 1e-6;
constexpr double kOracleSeconds = 60.0;
constexpr double kClosedFormTol = 1e-9;
constexpr double kFig4Seconds = 600.0;
constexpr double kPowerSigmas = 3.0;
constexpr double kBalanceTol = 1e-4;
constexpr double kMixTol = 1e-6;
constexpr std::size_t kMaxEvaluations = 200;

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void info(const std::string& detail) {
    std::printf("       %s\n", detail.c_str());
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + std::to_string(v[k]);
    return s;
}

struct PowerAudit {
    int pairs = 0;
    int excess = 0;
    double worst_z = -1e300;
    double worst_pooled_z = -1e300;  // replication mean against E, per sensor
    void add(const NetworkSpec& net, const std::vector<SimMetrics>& runs) {
        for (std::size_t n = 0; n < net.sensors.size() && !runs.empty(); ++n) {
            double mean = 0.0;
            double var = 0.0;
            for (const auto& r : runs) {
                mean += r.per_sensor_power[n] / runs.size();
                var += r.per_sensor_power_se[n] * r.per_sensor_power_se[n] / (runs.size() * runs.size());
            }
            if (var > 0) worst_pooled_z = std::max(worst_pooled_z, (mean - net.sensors[n].power_budget) / std::sqrt(var));
        }
        for (const auto& r : runs) {
            for (std::size_t n = 0; n < net.sensors.size(); ++n) {
                const double E = net.sensors[n].power_budget;
                const double se = r.per_sensor_power_se[n];
                ++pairs;
                if (r.per_sensor_power[n] > E + kPowerSigmas * se) ++excess;
                if (se > 0) worst_z = std::max(worst_z, (r.per_sensor_power[n] - E) / se);
            }
        }
    }
};

ExperimentOptions base(const std::string& preset) {
    ExperimentOptions o;
    o.preset = preset;
    o.quiet = true;
    return o;
}

}  // namespace

int main() {
    std::uint64_t hat_violations = 0;
    PowerAudit hat_power;
    PowerAudit relaxed_power;
    double worst_balance = 0.0;

    // 1 and 2: single-sensor setup.
    {
        ExperimentOptions o = base("table1");
        o.horizon = 1000000;
        o.replications = 1;
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<Table1Row> rows = run_table1(o);
        const double secs = seconds_since(t0);
        bool ok = secs < kTable1Seconds;
        std::string detail;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const Table1Row& r = rows[k];
            const double target = kTable1Target[k];
            ok = ok && std::abs(r.analytic - target) <= kAnalyticTol * target &&
                 std::abs(r.simulated - target) <= kSimulatedTol * target;
            detail += "eps=" + fmt(r.eps) + " analytic=" + fmt(std::round(r.analytic * 1e4) / 1e4) +
                      " sim=" + fmt(std::round(r.simulated * 1e4) / 1e4) + " target=" + fmt(target) + "; ";
            hat_violations += r.violations;
            hat_power.add(NetworkSpec{{table1_sensor(r.eps, o.budget_fraction)}, 1}, r.runs);
        }
        report(1, "table reproduction at E=3.75", ok, detail + "time=" + fmt(std::round(secs * 10) / 10) + "s");

        std::string diag = "diagnostic E=1.5:";
        for (std::size_t k = 0; k < 4; ++k) {
            const SensorSpec s = table1_sensor(kTable1Eps[k], 0.2);
            const DecoupledSolution sol = solve_decoupled(s, 0.0, auto_truncation(s));
            diag += " " + fmt(std::round(occupancy_stats(sol.occupancy, s.channel).avg_aoi * 1e4) / 1e4);
        }
        info(diag);

        bool structure = true;
        bool monotone = true;
        std::string thr;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            structure = structure && rows[k].threshold_structure;
            if (k > 0) {
                for (std::size_t q = 0; q < rows[k].thresholds.size(); ++q) {
                    monotone = monotone && rows[k].thresholds[q] >= rows[k - 1].thresholds[q];
                }
            }
            thr += "eps=" + fmt(rows[k].eps) + " t=" + join(rows[k].thresholds) + "; ";
        }
        report(2, "threshold structure", structure && monotone,
               thr + (structure ? "structure ok" : "structure broken") + (monotone ? ", non-decreasing" : ", not monotone"));
    }

    // 3: LP versus exhaustive threshold search.
    {
        const auto t0 = std::chrono::steady_clock::now();
        int compared = 0;
        int bad = 0;
        double worst = 0.0;
        for (std::uint64_t seed = 1; compared < kOracleInstances; ++seed) {
            RandomStream rng(seed, StreamId::Generic, 0xacce97);
            const int Q = 1 + static_cast<int>(rng.below(2));
            const int X = 2 + static_cast<int>(rng.below(5));
            ChannelModel m;
            if (Q == 1) {
                m = {{1.0}, {rng.uniform() * 0.7}, {1.0 + rng.uniform()}};
            } else {
                const double e = 0.15 + 0.7 * rng.uniform();
                const double w1 = 0.5 + rng.uniform();
                m = {{e, 1 - e}, {rng.uniform() * 0.7, rng.uniform() * 0.7}, {w1, w1 + 0.25 + 2 * rng.uniform()}};
            }
            const double lo = minimum_truncated_power(m, X);
            const double hi = mean_power(m);
            const SensorSpec s{m, lo + (hi - lo) * (0.02 + 1.1 * rng.uniform())};
            const double C = rng.below(2) == 0 ? 0.0 : 6.0 * rng.uniform();
            const double lp = solve_decoupled(s, C, X).objective;
            const OracleResult r = oracle_best_threshold_policy(s, C, X);
            const double err = r.feasible ? std::abs(lp - r.cost) : 1e300;
            worst = std::max(worst, err);
            if (!(err <= kOracleAbs + kOracleRel * r.cost)) ++bad;
            ++compared;
        }
        const double secs = seconds_since(t0);
        report(3, "oracle equivalence", bad == 0 && secs < kOracleSeconds,
               std::to_string(compared) + " instances, worst |diff|=" + fmt(worst) + ", mismatches=" +
                   std::to_string(bad) + ", time=" + fmt(std::round(secs * 10) / 10) + "s");
    }

    // 4: geometric law of the always-schedule chain.
    {
        double worst = 0.0;
        for (double g : {0.0, 0.2, 0.5, 0.9}) {
            const ChannelModel m{{0.3, 0.7}, {g, g}, {1, 3}};
            const ThresholdPolicy always(60, 2, 1.0);
            const OccupancyMeasure occ = occupancy_from_policy(always, m);
            for (int x = 1; x <= 60; ++x) worst = std::max(worst, std::abs(occ.mu(x) - (1 - g) * std::pow(g, x - 1)));
            worst = std::max(worst, std::abs(occupancy_stats(occ, m).avg_aoi - 1 / (1 - g)));
        }
        report(4, "steady-state closed form", worst <= kClosedFormTol, "worst deviation " + fmt(worst));
    }

    // 5 and 8: network sweep with M/N = 1/5.
    {
        ExperimentOptions o = base("fig4");
        o.horizon = 100000;
        o.replications = 10;
        o.sizes = {5, 10, 20, 40};
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<GapRow> rows = run_fig4(o);
        const double secs = seconds_since(t0);
        bool positive = true;
        bool nonincreasing = true;
        std::string detail;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const GapRow& r = rows[k];
            positive = positive && r.gap > 0;
            if (k > 0) {
                const double slack = std::hypot(r.ci, rows[k - 1].ci);
                nonincreasing = nonincreasing && r.gap <= rows[k - 1].gap + slack;
            }
            detail += "N=" + std::to_string(r.sensors) + " gap=" + fmt(std::round(r.gap * 1e4) / 1e4) + "+-" +
                      fmt(std::round(r.ci * 1e4) / 1e4) + "; ";
            const NetworkSpec net = fig4_network(r.sensors);
            hat_violations += r.violations;
            hat_power.add(net, r.hat_runs);
            relaxed_power.add(net, r.relaxed_runs);
            if (!r.single) worst_balance = std::max(worst_balance, std::abs(r.sum_b - r.bandwidth));
        }
        const bool halved = rows.back().gap < 0.5 * rows.front().gap;
        report(5, "optimality gap trend", positive && nonincreasing && halved && secs < kFig4Seconds,
               detail + (positive ? "positive" : "not positive") + (nonincreasing ? ", non-increasing" : ", increasing") +
                   (halved ? ", gap(40) < gap(5)/2" : ", gap(40) >= gap(5)/2") + ", time=" +
                   fmt(std::round(secs)) + "s");

        const NetworkSpec net10 = fig4_network(10);
        const MultiplierSearch s = search_multipliers(net10, o.dual, {});
        const RelaxedSolution rel = solve_relaxed(net10, o.dual);
        const bool bracket = !s.single && s.low.price < s.high.price &&
                             s.low.total_bandwidth() >= net10.bandwidth &&
                             net10.bandwidth >= s.high.total_bandwidth();
        const double miss = std::abs(rel.total_bandwidth - net10.bandwidth);
        report(8, "dual-search soundness", bracket && miss <= kMixTol && s.evaluations <= kMaxEvaluations,
               "N=10 C=[" + fmt(s.low.price) + ", " + fmt(s.high.price) + "] sum b=[" + fmt(s.low.total_bandwidth()) +
                   ", " + fmt(s.high.total_bandwidth()) + "] M=" + std::to_string(net10.bandwidth) +
                   " mixed miss=" + fmt(miss) + " evaluations=" + std::to_string(s.evaluations));
    }

    // 6: comparison against the greedy index baseline.
    {
        ExperimentOptions o = base("fig5");
        o.horizon = 100000;
        o.replications = 10;
        o.sizes = {5, 10, 20};
        const std::vector<CompareRow> rows = run_fig5(o);
        bool ok = true;
        std::string detail;
        for (const CompareRow& r : rows) {
            const bool beats = r.j_hat + r.ci < r.j_whittle - r.ci_whittle;
            ok = ok && beats;
            detail += "N=" + std::to_string(r.sensors) + " hat=" + fmt(std::round(r.j_hat * 1e4) / 1e4) + "+-" +
                      fmt(std::round(r.ci * 1e4) / 1e4) + " whittle=" + fmt(std::round(r.j_whittle * 1e4) / 1e4) +
                      "+-" + fmt(std::round(r.ci_whittle * 1e4) / 1e4) + (beats ? "" : " (overlap or worse)") + "; ";
            const NetworkSpec net = fig5_network(r.sensors);
            hat_violations += r.violations_hat;
            hat_power.add(net, r.hat_runs);
            if (!r.single) worst_balance = std::max(worst_balance, std::abs(r.sum_b - 2.0));
        }
        report(6, "baseline dominance", ok, detail);
    }

    // 7: audits over every truncated and relaxed simulation above.
    {
        const bool ok = hat_violations == 0 && hat_power.excess == 0 && relaxed_power.excess == 0 &&
                        worst_balance <= kBalanceTol;
        report(7, "constraint audits", ok,
               "bandwidth violations=" + std::to_string(hat_violations) + "; truncated power above E+3se in " +
                   std::to_string(hat_power.excess) + "/" + std::to_string(hat_power.pairs) +
                   " (run,sensor) pairs, worst z=" + fmt(std::round(hat_power.worst_z * 100) / 100) +
                   "; relaxed in " + std::to_string(relaxed_power.excess) + "/" + std::to_string(relaxed_power.pairs) +
                   ", worst z=" + fmt(std::round(relaxed_power.worst_z * 100) / 100) +
                   "; worst |sum b - M|=" + fmt(worst_balance));
        info("pooled over replications: truncated worst z=" + fmt(std::round(hat_power.worst_pooled_z * 100) / 100) +
             ", relaxed worst z=" + fmt(std::round(relaxed_power.worst_pooled_z * 100) / 100));
    }

    std::printf("%d of 8 criteria failed\n", failures);
    return failures;
}
