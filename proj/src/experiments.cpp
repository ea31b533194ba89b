#include "aoisched/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "aoisched/io.hpp"

namespace aoi {

namespace fs = std::filesystem;

SensorSpec table1_sensor(double eps, double budget_fraction) {
    SensorSpec s;
    s.channel.eta = {0.25, 0.25, 0.25, 0.25};
    s.channel.eps = {eps, eps, eps, eps};
    s.channel.omega = {2.0, 4.0, 8.0, 16.0};
    s.power_budget = budget_fraction * mean_power(s.channel);
    return s;
}

namespace {

ChannelModel fig_channel(std::vector<double> eps) {
    return {kFig4Eta, std::move(eps), {1.0, 2.0, 3.0, 4.0}};
}

std::uint64_t pick(std::uint64_t value, std::uint64_t fallback) { return value == 0 ? fallback : value; }

std::vector<int> truncations_for(const NetworkSpec& net, int override_x) {
    if (override_x <= 0) return {};
    return std::vector<int>(net.sensors.size(), override_x);
}

void progress(const ExperimentOptions& o, const std::string& msg) {
    if (!o.quiet) std::cerr << "[" << o.preset << "] " << msg << std::endl;
}

int count_power_excess(const NetworkSpec& net, const std::vector<SimMetrics>& runs) {
    int bad = 0;
    for (const auto& r : runs) {
        for (std::size_t n = 0; n < net.sensors.size(); ++n) {
            if (r.per_sensor_power[n] > net.sensors[n].power_budget + 3.0 * r.per_sensor_power_se[n]) ++bad;
        }
    }
    return bad;
}

std::uint64_t count_violations(const std::vector<SimMetrics>& runs) {
    std::uint64_t v = 0;
    for (const auto& r : runs) v += r.bandwidth_violations;
    return v;
}

SimConfig sim_config(const ExperimentOptions& o, std::uint64_t default_t) {
    SimConfig c;
    c.horizon = pick(o.horizon, default_t);
    c.seed = o.seed;
    return c;
}

int reps_or(const ExperimentOptions& o, int fallback) { return o.replications > 0 ? o.replications : fallback; }

std::vector<int> sizes_or(const ExperimentOptions& o, std::vector<int> fallback) {
    return o.sizes.empty() ? fallback : o.sizes;
}

}  // namespace

double greedy_power(int sensors, int bandwidth) {
    return static_cast<double>(bandwidth) / sensors * mean_power(fig_channel({0, 0, 0, 0}));
}

int fig4_bandwidth(int sensors) noexcept {
    return std::max(1, static_cast<int>(std::lround(sensors / 5.0)));
}

NetworkSpec fig4_network(int sensors) {
    if (sensors < 2) throw Error(ErrorCode::InvalidSpec, "fig4 needs at least two sensors");
    NetworkSpec net;
    net.bandwidth = fig4_bandwidth(sensors);
    const double eg = greedy_power(sensors, net.bandwidth);
    for (int n = 0; n < sensors; ++n) {
        const double rho = 0.2 + 1.4 * n / (sensors - 1);
        net.sensors.push_back({fig_channel(kFig4Eps), rho * eg});
    }
    return net;
}

NetworkSpec fig5_network(int sensors) {
    if (sensors < 2) throw Error(ErrorCode::InvalidSpec, "fig5 needs at least two sensors");
    NetworkSpec net;
    net.bandwidth = 2;
    const double eg = greedy_power(sensors, net.bandwidth);
    for (int n = 1; n <= sensors; ++n) {
        const double e = static_cast<double>(n - 1) / sensors;
        net.sensors.push_back({fig_channel({e, e, e, e}), eg});
    }
    return net;
}

std::vector<double> average_losses(const NetworkSpec& network) {
    std::vector<double> out;
    for (const auto& s : network.sensors) out.push_back(gamma(s.channel));
    return out;
}

std::vector<Table1Row> run_table1(const ExperimentOptions& o, bool simulate) {
    std::vector<Table1Row> rows;
    const SimConfig cfg = sim_config(o, 1000000);
    const int reps = reps_or(o, 1);
    for (double eps : kTable1Eps) {
        const SensorSpec spec = table1_sensor(eps, o.budget_fraction);
        const int X = o.truncation > 0 ? o.truncation : auto_truncation(spec);
        DecoupledSolution sol = solve_decoupled(spec, 0.0, X);
        Table1Row r{};
        r.eps = eps;
        r.budget = spec.power_budget;
        r.truncation = X;
        const OccupancyStats st = occupancy_stats(sol.occupancy, spec.channel);
        r.analytic = st.avg_aoi;
        r.analytic_power = st.avg_power;
        r.policy = recover_policy(sol.occupancy, spec.channel);
        r.thresholds = policy_thresholds(r.policy);
        r.threshold_structure = has_threshold_structure(r.policy);
        r.occupancy = std::move(sol.occupancy);
        if (simulate) {
            progress(o, "eps=" + fmt(eps) + " simulating");
            NetworkSpec net{{spec}, 1};
            r.runs = run_replications(net, SimPolicy::truncated({r.policy}), cfg, reps);
            std::vector<double> aoi;
            std::vector<double> power;
            for (const auto& m : r.runs) {
                aoi.push_back(m.avg_aoi);
                power.push_back(m.per_sensor_power[0]);
            }
            const ReplicationSummary sa = summarize(aoi);
            r.simulated = sa.mean;
            r.ci = reps > 1 ? sa.half_width : r.runs[0].avg_aoi_half_width;
            r.sim_power = summarize(power).mean;
            r.sim_power_se = r.runs[0].per_sensor_power_se[0];
            r.violations = count_violations(r.runs);
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<GapRow> run_fig4(const ExperimentOptions& o) {
    std::vector<GapRow> rows;
    const SimConfig cfg = sim_config(o, 100000);
    const int reps = reps_or(o, 10);
    for (int N : sizes_or(o, {5, 10, 20, 40})) {
        const NetworkSpec net = fig4_network(N);
        progress(o, "N=" + std::to_string(N) + " dual search");
        const MultiplierSearch search = search_multipliers(net, o.dual, truncations_for(net, o.truncation));
        RelaxedSolution rel;
        if (search.single) {
            rel = mix_and_recover(net, search.high.occupancy, search.low.occupancy, 1.0);
            rel.single = true;
        } else {
            const double lambda = mixing_weight(search.high.total_bandwidth(), search.low.total_bandwidth(), net.bandwidth);
            rel = mix_and_recover(net, search.high.occupancy, search.low.occupancy, lambda);
        }
        GapRow r{};
        r.sensors = N;
        r.bandwidth = net.bandwidth;
        r.j_r = rel.lower_bound;
        r.sum_b = rel.total_bandwidth;
        r.price_low = search.low.price;
        r.price_high = search.high.price;
        r.weight_high = rel.weight_high;
        r.evaluations = search.evaluations;
        r.single = search.single;
        r.bracket_ok = search.single ? search.low.total_bandwidth() <= net.bandwidth
                                     : search.low.total_bandwidth() >= net.bandwidth &&
                                           net.bandwidth >= search.high.total_bandwidth();
        r.trace = search.trace;

        progress(o, "N=" + std::to_string(N) + " simulating");
        const std::vector<ThresholdPolicy> policies = rel.policies();
        r.hat_runs = run_replications(net, SimPolicy::truncated(policies), cfg, reps);
        r.relaxed_runs = run_replications(net, SimPolicy::relaxed(policies), cfg, reps);
        const ReplicationSummary hat = summarize_aoi(r.hat_runs);
        const ReplicationSummary relaxed = summarize_aoi(r.relaxed_runs);
        r.j_hat = hat.mean;
        r.ci = hat.half_width;
        r.gap = r.j_hat - r.j_r;
        r.j_relaxed_sim = relaxed.mean;
        r.ci_relaxed = relaxed.half_width;
        r.violations = count_violations(r.hat_runs);
        r.power_excess = count_power_excess(net, r.hat_runs) + count_power_excess(net, r.relaxed_runs);
        rows.push_back(std::move(r));
    }
    return rows;
}

std::vector<CompareRow> run_fig5(const ExperimentOptions& o) {
    std::vector<CompareRow> rows;
    const SimConfig cfg = sim_config(o, 100000);
    const int reps = reps_or(o, 10);
    for (int N : sizes_or(o, {5, 10, 20})) {
        const NetworkSpec net = fig5_network(N);
        progress(o, "N=" + std::to_string(N) + " dual search");
        const RelaxedSolution rel = solve_relaxed(net, o.dual, truncations_for(net, o.truncation));
        progress(o, "N=" + std::to_string(N) + " simulating");
        CompareRow r{};
        r.sensors = N;
        r.sum_b = rel.total_bandwidth;
        r.single = rel.single;
        r.trace = rel.trace;
        r.hat_runs = run_replications(net, SimPolicy::truncated(rel.policies()), cfg, reps);
        r.whittle_runs = run_replications(net, SimPolicy::greedy_whittle(average_losses(net)), cfg, reps);
        const ReplicationSummary hat = summarize_aoi(r.hat_runs);
        const ReplicationSummary wh = summarize_aoi(r.whittle_runs);
        r.j_hat = hat.mean;
        r.ci = hat.half_width;
        r.j_whittle = wh.mean;
        r.ci_whittle = wh.half_width;
        r.violations_hat = count_violations(r.hat_runs);
        r.violations_whittle = count_violations(r.whittle_runs);
        r.power_excess = count_power_excess(net, r.hat_runs);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

class OutputDir {
public:
    OutputDir(const std::string& dir, std::vector<std::string>& files) : dir_(dir), files_(files) {
        fs::create_directories(dir_);
    }

    std::ofstream open(const std::string& name) {
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw Error(ErrorCode::InvalidSpec, "cannot write " + (dir_ / name).string());
        files_.push_back(name);
        return f;
    }

private:
    fs::path dir_;
    std::vector<std::string>& files_;
};

void write_runs(std::ostream& os, const std::string& label, const std::vector<SimMetrics>& runs) {
    for (std::size_t k = 0; k < runs.size(); ++k) {
        os << label << ',';
        write_metrics_csv_row(os, static_cast<int>(k), runs[k]);
    }
}

void write_trace(OutputDir& out, const std::string& name, const NetworkSpec& net, const SimPolicy& policy,
                 SimConfig cfg) {
    std::ofstream f = out.open(name);
    write_trace_header(f);
    cfg.seed = replication_seed(cfg.seed, 0);
    cfg.trace = &f;
    run_simulation(net, policy, cfg);
}

void write_fig3(std::ostream& os, const std::vector<Table1Row>& rows) {
    os << "x,q,eps,p\n";
    for (const auto& r : rows) {
        for (int x = 1; x <= r.policy.truncation(); ++x) {
            for (int q = 1; q <= r.policy.num_states(); ++q) {
                os << x << ',' << q << ',' << fmt(r.eps) << ',' << fmt(r.policy.at(x, q)) << '\n';
            }
        }
    }
}

void emit_table1(const ExperimentOptions& o, OutputDir& out, ExperimentResult& res) {
    res.table1 = run_table1(o, true);
    {
        std::ofstream f = out.open("table1.csv");
        f << "eps,E,X,analytic,simulated,ci,analytic_power,sim_power,violations,t1,t2,t3,t4\n";
        for (const auto& r : res.table1) {
            f << fmt(r.eps) << ',' << fmt(r.budget) << ',' << r.truncation << ',' << fmt(r.analytic) << ','
              << fmt(r.simulated) << ',' << fmt(r.ci) << ',' << fmt(r.analytic_power) << ',' << fmt(r.sim_power)
              << ',' << r.violations;
            for (int t : r.thresholds) f << ',' << t;
            f << '\n';
        }
    }
    {
        std::ofstream f = out.open("table1_runs.csv");
        f << "eps,";
        write_metrics_csv_header(f);
        for (const auto& r : res.table1) write_runs(f, fmt(r.eps), r.runs);
    }
    {
        std::ofstream f = out.open("fig3_strategy.csv");
        write_fig3(f, res.table1);
    }
    if (o.trace) {
        const Table1Row& r = res.table1.front();
        write_trace(out, "table1_trace.csv", {{table1_sensor(r.eps, o.budget_fraction)}, 1},
                    SimPolicy::truncated({r.policy}), sim_config(o, 1000000));
    }
}

void emit_fig3(const ExperimentOptions& o, OutputDir& out, ExperimentResult& res) {
    res.table1 = run_table1(o, false);
    std::ofstream f = out.open("fig3_strategy.csv");
    write_fig3(f, res.table1);
    std::ofstream g = out.open("fig3_occupancy.csv");
    g << "eps,x,q,mu,y,p\n";
    for (const auto& r : res.table1) {
        std::ostringstream body;
        write_policy_csv(body, r.occupancy, r.policy);
        std::istringstream lines(body.str());
        std::string line;
        std::getline(lines, line);
        while (std::getline(lines, line)) g << fmt(r.eps) << ',' << line << '\n';
    }
}

void emit_fig4(const ExperimentOptions& o, OutputDir& out, ExperimentResult& res) {
    res.fig4 = run_fig4(o);
    {
        std::ofstream f = out.open("fig4_gap.csv");
        f << "N,J_hat,J_R,gap,ci\n";
        for (const auto& r : res.fig4) {
            f << r.sensors << ',' << fmt(r.j_hat) << ',' << fmt(r.j_r) << ',' << fmt(r.gap) << ',' << fmt(r.ci) << '\n';
        }
    }
    {
        std::ofstream f = out.open("fig4_detail.csv");
        f << "N,M,sum_b,C_low,C_high,lambda,evaluations,single,J_R_sim,ci_R_sim,violations,power_excess\n";
        for (const auto& r : res.fig4) {
            f << r.sensors << ',' << r.bandwidth << ',' << fmt(r.sum_b) << ',' << fmt(r.price_low) << ','
              << fmt(r.price_high) << ',' << fmt(r.weight_high) << ',' << r.evaluations << ',' << (r.single ? 1 : 0)
              << ',' << fmt(r.j_relaxed_sim) << ',' << fmt(r.ci_relaxed) << ',' << r.violations << ','
              << r.power_excess << '\n';
        }
    }
    {
        std::ofstream f = out.open("fig4_runs.csv");
        f << "N,policy,";
        write_metrics_csv_header(f);
        for (const auto& r : res.fig4) {
            write_runs(f, std::to_string(r.sensors) + ",truncated", r.hat_runs);
            write_runs(f, std::to_string(r.sensors) + ",relaxed", r.relaxed_runs);
        }
    }
    for (const auto& r : res.fig4) {
        std::ofstream f = out.open("fig4_dual_N" + std::to_string(r.sensors) + ".csv");
        write_dual_trace_csv(f, r.trace);
    }
    if (o.trace && !res.fig4.empty()) {
        const NetworkSpec net = fig4_network(res.fig4.front().sensors);
        const RelaxedSolution rel = solve_relaxed(net, o.dual, truncations_for(net, o.truncation));
        write_trace(out, "fig4_trace.csv", net, SimPolicy::truncated(rel.policies()), sim_config(o, 100000));
    }
}

void emit_fig5(const ExperimentOptions& o, OutputDir& out, ExperimentResult& res) {
    res.fig5 = run_fig5(o);
    {
        std::ofstream f = out.open("fig5_compare.csv");
        f << "N,J_hat,J_whittle,ci,ci_whittle\n";
        for (const auto& r : res.fig5) {
            f << r.sensors << ',' << fmt(r.j_hat) << ',' << fmt(r.j_whittle) << ',' << fmt(r.ci) << ','
              << fmt(r.ci_whittle) << '\n';
        }
    }
    {
        std::ofstream f = out.open("fig5_runs.csv");
        f << "N,policy,";
        write_metrics_csv_header(f);
        for (const auto& r : res.fig5) {
            write_runs(f, std::to_string(r.sensors) + ",truncated", r.hat_runs);
            write_runs(f, std::to_string(r.sensors) + ",greedy_whittle", r.whittle_runs);
        }
    }
    for (const auto& r : res.fig5) {
        std::ofstream f = out.open("fig5_dual_N" + std::to_string(r.sensors) + ".csv");
        write_dual_trace_csv(f, r.trace);
    }
    if (o.trace && !res.fig5.empty()) {
        const NetworkSpec net = fig5_network(res.fig5.front().sensors);
        write_trace(out, "fig5_trace.csv", net, SimPolicy::greedy_whittle(average_losses(net)), sim_config(o, 100000));
    }
}

void emit_custom(const ExperimentOptions& o, OutputDir& out) {
    if (o.spec_path.empty()) throw Error(ErrorCode::InvalidSpec, "custom preset needs --spec FILE");
    const NetworkSpec net = load_network_spec(o.spec_path);
    const RelaxedSolution rel = solve_relaxed(net, o.dual, truncations_for(net, o.truncation));
    const SimConfig cfg = sim_config(o, 100000);
    const int reps = reps_or(o, 10);
    const std::vector<ThresholdPolicy> policies = rel.policies();

    for (std::size_t n = 0; n < rel.sensors.size(); ++n) {
        std::ofstream f = out.open("custom_policy_sensor" + std::to_string(n) + ".csv");
        write_policy_csv(f, rel.sensors[n].occupancy, rel.sensors[n].policy);
    }
    {
        std::ofstream f = out.open("custom_dual.csv");
        write_dual_trace_csv(f, rel.trace);
    }
    const std::vector<std::pair<std::string, SimPolicy>> runs{
        {"truncated", SimPolicy::truncated(policies)},
        {"relaxed", SimPolicy::relaxed(policies)},
        {"greedy_whittle", SimPolicy::greedy_whittle(average_losses(net))},
    };
    std::ofstream summary = out.open("custom_summary.csv");
    summary << "policy,J,ci,violations\n";
    summary << "analytic_relaxed," << fmt(rel.lower_bound) << ",0,0\n";
    std::ofstream per_run = out.open("custom_runs.csv");
    per_run << "policy,";
    write_metrics_csv_header(per_run);
    nlohmann::json metrics = nlohmann::json::object();
    for (const auto& [name, policy] : runs) {
        const std::vector<SimMetrics> m = run_replications(net, policy, cfg, reps);
        const ReplicationSummary s = summarize_aoi(m);
        summary << name << ',' << fmt(s.mean) << ',' << fmt(s.half_width) << ',' << count_violations(m) << '\n';
        write_runs(per_run, name, m);
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : m) arr.push_back(metrics_to_json(r));
        metrics[name] = arr;
    }
    std::ofstream mj = out.open("custom_metrics.json");
    mj << metrics.dump(1) << '\n';
    if (o.trace) write_trace(out, "custom_trace.csv", net, runs.front().second, cfg);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentOptions& options) {
    options.dual.validate();
    ExperimentOptions o = options;
    if (o.horizon == 0) o.horizon = (o.preset == "table1" || o.preset == "fig3") ? 1000000 : 100000;
    if (o.replications <= 0) o.replications = (o.preset == "table1" || o.preset == "fig3") ? 1 : 10;
    if (o.sizes.empty() && o.preset == "fig4") o.sizes = {5, 10, 20, 40};
    if (o.sizes.empty() && o.preset == "fig5") o.sizes = {5, 10, 20};
    ExperimentResult res;
    OutputDir out(o.out_dir, res.files);
    if (o.preset == "table1") {
        emit_table1(o, out, res);
    } else if (o.preset == "fig3") {
        emit_fig3(o, out, res);
    } else if (o.preset == "fig4") {
        emit_fig4(o, out, res);
    } else if (o.preset == "fig5") {
        emit_fig5(o, out, res);
    } else if (o.preset == "custom") {
        emit_custom(o, out);
    } else {
        throw Error(ErrorCode::InvalidSpec, "unknown preset '" + o.preset + "'");
    }

    nlohmann::ordered_json manifest;
    manifest["preset"] = o.preset;
    manifest["seed"] = o.seed;
    manifest["T"] = o.horizon;
    manifest["reps"] = o.replications;
    manifest["X"] = o.truncation;
    manifest["N"] = o.sizes;
    manifest["budget_fraction"] = o.budget_fraction;
    manifest["dual"] = {{"step", o.dual.initial_step}, {"shrink", o.dual.shrink}, {"eps", o.dual.step_tol},
                        {"max_evaluations", o.dual.max_evaluations}};
    if (!o.spec_path.empty()) manifest["spec"] = o.spec_path;
    manifest["trace"] = o.trace;
    manifest["tool_version"] = kToolVersion;
    manifest["files"] = res.files;
    std::ofstream f(fs::path(o.out_dir) / "manifest.json", std::ios::binary);
    f << manifest.dump(2) << '\n';
    return res;
}

}  // namespace aoi
