#include "aoisched/dual_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>

#include "aoisched/parallel.hpp"

namespace aoi {

void DualParams::validate() const {
    if (!(initial_step > 0.0) || !(shrink > 0.0 && shrink < 1.0) || !(step_tol > 0.0) || max_evaluations < 1) {
        throw Error(ErrorCode::InvalidSpec, "dual parameters need step > 0, 0 < shrink < 1, tolerance > 0");
    }
}

double SubgradientEval::total_bandwidth() const noexcept {
    return std::accumulate(bandwidth.begin(), bandwidth.end(), 0.0);
}

std::vector<int> resolve_truncations(const NetworkSpec& network, const std::vector<int>& truncations) {
    if (truncations.empty()) {
        std::vector<int> out;
        out.reserve(network.sensors.size());
        for (const auto& s : network.sensors) out.push_back(auto_truncation(s));
        return out;
    }
    if (truncations.size() != network.sensors.size()) {
        throw Error(ErrorCode::InvalidSpec, "one truncation per sensor required");
    }
    return truncations;
}

SubgradientEval evaluate_subgradient(const NetworkSpec& network, double price, const std::vector<int>& truncations,
                                     SolutionCache* cache) {
    require_valid(network);
    const std::vector<int> xs = resolve_truncations(network, truncations);
    const std::size_t n = network.sensors.size();
    SubgradientEval eval;
    eval.price = price;
    eval.bandwidth.assign(n, 0.0);
    eval.occupancy.resize(n);
    if (cache != nullptr) cache->per_sensor.resize(n);
    std::vector<char> hit(n, 0);
    parallel_for(n, [&](std::size_t i) {
        try {
            const DecoupledSolution* found = nullptr;
            if (cache != nullptr) {
                for (const auto& c : cache->per_sensor[i]) {
                    if (c.occupancy.truncation() == xs[i] && c.price_lo < price && price < c.price_hi) {
                        found = &c;
                        break;
                    }
                }
            }
            OccupancyMeasure occ;
            if (found != nullptr) {
                occ = found->occupancy;
                hit[i] = 1;
            } else {
                DecoupledSolution sol = solve_decoupled(network.sensors[i], price, xs[i]);
                occ = sol.occupancy;
                if (cache != nullptr) cache->per_sensor[i].push_back(std::move(sol));
            }
            eval.bandwidth[i] = occupancy_stats(occ, network.sensors[i].channel).sched_fraction;
            eval.occupancy[i] = std::move(occ);
        } catch (const Error& e) {
            std::ostringstream os;
            os << "sensor " << i << " at C=" << price << ": " << e.what();
            throw Error(e.code(), os.str());
        }
    });
    if (cache != nullptr) {
        const std::size_t h = static_cast<std::size_t>(std::count(hit.begin(), hit.end(), 1));
        cache->hits += h;
        cache->solves += n - h;
    }
    eval.d = eval.total_bandwidth() - network.bandwidth;
    return eval;
}

MultiplierSearch search_multipliers(const NetworkSpec& network, const DualParams& params,
                                    const std::vector<int>& truncations) {
    params.validate();
    const std::vector<int> xs = resolve_truncations(network, truncations);
    const double M = network.bandwidth;

    MultiplierSearch out;
    SolutionCache solutions;
    std::vector<SubgradientEval> cache;
    cache.push_back(evaluate_subgradient(network, 0.0, xs, &solutions));
    out.evaluations = 1;
    double step = params.initial_step;
    out.trace.push_back({1, 0.0, cache.back().d, step});

    if (cache.back().d <= 0.0) {
        out.lp_solves = solutions.solves;
        out.single = true;
        out.converged = true;
        out.low = cache.back();
        out.high = cache.back();
        return out;
    }

    while (true) {
        const SubgradientEval& cur = cache.back();
        if (cur.d == 0.0) {
            out.lp_solves = solutions.solves;
            out.single = true;
            out.converged = true;
            out.low = cur;
            out.high = cur;
            return out;
        }
        if (step < params.step_tol) {
            out.converged = true;
            break;
        }
        if (out.evaluations >= params.max_evaluations) break;
        const double next_price = std::max(0.0, cur.price + step * cur.d);
        const double prev_d = cur.d;
        cache.push_back(evaluate_subgradient(network, next_price, xs, &solutions));
        ++out.evaluations;
        if (prev_d * cache.back().d < 0.0) step *= params.shrink;
        out.trace.push_back({out.evaluations, next_price, cache.back().d, step});
    }

    out.lp_solves = solutions.solves;

    // Tightest bracket among everything evaluated: the cheapest price that
    // undershoots M, and the dearest price below it that reaches M.
    const SubgradientEval* high = nullptr;
    for (const auto& e : cache) {
        if (e.total_bandwidth() < M && (high == nullptr || e.price < high->price)) high = &e;
    }
    const SubgradientEval* low = nullptr;
    if (high != nullptr) {
        for (const auto& e : cache) {
            if (e.total_bandwidth() >= M && e.price < high->price && (low == nullptr || e.price > low->price)) low = &e;
        }
    }
    if (high == nullptr || low == nullptr) {
        std::ostringstream os;
        os << "no sign change of the subgradient in " << out.evaluations << " evaluations; trace:";
        for (const auto& r : out.trace) os << " (C=" << r.price << ", d=" << r.d << ")";
        throw Error(ErrorCode::BracketNotFound, os.str());
    }
    out.low = *low;
    out.high = *high;
    return out;
}

double mixing_weight(double b_sum_high, double b_sum_low, double bandwidth) {
    const double denom = b_sum_high - b_sum_low;
    if (std::abs(denom) < 1e-12) {
        throw Error(ErrorCode::DegenerateBracket, "bracketing solutions use the same bandwidth");
    }
    return std::clamp((bandwidth - b_sum_low) / denom, 0.0, 1.0);
}

std::vector<ThresholdPolicy> RelaxedSolution::policies() const {
    std::vector<ThresholdPolicy> out;
    out.reserve(sensors.size());
    for (const auto& s : sensors) out.push_back(s.policy);
    return out;
}

RelaxedSolution mix_and_recover(const NetworkSpec& network, const std::vector<OccupancyMeasure>& high,
                                const std::vector<OccupancyMeasure>& low, double weight_high) {
    const std::size_t n = network.sensors.size();
    if (high.size() != n || low.size() != n) {
        throw Error(ErrorCode::InvalidSpec, "one occupancy per sensor required on both sides of the bracket");
    }
    RelaxedSolution out;
    out.weight_high = weight_high;
    out.sensors.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const OccupancyMeasure& h = high[i];
        const OccupancyMeasure& l = low[i];
        if (h.truncation() != l.truncation() || h.num_states() != l.num_states()) {
            throw Error(ErrorCode::InvalidSpec, "bracketing occupancies differ in shape");
        }
        OccupancyMeasure mixed(h.truncation(), h.num_states());
        auto mix = [&](std::span<double> dst, std::span<const double> a, std::span<const double> b) {
            for (std::size_t k = 0; k < dst.size(); ++k) {
                dst[k] = (weight_high == 1.0) ? a[k] : (weight_high == 0.0) ? b[k] : weight_high * a[k] + (1.0 - weight_high) * b[k];
            }
        };
        mix(mixed.mu_values(), h.mu_values(), l.mu_values());
        mix(mixed.y_values(), h.y_values(), l.y_values());
        const ChannelModel& model = network.sensors[i].channel;
        SensorRelaxed& s = out.sensors[i];
        s.stats = occupancy_stats(mixed, model);
        s.policy = recover_policy(mixed, model);
        s.occupancy = std::move(mixed);
        out.total_bandwidth += s.stats.sched_fraction;
    }
    out.lower_bound = analytic_lower_bound(out);
    return out;
}

RelaxedSolution solve_relaxed(const NetworkSpec& network, const DualParams& params,
                              const std::vector<int>& truncations) {
    MultiplierSearch search = search_multipliers(network, params, truncations);
    RelaxedSolution out;
    if (search.single) {
        out = mix_and_recover(network, search.high.occupancy, search.low.occupancy, 1.0);
        out.single = true;
    } else {
        const double lambda =
            mixing_weight(search.high.total_bandwidth(), search.low.total_bandwidth(), network.bandwidth);
        out = mix_and_recover(network, search.high.occupancy, search.low.occupancy, lambda);
    }
    out.price_low = search.low.price;
    out.price_high = search.high.price;
    out.trace = std::move(search.trace);
    out.evaluations = search.evaluations;
    return out;
}

double analytic_lower_bound(const RelaxedSolution& relaxed) {
    if (relaxed.sensors.empty()) return 0.0;
    double total = 0.0;
    for (const auto& s : relaxed.sensors) total += s.stats.avg_aoi;
    return total / static_cast<double>(relaxed.sensors.size());
}

void write_dual_trace_csv(std::ostream& os, const std::vector<DualTraceRow>& trace) {
    os << "k,C,d,s\n";
    char buf[128];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf, "%zu,%.12g,%.12g,%.12g\n", r.k, r.price, r.d, r.step);
        os << buf;
    }
}

}  // namespace aoi
