#include "aoisched/single_sensor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aoi {

ThresholdPolicy ThresholdPolicy::from_thresholds(int truncation, std::span<const int> thresholds) {
    ThresholdPolicy policy(truncation, static_cast<int>(thresholds.size()));
    for (int q = 1; q <= policy.num_states(); ++q) {
        for (int x = 1; x < truncation; ++x) {
            policy.at(x, q) = x >= thresholds[q - 1] ? 1.0 : 0.0;
        }
    }
    return policy;
}

int auto_truncation(const SensorSpec& spec) {
    require_valid(spec);
    const double g = gamma(spec.channel);
    const double ratio = mean_power(spec.channel) / spec.power_budget;
    const double accuracy = std::clamp(std::ceil(3.0 * ratio / (1.0 - g)), 50.0, double(kMaxAutoTruncation));
    // Never scheduling below X costs mean_power / ((1 - gamma)(X - 1) + 1) per slot.
    const double feasible = std::ceil(1.0 + 1.25 * std::max(ratio - 1.0, 0.0) / (1.0 - g));
    return static_cast<int>(std::max(accuracy, feasible));
}

namespace {

void require_truncation(int truncation) {
    if (truncation < 2) {
        throw Error(ErrorCode::InvalidSpec, "truncation X must be at least 2");
    }
}

// Occupancy rows shared by the decoupled program and the minimum-power program.
lp::LinearProgram occupancy_program(const ChannelModel& model, int truncation) {
    const int X = truncation;
    const int Q = model.num_states();
    const double g = gamma(model);
    const DecoupledLayout layout{X, Q};
    lp::LinearProgram prog(layout.num_vars());
    std::fill(prog.upper.begin(), prog.upper.end(), 1.0);

    double* norm = prog.add_eq(1.0);
    for (int x = 1; x < X; ++x) norm[layout.mu(x)] = 1.0;
    norm[layout.mu(X)] = 1.0 / (1.0 - g);

    double* renewal = prog.add_eq(0.0);
    renewal[layout.mu(1)] = 1.0;
    renewal[layout.mu(X)] -= 1.0;
    for (int x = 1; x < X; ++x) {
        for (int q = 1; q <= Q; ++q) renewal[layout.y(x, q)] = -(1.0 - model.eps[q - 1]);
    }

    for (int x = 2; x <= X; ++x) {
        double* flow = prog.add_eq(0.0);
        flow[layout.mu(x)] = 1.0;
        flow[layout.mu(x - 1)] = -1.0;
        for (int q = 1; q <= Q; ++q) flow[layout.y(x - 1, q)] = 1.0 - model.eps[q - 1];
    }
    return prog;
}

void add_coupling_rows(lp::LinearProgram& prog, const ChannelModel& model, int truncation) {
    const DecoupledLayout layout{truncation, model.num_states()};
    for (int x = 1; x < truncation; ++x) {
        for (int q = 1; q <= model.num_states(); ++q) {
            double* row = prog.add_ub(0.0);
            row[layout.y(x, q)] = 1.0;
            row[layout.mu(x)] = -model.eta[q - 1];
        }
    }
}

void fill_power_row(double* row, const ChannelModel& model, int truncation) {
    const DecoupledLayout layout{truncation, model.num_states()};
    for (int x = 1; x < truncation; ++x) {
        for (int q = 1; q <= model.num_states(); ++q) row[layout.y(x, q)] = model.omega[q - 1];
    }
    row[layout.mu(truncation)] = mean_power(model) / (1.0 - gamma(model));
}

OccupancyMeasure unpack(const std::vector<double>& values, int truncation, int num_states) {
    const DecoupledLayout layout{truncation, num_states};
    OccupancyMeasure occ(truncation, num_states);
    for (int x = 1; x <= truncation; ++x) occ.mu(x) = values[layout.mu(x)];
    for (int x = 1; x < truncation; ++x) {
        for (int q = 1; q <= num_states; ++q) occ.y(x, q) = values[layout.y(x, q)];
    }
    return occ;
}

}  // namespace

lp::LinearProgram build_decoupled_lp(const SensorSpec& spec, double price, int truncation) {
    require_valid(spec);
    require_truncation(truncation);
    if (!(price >= 0.0) || !std::isfinite(price)) {
        throw Error(ErrorCode::InvalidSpec, "price C must be finite and non-negative");
    }
    const ChannelModel& model = spec.channel;
    const int X = truncation;
    const double g = gamma(model);
    const DecoupledLayout layout{X, model.num_states()};

    lp::LinearProgram prog = occupancy_program(model, X);
    for (int x = 1; x < X; ++x) {
        prog.objective[layout.mu(x)] = x;
        for (int q = 1; q <= model.num_states(); ++q) prog.objective[layout.y(x, q)] = price;
    }
    const double tail = 1.0 / (1.0 - g);
    prog.objective[layout.mu(X)] = X * tail + g * tail * tail + price * tail;

    fill_power_row(prog.add_ub(spec.power_budget), model, X);
    add_coupling_rows(prog, model, X);
    return prog;
}

double minimum_truncated_power(const ChannelModel& model, int truncation) {
    require_valid(model);
    require_truncation(truncation);
    lp::LinearProgram prog = occupancy_program(model, truncation);
    fill_power_row(prog.objective.data(), model, truncation);
    add_coupling_rows(prog, model, truncation);
    const lp::LpSolution sol = lp::solve_lp(prog);
    if (!sol.optimal()) {
        throw Error(ErrorCode::SolverFailure,
                    std::string("minimum-power program ended with status ") + lp::to_string(sol.status));
    }
    return sol.objective;
}

DecoupledSolution solve_decoupled(const SensorSpec& spec, double price, int truncation,
                                  const lp::SolveOptions& options) {
    const lp::LinearProgram prog = build_decoupled_lp(spec, price, truncation);
    const DecoupledLayout layout{truncation, spec.channel.num_states()};
    std::vector<double> direction(layout.num_vars(), 1.0);
    for (int x = 1; x < truncation; ++x) direction[layout.mu(x)] = 0.0;
    direction[layout.mu(truncation)] = 1.0 / (1.0 - gamma(spec.channel));
    lp::SolveOptions opts = options;
    opts.cost_direction = &direction;
    lp::LpSolution sol = lp::solve_lp(prog, opts);
    if (sol.status == lp::Status::Infeasible) {
        const double needed = minimum_truncated_power(spec.channel, truncation);
        std::ostringstream os;
        os << "power budget " << spec.power_budget << " is below the minimum " << needed
           << " reachable with truncation X=" << truncation;
        throw Error(ErrorCode::InfeasiblePower, os.str());
    }
    if (!sol.optimal()) {
        if (options.pricing != lp::PricingRule::Bland) {
            // A pure Bland pass is slower but immune to the stalls that trip the hybrid rule.
            lp::SolveOptions retry = opts;
            retry.pricing = lp::PricingRule::Bland;
            sol = lp::solve_lp(prog, retry);
        }
        if (!sol.optimal()) {
            throw Error(ErrorCode::SolverFailure,
                        std::string("decoupled program ended with status ") + lp::to_string(sol.status));
        }
    }
    DecoupledSolution out;
    out.occupancy = unpack(sol.values, truncation, spec.channel.num_states());
    out.objective = sol.objective;
    out.lp_iterations = sol.iterations;
    out.price_lo = std::max(0.0, price + sol.range_lo);
    out.price_hi = price + sol.range_hi;
    return out;
}

std::vector<double> steady_state_distribution(const ThresholdPolicy& policy, const ChannelModel& model) {
    require_valid(model);
    const int X = policy.truncation();
    if (X < 2 || policy.num_states() != model.num_states()) {
        throw Error(ErrorCode::InvalidSpec, "policy shape does not match the channel model");
    }
    const double g = gamma(model);
    std::vector<double> mu(X, 0.0);
    mu[0] = 1.0;
    for (int x = 1; x < X; ++x) {
        mu[x] = transfer_probs(policy.row(x), model, false).alpha * mu[x - 1];
    }
    double total = mu[X - 1] / (1.0 - g);
    for (int x = 0; x < X - 1; ++x) total += mu[x];
    if (!std::isfinite(total) || !(total > 0.0)) {
        throw Error(ErrorCode::SingularSystem, "age chain has no normalizable steady state");
    }
    for (double& v : mu) v /= total;
    return mu;
}

OccupancyMeasure occupancy_from_policy(const ThresholdPolicy& policy, const ChannelModel& model) {
    const std::vector<double> mu = steady_state_distribution(policy, model);
    const int X = policy.truncation();
    OccupancyMeasure occ(X, model.num_states());
    for (int x = 1; x <= X; ++x) occ.mu(x) = mu[x - 1];
    for (int x = 1; x < X; ++x) {
        for (int q = 1; q <= model.num_states(); ++q) {
            occ.y(x, q) = mu[x - 1] * model.eta[q - 1] * policy.at(x, q);
        }
    }
    return occ;
}

OccupancyStats occupancy_stats(const OccupancyMeasure& occ, const ChannelModel& model) {
    const int X = occ.truncation();
    const double g = gamma(model);
    const double tail_mass = occ.mu(X) / (1.0 - g);
    OccupancyStats s;
    double scheduled = 0.0;
    double energy = 0.0;
    for (int x = 1; x < X; ++x) {
        s.avg_aoi += x * occ.mu(x);
        for (int q = 1; q <= occ.num_states(); ++q) {
            const double y = occ.y(x, q);
            scheduled += y;
            energy += y * model.omega[q - 1];
        }
    }
    s.avg_aoi += X * tail_mass + g * occ.mu(X) / ((1.0 - g) * (1.0 - g));
    s.sched_fraction = scheduled + tail_mass;
    s.avg_power = energy + tail_mass * mean_power(model);
    return s;
}

double occupancy_residual(const OccupancyMeasure& occ, const ChannelModel& model) {
    const int X = occ.truncation();
    const int Q = occ.num_states();
    const double g = gamma(model);
    double worst = 0.0;

    double norm = occ.mu(X) / (1.0 - g);
    for (int x = 1; x < X; ++x) norm += occ.mu(x);
    worst = std::max(worst, std::abs(norm - 1.0));

    auto delivered = [&](int x) {
        double s = 0.0;
        for (int q = 1; q <= Q; ++q) s += occ.y(x, q) * (1.0 - model.eps[q - 1]);
        return s;
    };
    double renewal = occ.mu(X);
    for (int x = 1; x < X; ++x) renewal += delivered(x);
    worst = std::max(worst, std::abs(occ.mu(1) - renewal));

    for (int x = 2; x <= X; ++x) {
        worst = std::max(worst, std::abs(occ.mu(x) - (occ.mu(x - 1) - delivered(x - 1))));
    }
    for (int x = 1; x <= X; ++x) worst = std::max(worst, -occ.mu(x));
    for (int x = 1; x < X; ++x) {
        for (int q = 1; q <= Q; ++q) {
            const double y = occ.y(x, q);
            worst = std::max({worst, -y, y - occ.mu(x) * model.eta[q - 1]});
        }
    }
    return worst;
}

ThresholdPolicy recover_policy(const OccupancyMeasure& occ, const ChannelModel& model) {
    const int X = occ.truncation();
    const int Q = occ.num_states();
    ThresholdPolicy policy(X, Q);
    for (int q = 1; q <= Q; ++q) {
        const double eta = model.eta[q - 1];
        double last_massed = 0.0;
        for (int x = 1; x < X; ++x) {
            const double scale = occ.mu(x) * eta;
            if (occ.mu(x) < kMassFloor || eta == 0.0) {
                policy.at(x, q) = last_massed > 0.0 ? 1.0 : 0.0;
                continue;
            }
            const double y = occ.y(x, q);
            double p = y / scale;
            const bool tiny_excess = std::abs(y - std::clamp(y, 0.0, scale)) <= kMassFloor;
            if (p > 1.0 + kClampTol || p < -kClampTol) {
                if (!tiny_excess) {
                    std::ostringstream os;
                    os << "recovered probability " << p << " at x=" << x << ", q=" << q;
                    throw Error(ErrorCode::InconsistentOccupancy, os.str());
                }
            }
            p = std::clamp(p, 0.0, 1.0);
            policy.at(x, q) = p;
            last_massed = p;
        }
    }
    return policy;
}

std::vector<int> policy_thresholds(const ThresholdPolicy& policy, double tol) {
    std::vector<int> t(policy.num_states(), policy.truncation());
    for (int q = 1; q <= policy.num_states(); ++q) {
        for (int x = 1; x < policy.truncation(); ++x) {
            if (policy.at(x, q) > tol) {
                t[q - 1] = x;
                break;
            }
        }
    }
    return t;
}

bool has_threshold_structure(const ThresholdPolicy& policy, double tol) {
    const std::vector<int> t = policy_thresholds(policy, tol);
    for (int q = 1; q <= policy.num_states(); ++q) {
        for (int x = t[q - 1] + 1; x <= policy.truncation(); ++x) {
            if (policy.at(x, q) < 1.0 - tol) return false;
        }
    }
    return true;
}

}  // namespace aoi
