#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <sstream>

#include "aoisched/error.hpp"
#include "aoisched/lp.hpp"
#include "aoisched/rng.hpp"

using namespace aoi;
using namespace aoi::lp;

TEST(SolveLp, SingleVariableLowerRow) {
    LinearProgram p(1);
    p.objective = {1.0};
    p.upper = {10.0};
    p.add_ub(-1.0)[0] = -1.0;  // v >= 1
    const LpSolution s = solve_lp(p);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.values[0], 1.0, 1e-12);
    EXPECT_NEAR(s.objective, 1.0, 1e-12);
}

TEST(SolveLp, TwoVariableFace) {
    LinearProgram p(2);
    p.objective = {-1.0, -1.0};
    double* r = p.add_ub(1.0);
    r[0] = 1.0;
    r[1] = 1.0;
    const LpSolution s = solve_lp(p);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.objective, -1.0, 1e-12);
    EXPECT_NEAR(s.values[0] + s.values[1], 1.0, 1e-12);
}

TEST(SolveLp, EmptyFeasibleSet) {
    LinearProgram p(1);
    p.objective = {1.0};
    p.lower = {-kInf};
    p.add_ub(0.0)[0] = 1.0;    // v <= 0
    p.add_ub(-1.0)[0] = -1.0;  // v >= 1
    EXPECT_EQ(solve_lp(p).status, Status::Infeasible);
}

TEST(SolveLp, Unbounded) {
    LinearProgram p(2);
    p.objective = {-1.0, 0.0};
    double* r = p.add_ub(1.0);
    r[0] = 1.0;
    r[1] = -1.0;
    EXPECT_EQ(solve_lp(p).status, Status::Unbounded);
}

TEST(SolveLp, FreeAndUpperBoundedVariables) {
    // min v0 - v1 with v0 free, v1 <= 2 (no lower bound), v0 + v1 = 1, v0 >= -3 via a row.
    LinearProgram p(2);
    p.objective = {1.0, -1.0};
    p.lower = {-kInf, -kInf};
    p.upper = {kInf, 2.0};
    double* e = p.add_eq(1.0);
    e[0] = 1.0;
    e[1] = 1.0;
    p.add_ub(3.0)[0] = -1.0;
    const LpSolution s = solve_lp(p);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.values[0], -1.0, 1e-10);
    EXPECT_NEAR(s.values[1], 2.0, 1e-10);
}

TEST(SolveLp, RejectsMalformed) {
    LinearProgram p(2);
    p.lower = {1.0, 0.0};
    p.upper = {0.0, 1.0};
    EXPECT_THROW(solve_lp(p), Error);
    LinearProgram q(1);
    q.objective = {std::nan("")};
    EXPECT_THROW(solve_lp(q), Error);
}

TEST(SolveLp, DebugDumpOnFailure) {
    LinearProgram p(1);
    p.objective = {1.0};
    p.add_ub(-2.0)[0] = 1.0;  // v <= -2 with v >= 0
    std::ostringstream dump;
    SolveOptions o;
    o.debug_dump = &dump;
    EXPECT_EQ(solve_lp(p, o).status, Status::Infeasible);
    EXPECT_NE(dump.str().find("tableau"), std::string::npos);
}

namespace {

struct RandomLp {
    LinearProgram lp;
    int n;
};

// Bounded random program: box [0, u], a few <= rows and at most one equality.
RandomLp random_lp(std::uint64_t seed) {
    RandomStream rng(seed);
    const int n = 2 + static_cast<int>(rng.below(3));
    LinearProgram p(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        p.objective[j] = rng.uniform() * 4 - 2;
        p.upper[j] = 1 + rng.uniform() * 4;
    }
    const int rows = 1 + static_cast<int>(rng.below(3));
    for (int r = 0; r < rows; ++r) {
        double* a = p.add_ub(1 + rng.uniform() * 3);
        for (int j = 0; j < n; ++j) a[j] = rng.uniform() * 2 - 0.5;
    }
    if (rng.below(2) == 1) {
        double* a = p.add_eq(rng.uniform() * 2);
        for (int j = 0; j < n; ++j) a[j] = rng.uniform();
    }
    return {std::move(p), n};
}

// Exhaustive vertex enumeration: every choice of n tight constraints among
// rows and bounds, solved directly. Returns +inf when nothing is feasible.
double enumerate_vertices(const LinearProgram& p, int n) {
    struct Plane {
        std::vector<double> a;
        double b;
    };
    std::vector<Plane> all;
    std::vector<Plane> eqs;
    for (std::size_t r = 0; r < p.a_eq.rows(); ++r) eqs.push_back({{p.a_eq.row(r), p.a_eq.row(r) + n}, p.b_eq[r]});
    for (std::size_t r = 0; r < p.a_ub.rows(); ++r) all.push_back({{p.a_ub.row(r), p.a_ub.row(r) + n}, p.b_ub[r]});
    for (int j = 0; j < n; ++j) {
        std::vector<double> e(n, 0.0);
        e[j] = 1.0;
        all.push_back({e, p.lower[j]});
        all.push_back({e, p.upper[j]});
    }
    const int free = n - static_cast<int>(eqs.size());
    double best = kInf;
    const int m = static_cast<int>(all.size());
    std::vector<int> pick(free);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == free) {
            Eigen::MatrixXd A(n, n);
            Eigen::VectorXd b(n);
            int row = 0;
            for (const auto& e : eqs) {
                for (int j = 0; j < n; ++j) A(row, j) = e.a[j];
                b(row++) = e.b;
            }
            for (int k : pick) {
                for (int j = 0; j < n; ++j) A(row, j) = all[k].a[j];
                b(row++) = all[k].b;
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
            if (lu.rank() < n) return;
            Eigen::VectorXd v = lu.solve(b);
            std::vector<double> x(v.data(), v.data() + n);
            if (max_violation(p, x) > 1e-9) return;
            double obj = 0.0;
            for (int j = 0; j < n; ++j) obj += p.objective[j] * x[j];
            best = std::min(best, obj);
            return;
        }
        for (int k = start; k < m; ++k) {
            pick[depth] = k;
            rec(k + 1, depth + 1);
        }
    };
    rec(0, 0);
    return best;
}

}  // namespace

TEST(SolveLp, RandomProgramsMatchVertexEnumeration) {
    int optimal = 0;
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        RandomLp r = random_lp(seed);
        const double oracle = enumerate_vertices(r.lp, r.n);
        for (PricingRule rule : {PricingRule::DantzigBland, PricingRule::Bland}) {
            SolveOptions o;
            o.pricing = rule;
            const LpSolution s = solve_lp(r.lp, o);
            if (!std::isfinite(oracle)) {
                EXPECT_EQ(s.status, Status::Infeasible) << "seed " << seed;
                continue;
            }
            ASSERT_TRUE(s.optimal()) << "seed " << seed << " status " << to_string(s.status);
            EXPECT_NEAR(s.objective, oracle, 1e-8) << "seed " << seed;
            EXPECT_LE(s.max_violation, 1e-9);
            ++optimal;
        }
    }
    EXPECT_GT(optimal, 200);
}

TEST(SolveLp, WeakDualityCertificate) {
    for (std::uint64_t seed = 1; seed <= 300; ++seed) {
        RandomLp r = random_lp(seed);
        const LpSolution s = solve_lp(r.lp);
        if (!s.optimal()) continue;
        for (double y : s.dual_ub) EXPECT_LE(y, 0.0);
        const double dual = lagrangian_bound(r.lp, s.dual_eq, s.dual_ub);
        const double scale = 1.0 + std::abs(s.objective);
        EXPECT_LE(dual, s.objective + 1e-9 * scale) << "seed " << seed;
        EXPECT_GE(dual, s.objective - 1e-7 * scale) << "seed " << seed;
    }
}

TEST(SolveLp, CostRangingKeepsSolutionOptimal) {
    int checked = 0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        RandomLp r = random_lp(seed);
        RandomStream rng(seed, StreamId::Generic, 77);
        std::vector<double> g(r.lp.num_vars());
        for (double& v : g) v = rng.uniform() * 2 - 1;
        SolveOptions o;
        o.cost_direction = &g;
        const LpSolution s = solve_lp(r.lp, o);
        if (!s.optimal()) continue;
        EXPECT_LE(s.range_lo, 1e-12);
        EXPECT_GE(s.range_hi, -1e-12);
        for (double t : {s.range_lo, 0.5 * s.range_lo, 0.5 * s.range_hi, s.range_hi}) {
            if (!std::isfinite(t)) continue;
            LinearProgram shifted = r.lp;
            double at_cached = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                shifted.objective[j] += t * g[j];
                at_cached += shifted.objective[j] * s.values[j];
            }
            const LpSolution fresh = solve_lp(shifted);
            ASSERT_TRUE(fresh.optimal());
            EXPECT_NEAR(at_cached, fresh.objective, 1e-8 * (1.0 + std::abs(fresh.objective))) << "seed " << seed;
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(SolveLp, DegenerateProgramTerminates) {
    // Many redundant rows through the optimal vertex.
    LinearProgram p(3);
    p.objective = {-1.0, -1.0, -1.0};
    for (int k = 0; k < 30; ++k) {
        double* r = p.add_ub(1.0);
        r[0] = 1.0;
        r[1] = 1.0 + 0.0 * k;
        r[2] = 1.0;
    }
    for (int k = 0; k < 10; ++k) {
        double* r = p.add_eq(0.0);
        r[0] = 1.0;
        r[1] = -1.0;
    }
    const LpSolution s = solve_lp(p);
    ASSERT_TRUE(s.optimal());
    EXPECT_NEAR(s.objective, -1.0, 1e-12);
}
