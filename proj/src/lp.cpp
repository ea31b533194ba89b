#include "aoisched/lp.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "aoisched/error.hpp"

namespace aoi::lp {

const char* to_string(Status status) noexcept {
    switch (status) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
        case Status::IterationLimit: return "iteration_limit";
        case Status::NumericalBreakdown: return "numerical_breakdown";
    }
    return "unknown";
}

void check_well_formed(const LinearProgram& lp) {
    const std::size_t n = lp.num_vars();
    auto fail = [](const char* what) { throw Error(ErrorCode::InvalidSpec, what); };
    if (lp.lower.size() != n || lp.upper.size() != n) fail("bound vectors must match variable count");
    if (lp.a_eq.cols() != n || lp.a_ub.cols() != n) fail("constraint matrices must have one column per variable");
    if (lp.a_eq.rows() != lp.b_eq.size()) fail("equality rows and rhs differ in length");
    if (lp.a_ub.rows() != lp.b_ub.size()) fail("inequality rows and rhs differ in length");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(lp.objective[j])) fail("objective coefficient not finite");
        if (std::isnan(lp.lower[j]) || std::isnan(lp.upper[j]) || lp.lower[j] > lp.upper[j]) fail("invalid bounds");
        if (lp.lower[j] == kInf || lp.upper[j] == -kInf) fail("bound excludes every finite value");
    }
    auto finite_rows = [&](const DenseMatrix& a, const std::vector<double>& b) {
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (!std::isfinite(b[r])) fail("constraint rhs not finite");
            for (std::size_t j = 0; j < n; ++j) {
                if (!std::isfinite(a(r, j))) fail("constraint coefficient not finite");
            }
        }
    };
    finite_rows(lp.a_eq, lp.b_eq);
    finite_rows(lp.a_ub, lp.b_ub);
}

double max_violation(const LinearProgram& lp, const std::vector<double>& v) {
    double worst = 0.0;
    const std::size_t n = lp.num_vars();
    for (std::size_t r = 0; r < lp.a_eq.rows(); ++r) {
        const double* row = lp.a_eq.row(r);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
        worst = std::max(worst, std::abs(s - lp.b_eq[r]));
    }
    for (std::size_t r = 0; r < lp.a_ub.rows(); ++r) {
        const double* row = lp.a_ub.row(r);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * v[j];
        worst = std::max(worst, s - lp.b_ub[r]);
    }
    for (std::size_t j = 0; j < n; ++j) {
        worst = std::max({worst, lp.lower[j] - v[j], v[j] - lp.upper[j]});
    }
    return worst;
}

double lagrangian_bound(const LinearProgram& lp, const std::vector<double>& dual_eq,
                        const std::vector<double>& dual_ub) {
    const std::size_t n = lp.num_vars();
    std::vector<double> reduced(lp.objective);
    double bound = 0.0;
    for (std::size_t r = 0; r < lp.a_eq.rows(); ++r) {
        bound += lp.b_eq[r] * dual_eq[r];
        const double* row = lp.a_eq.row(r);
        for (std::size_t j = 0; j < n; ++j) reduced[j] -= row[j] * dual_eq[r];
    }
    for (std::size_t r = 0; r < lp.a_ub.rows(); ++r) {
        bound += lp.b_ub[r] * dual_ub[r];
        const double* row = lp.a_ub.row(r);
        for (std::size_t j = 0; j < n; ++j) reduced[j] -= row[j] * dual_ub[r];
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double d = reduced[j];
        if (d > 0.0) {
            if (lp.lower[j] == -kInf) return -kInf;
            bound += d * lp.lower[j];
        } else if (d < 0.0) {
            if (lp.upper[j] == kInf) return -kInf;
            bound += d * lp.upper[j];
        }
    }
    return bound;
}

namespace {

enum class ColState : unsigned char { Basic, AtLower, AtUpper };

// Original variable j equals offset + sign * col[primary] (- col[secondary] when split).
struct VarMap {
    double offset = 0.0;
    double sign = 1.0;
    std::size_t primary = 0;
    std::size_t secondary = static_cast<std::size_t>(-1);
};

constexpr std::size_t kNone = static_cast<std::size_t>(-1);
constexpr double kDropTol = 1e-14;

class Tableau {
public:
    Tableau(const LinearProgram& lp, const SolveOptions& opt) : lp_(lp), opt_(opt) { build(); }

    LpSolution run();

private:
    void build();
    void price_from_scratch(const std::vector<double>& cost);
    // Returns false on iteration limit.
    enum class PhaseResult { Optimal, Unbounded, IterationLimit };
    PhaseResult iterate(const std::vector<double>& cost);
    void pivot(std::size_t r, std::size_t j);
    void refresh_basic_values();
    void cost_range(const std::vector<double>& direction, double& lo, double& hi) const;
    std::vector<double> original_point() const;
    void dump(std::ostream& os) const;

    const LinearProgram& lp_;
    const SolveOptions& opt_;

    std::size_t m_ = 0;         // rows
    std::size_t ncols_ = 0;     // structural + slack + artificial
    std::size_t first_slack_ = 0;
    std::size_t first_art_ = 0;
    std::vector<double> tab_;   // m_ x ncols_
    std::vector<double> rhs_;   // transformed rhs (constant)
    std::vector<double> beta_;  // basic values
    std::vector<double> upper_;
    std::vector<ColState> state_;
    std::vector<std::size_t> head_;
    std::vector<double> reduced_;
    std::vector<VarMap> map_;
    std::vector<char> row_negated_;
    std::vector<std::size_t> identity_col_;  // column that formed the initial basis in each row
    std::vector<double> identity_sign_;
    std::vector<std::size_t> slack_of_row_;  // kNone for equality rows
    std::vector<std::size_t> art_of_row_;
    // Original columns for the final residual / basic value refresh.
    std::vector<double> orig_;  // m_ x ncols_
    std::vector<std::size_t> nz_;
    std::size_t iterations_ = 0;
    std::size_t iteration_cap_ = 0;

    double* row(std::size_t r) { return tab_.data() + r * ncols_; }
    const double* row(std::size_t r) const { return tab_.data() + r * ncols_; }
};

void Tableau::build() {
    const std::size_t n = lp_.num_vars();
    const std::size_t m_eq = lp_.a_eq.rows();
    const std::size_t m_ub = lp_.a_ub.rows();
    m_ = m_eq + m_ub;

    map_.resize(n);
    std::size_t structural = 0;
    std::vector<double> col_upper;
    for (std::size_t j = 0; j < n; ++j) {
        const double lo = lp_.lower[j];
        const double hi = lp_.upper[j];
        VarMap vm;
        vm.primary = structural++;
        if (std::isfinite(lo)) {
            vm.offset = lo;
            vm.sign = 1.0;
            col_upper.push_back(std::isfinite(hi) ? hi - lo : kInf);
        } else if (std::isfinite(hi)) {
            vm.offset = hi;
            vm.sign = -1.0;
            col_upper.push_back(kInf);
        } else {
            vm.secondary = structural++;
            col_upper.push_back(kInf);
            col_upper.push_back(kInf);
        }
        map_[j] = vm;
    }

    // Transformed rhs and row sign so that every rhs is non-negative.
    std::vector<double> b(m_);
    for (std::size_t r = 0; r < m_; ++r) {
        const bool eq = r < m_eq;
        const double* a = eq ? lp_.a_eq.row(r) : lp_.a_ub.row(r - m_eq);
        double v = eq ? lp_.b_eq[r] : lp_.b_ub[r - m_eq];
        for (std::size_t j = 0; j < n; ++j) v -= a[j] * map_[j].offset;
        b[r] = v;
    }
    row_negated_.assign(m_, 0);
    std::size_t arts = 0;
    for (std::size_t r = 0; r < m_; ++r) {
        if (b[r] < 0.0) row_negated_[r] = 1;
        const bool eq = r < m_eq;
        if (eq || row_negated_[r]) ++arts;
    }

    first_slack_ = structural;
    first_art_ = structural + m_ub;
    ncols_ = first_art_ + arts;
    tab_.assign(m_ * ncols_, 0.0);
    upper_.assign(ncols_, kInf);
    for (std::size_t c = 0; c < structural; ++c) upper_[c] = col_upper[c];
    state_.assign(ncols_, ColState::AtLower);
    head_.assign(m_, kNone);
    beta_.assign(m_, 0.0);
    rhs_.assign(m_, 0.0);
    identity_col_.assign(m_, kNone);
    identity_sign_.assign(m_, 1.0);
    slack_of_row_.assign(m_, kNone);
    art_of_row_.assign(m_, kNone);

    std::size_t next_art = first_art_;
    for (std::size_t r = 0; r < m_; ++r) {
        const bool eq = r < m_eq;
        const double* a = eq ? lp_.a_eq.row(r) : lp_.a_ub.row(r - m_eq);
        const double s = row_negated_[r] ? -1.0 : 1.0;
        double* t = row(r);
        for (std::size_t j = 0; j < n; ++j) {
            if (a[j] == 0.0) continue;
            const VarMap& vm = map_[j];
            t[vm.primary] = s * vm.sign * a[j];
            if (vm.secondary != kNone) t[vm.secondary] = -s * a[j];
        }
        rhs_[r] = s * b[r];
        if (!eq) {
            const std::size_t slack = first_slack_ + (r - m_eq);
            t[slack] = s;
            slack_of_row_[r] = slack;
        }
        if (eq || row_negated_[r]) {
            const std::size_t art = next_art++;
            t[art] = 1.0;
            art_of_row_[r] = art;
            head_[r] = art;
        } else {
            head_[r] = slack_of_row_[r];
        }
        identity_col_[r] = head_[r];
        identity_sign_[r] = 1.0;
        state_[head_[r]] = ColState::Basic;
        beta_[r] = rhs_[r];
    }
    orig_ = tab_;
    iteration_cap_ = opt_.iteration_factor * (m_ + ncols_);
}

void Tableau::price_from_scratch(const std::vector<double>& cost) {
    reduced_ = cost;
    for (std::size_t r = 0; r < m_; ++r) {
        const double cb = cost[head_[r]];
        if (cb == 0.0) continue;
        const double* t = row(r);
        for (std::size_t c = 0; c < ncols_; ++c) reduced_[c] -= cb * t[c];
    }
    for (std::size_t r = 0; r < m_; ++r) reduced_[head_[r]] = 0.0;
}

void Tableau::pivot(std::size_t r, std::size_t j) {
    double* pr = row(r);
    const double inv = 1.0 / pr[j];
    std::size_t lo = ncols_;
    std::size_t hi = 0;
    nz_.clear();
    for (std::size_t c = 0; c < ncols_; ++c) {
        if (pr[c] != 0.0) {
            double v = pr[c] * inv;
            if (std::abs(v) < kDropTol) v = 0.0;
            pr[c] = v;
            if (v != 0.0) {
                nz_.push_back(c);
                lo = std::min(lo, c);
                hi = c + 1;
            }
        }
    }
    pr[j] = 1.0;
    // Contiguous updates vectorize; switch to them once the pivot row is dense enough.
    const bool dense = !nz_.empty() && nz_.size() * 4 > (hi - lo);
    for (std::size_t i = 0; i < m_; ++i) {
        if (i == r) continue;
        double* ri = row(i);
        const double f = ri[j];
        if (f == 0.0) continue;
        if (dense) {
            for (std::size_t c = lo; c < hi; ++c) {
                const double v = ri[c] - f * pr[c];
                ri[c] = std::abs(v) < kDropTol ? 0.0 : v;
            }
        } else {
            for (std::size_t c : nz_) {
                const double v = ri[c] - f * pr[c];
                ri[c] = std::abs(v) < kDropTol ? 0.0 : v;
            }
        }
        ri[j] = 0.0;
    }
    const double dj = reduced_[j];
    if (dj != 0.0) {
        for (std::size_t c : nz_) reduced_[c] -= dj * pr[c];
        reduced_[j] = 0.0;
    }
}

Tableau::PhaseResult Tableau::iterate(const std::vector<double>& cost) {
    price_from_scratch(cost);
    std::size_t degenerate_run = 0;
    bool bland = opt_.pricing == PricingRule::Bland;
    constexpr std::size_t kStallLimit = 30;

    while (true) {
        if (iterations_ >= iteration_cap_) return PhaseResult::IterationLimit;

        // Pricing.
        std::size_t enter = kNone;
        double best = 0.0;
        for (std::size_t c = 0; c < ncols_; ++c) {
            const ColState st = state_[c];
            if (st == ColState::Basic) continue;
            const double d = reduced_[c];
            double gain = 0.0;
            if (st == ColState::AtLower) {
                if (d < -opt_.opt_tol && upper_[c] > 0.0) gain = -d;
            } else if (d > opt_.opt_tol) {
                gain = d;
            }
            if (gain == 0.0) continue;
            if (bland) {
                enter = c;
                break;
            }
            if (gain > best) {
                best = gain;
                enter = c;
            }
        }
        if (enter == kNone) return PhaseResult::Optimal;

        const double sigma = state_[enter] == ColState::AtLower ? 1.0 : -1.0;

        // Ratio test. Harris two-pass outside Bland mode for stability.
        std::size_t leave = kNone;
        double theta = kInf;
        if (bland) {
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = sigma * row(r)[enter];
                double lim;
                if (a > opt_.pivot_tol) {
                    lim = std::max(beta_[r], 0.0) / a;
                } else if (a < -opt_.pivot_tol && std::isfinite(upper_[head_[r]])) {
                    lim = std::max(upper_[head_[r]] - beta_[r], 0.0) / -a;
                } else {
                    continue;
                }
                if (leave == kNone || lim < theta - 1e-12) {
                    theta = lim;
                    leave = r;
                } else if (lim <= theta + 1e-12 && head_[r] < head_[leave]) {
                    theta = std::min(theta, lim);
                    leave = r;
                }
            }
        } else {
            double relaxed = kInf;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = sigma * row(r)[enter];
                if (a > opt_.pivot_tol) {
                    relaxed = std::min(relaxed, (std::max(beta_[r], 0.0) + opt_.feas_tol) / a);
                } else if (a < -opt_.pivot_tol && std::isfinite(upper_[head_[r]])) {
                    relaxed = std::min(relaxed, (std::max(upper_[head_[r]] - beta_[r], 0.0) + opt_.feas_tol) / -a);
                }
            }
            double best_a = 0.0;
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = sigma * row(r)[enter];
                double lim;
                if (a > opt_.pivot_tol) {
                    lim = std::max(beta_[r], 0.0) / a;
                } else if (a < -opt_.pivot_tol && std::isfinite(upper_[head_[r]])) {
                    lim = std::max(upper_[head_[r]] - beta_[r], 0.0) / -a;
                } else {
                    continue;
                }
                if (lim <= relaxed && std::abs(a) > best_a) {
                    best_a = std::abs(a);
                    leave = r;
                    theta = lim;
                }
            }
        }

        const bool flip = upper_[enter] <= theta;
        if (leave == kNone && !std::isfinite(upper_[enter])) return PhaseResult::Unbounded;
        if (flip) theta = upper_[enter];

        ++iterations_;
        if (theta > opt_.feas_tol) {
            degenerate_run = 0;
            if (opt_.pricing == PricingRule::DantzigBland) bland = false;
        } else if (++degenerate_run > kStallLimit) {
            bland = true;
        }

        if (theta != 0.0) {
            for (std::size_t r = 0; r < m_; ++r) {
                const double a = row(r)[enter];
                if (a != 0.0) beta_[r] -= sigma * theta * a;
            }
        }
        if (flip) {
            state_[enter] = state_[enter] == ColState::AtLower ? ColState::AtUpper : ColState::AtLower;
            continue;
        }
        const double enter_value = sigma > 0 ? theta : upper_[enter] - theta;
        const std::size_t out = head_[leave];
        const double a_leave = sigma * row(leave)[enter];
        state_[out] = a_leave > 0.0 ? ColState::AtLower : ColState::AtUpper;
        head_[leave] = enter;
        state_[enter] = ColState::Basic;
        beta_[leave] = enter_value;
        pivot(leave, enter);
    }
}

// Recomputes basic values as B^{-1}(b - N x_N) from the columns that formed
// the initial identity basis.
void Tableau::refresh_basic_values() {
    std::vector<double> resid(rhs_);
    for (std::size_t c = 0; c < ncols_; ++c) {
        if (state_[c] != ColState::AtUpper) continue;
        const double u = upper_[c];
        if (u == 0.0) continue;
        for (std::size_t r = 0; r < m_; ++r) {
            const double a = orig_[r * ncols_ + c];
            if (a != 0.0) resid[r] -= a * u;
        }
    }
    for (std::size_t i = 0; i < m_; ++i) {
        const double* t = row(i);
        double v = 0.0;
        for (std::size_t r = 0; r < m_; ++r) {
            const double binv = t[identity_col_[r]] * identity_sign_[r];
            if (binv != 0.0) v += binv * resid[r];
        }
        beta_[i] = v;
    }
}

std::vector<double> Tableau::original_point() const {
    std::vector<double> colval(ncols_, 0.0);
    for (std::size_t c = 0; c < ncols_; ++c) {
        if (state_[c] == ColState::AtUpper) colval[c] = upper_[c];
    }
    for (std::size_t r = 0; r < m_; ++r) colval[head_[r]] = beta_[r];
    std::vector<double> v(lp_.num_vars());
    for (std::size_t j = 0; j < v.size(); ++j) {
        const VarMap& vm = map_[j];
        double x = vm.offset + vm.sign * colval[vm.primary];
        if (vm.secondary != kNone) x -= colval[vm.secondary];
        // Snap onto bounds that rounding overshot.
        x = std::clamp(x, lp_.lower[j], lp_.upper[j]);
        v[j] = x;
    }
    return v;
}

// Reduced costs move as r + t g_r along a cost direction; the basis stays
// optimal while every nonbasic column keeps the sign its bound state needs.
void Tableau::cost_range(const std::vector<double>& direction, double& lo, double& hi) const {
    std::vector<double> g(ncols_, 0.0);
    for (std::size_t j = 0; j < lp_.num_vars(); ++j) {
        const VarMap& vm = map_[j];
        g[vm.primary] += vm.sign * direction[j];
        if (vm.secondary != kNone) g[vm.secondary] -= direction[j];
    }
    std::vector<double> gr(g);
    for (std::size_t r = 0; r < m_; ++r) {
        const double gb = g[head_[r]];
        if (gb == 0.0) continue;
        const double* t = row(r);
        for (std::size_t c = 0; c < ncols_; ++c) gr[c] -= gb * t[c];
    }
    lo = -kInf;
    hi = kInf;
    for (std::size_t c = 0; c < ncols_; ++c) {
        if (state_[c] == ColState::Basic || upper_[c] == 0.0) continue;
        const double slope = gr[c];
        if (std::abs(slope) < kDropTol) continue;
        // Orient so that the column needs reduced cost >= 0.
        const double d = state_[c] == ColState::AtLower ? std::max(reduced_[c], 0.0) : std::max(-reduced_[c], 0.0);
        const double s = state_[c] == ColState::AtLower ? slope : -slope;
        if (s < 0.0) {
            hi = std::min(hi, d / -s);
        } else {
            lo = std::max(lo, -d / s);
        }
    }
}

void Tableau::dump(std::ostream& os) const {
    os << "tableau " << m_ << " x " << ncols_ << " after " << iterations_ << " iterations\n";
    for (std::size_t r = 0; r < m_; ++r) {
        os << "row " << r << " basic=" << head_[r] << " value=" << beta_[r] << " :";
        const double* t = row(r);
        for (std::size_t c = 0; c < ncols_; ++c) {
            if (t[c] != 0.0) os << ' ' << c << ':' << t[c];
        }
        os << '\n';
    }
    os << "reduced:";
    for (std::size_t c = 0; c < reduced_.size(); ++c) {
        if (reduced_[c] != 0.0) os << ' ' << c << ':' << reduced_[c];
    }
    os << '\n';
}

LpSolution Tableau::run() {
    LpSolution sol;
    const std::size_t m_eq = lp_.a_eq.rows();
    auto finish = [&](Status status, bool feasible) {
        sol.status = status;
        sol.iterations = iterations_;
        sol.values = original_point();
        sol.max_violation = max_violation(lp_, sol.values);
        sol.feasible_point = feasible && sol.max_violation <= opt_.feas_tol * 10.0;
        sol.objective = 0.0;
        for (std::size_t j = 0; j < sol.values.size(); ++j) sol.objective += lp_.objective[j] * sol.values[j];
        if (status != Status::Optimal && opt_.debug_dump != nullptr) dump(*opt_.debug_dump);
        return sol;
    };

    // Phase 1: drive artificials to zero.
    if (first_art_ < ncols_) {
        std::vector<double> cost1(ncols_, 0.0);
        for (std::size_t c = first_art_; c < ncols_; ++c) cost1[c] = 1.0;
        const PhaseResult p1 = iterate(cost1);
        if (p1 == PhaseResult::IterationLimit) return finish(Status::IterationLimit, false);
        if (p1 == PhaseResult::Unbounded) return finish(Status::NumericalBreakdown, false);
        refresh_basic_values();
        double infeas = 0.0;
        double scale = 1.0;
        for (std::size_t r = 0; r < m_; ++r) {
            scale = std::max(scale, std::abs(rhs_[r]));
            if (head_[r] >= first_art_) infeas += std::abs(beta_[r]);
        }
        for (std::size_t c = first_art_; c < ncols_; ++c) {
            if (state_[c] == ColState::AtUpper) infeas += upper_[c];
        }
        if (infeas > opt_.feas_tol * scale) return finish(Status::Infeasible, false);
        for (std::size_t c = first_art_; c < ncols_; ++c) {
            upper_[c] = 0.0;
            if (state_[c] != ColState::Basic) state_[c] = ColState::AtLower;
        }
    }

    // Phase 2 on the original objective.
    std::vector<double> cost2(ncols_, 0.0);
    for (std::size_t j = 0; j < lp_.num_vars(); ++j) {
        const VarMap& vm = map_[j];
        cost2[vm.primary] += vm.sign * lp_.objective[j];
        if (vm.secondary != kNone) cost2[vm.secondary] -= lp_.objective[j];
    }
    const PhaseResult p2 = iterate(cost2);
    refresh_basic_values();
    if (p2 == PhaseResult::IterationLimit) return finish(Status::IterationLimit, true);
    if (p2 == PhaseResult::Unbounded) return finish(Status::Unbounded, true);

    // Row multipliers from the reduced costs of the initial basis columns.
    sol.dual_eq.assign(m_eq, 0.0);
    sol.dual_ub.assign(lp_.a_ub.rows(), 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
        const std::size_t c = slack_of_row_[r] != kNone ? slack_of_row_[r] : art_of_row_[r];
        const double coef = orig_[r * ncols_ + c];
        const double y_transformed = (cost2[c] - reduced_[c]) / coef;
        const double y = row_negated_[r] ? -y_transformed : y_transformed;
        if (r < m_eq) {
            sol.dual_eq[r] = y;
        } else {
            sol.dual_ub[r - m_eq] = std::min(y, 0.0);
        }
    }

    if (opt_.cost_direction != nullptr) {
        if (opt_.cost_direction->size() != lp_.num_vars()) {
            throw Error(ErrorCode::InvalidSpec, "cost direction must have one entry per variable");
        }
        cost_range(*opt_.cost_direction, sol.range_lo, sol.range_hi);
    }

    LpSolution out = finish(Status::Optimal, true);
    const double tol = opt_.feas_tol * 10.0 * (1.0 + [&] {
        double s = 0.0;
        for (double v : rhs_) s = std::max(s, std::abs(v));
        return s;
    }());
    if (!std::isfinite(out.objective) || out.max_violation > tol) {
        out.status = Status::NumericalBreakdown;
        if (opt_.debug_dump != nullptr) dump(*opt_.debug_dump);
    }
    return out;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& options) {
    check_well_formed(lp);
    Tableau tableau(lp, options);
    return tableau.run();
}

}  // namespace aoi::lp
