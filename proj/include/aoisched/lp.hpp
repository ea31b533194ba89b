#pragma once

// Dense two-phase primal simplex for small and medium linear programs.
//
//   minimize    c^T v
//   subject to  A_eq v  = b_eq
//               A_ub v <= b_ub
//               lo <= v <= hi      (either side may be infinite)
//
// Variable bounds are handled implicitly (bounded-variable simplex), so only
// the equality and inequality rows enter the tableau.

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace aoi::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Row-major dense matrix with a fixed column count.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    double* row(std::size_t r) noexcept { return data_.data() + r * cols_; }
    const double* row(std::size_t r) const noexcept { return data_.data() + r * cols_; }

    /// Appends a zero row and returns its index.
    std::size_t add_row() {
        data_.resize(data_.size() + cols_, 0.0);
        return rows_++;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct LinearProgram {
    std::vector<double> objective;
    DenseMatrix a_eq;
    std::vector<double> b_eq;
    DenseMatrix a_ub;
    std::vector<double> b_ub;
    std::vector<double> lower;
    std::vector<double> upper;

    /// Zero program over `num_vars` variables with bounds [0, +inf).
    explicit LinearProgram(std::size_t num_vars = 0)
        : objective(num_vars, 0.0),
          a_eq(0, num_vars),
          a_ub(0, num_vars),
          lower(num_vars, 0.0),
          upper(num_vars, kInf) {}

    std::size_t num_vars() const noexcept { return objective.size(); }

    /// Appends an empty row; returns a pointer to its coefficients.
    double* add_eq(double rhs) {
        b_eq.push_back(rhs);
        return a_eq.row(a_eq.add_row());
    }
    double* add_ub(double rhs) {
        b_ub.push_back(rhs);
        return a_ub.row(a_ub.add_row());
    }
};

enum class Status { Optimal, Infeasible, Unbounded, IterationLimit, NumericalBreakdown };

const char* to_string(Status status) noexcept;

enum class PricingRule {
    Bland,          ///< smallest eligible index; never cycles
    DantzigBland,   ///< largest reduced cost, falls back to Bland on degenerate stalls
};

struct SolveOptions {
    double feas_tol = 1e-9;
    double opt_tol = 1e-9;
    double pivot_tol = 1e-11;
    PricingRule pricing = PricingRule::DantzigBland;
    /// Iteration cap is `iteration_factor * (rows + cols)`.
    std::size_t iteration_factor = 50;
    /// Optional sink for a tableau dump when the solve fails.
    std::ostream* debug_dump = nullptr;
    /// Optional objective direction g (one entry per variable). At optimality
    /// the solver reports the interval of t for which the final basis stays
    /// optimal under objective c + t g.
    const std::vector<double>* cost_direction = nullptr;
};

struct LpSolution {
    Status status = Status::NumericalBreakdown;
    std::vector<double> values;   ///< primal point (best feasible on IterationLimit)
    double objective = 0.0;
    /// Row multipliers at termination. For a minimization they certify
    /// optimality: dual_ub <= 0 and the Lagrangian bound equals `objective`.
    std::vector<double> dual_eq;
    std::vector<double> dual_ub;
    double max_violation = 0.0;   ///< worst primal residual against the input rows/bounds
    std::size_t iterations = 0;
    bool feasible_point = false;  ///< `values` satisfies the constraints within feas_tol
    /// Cost ranging along SolveOptions::cost_direction; [0, 0] when not requested.
    double range_lo = 0.0;
    double range_hi = 0.0;

    bool optimal() const noexcept { return status == Status::Optimal; }
};

/// Checks shape and finiteness; throws aoi::Error(InvalidSpec) on a malformed program.
void check_well_formed(const LinearProgram& lp);

LpSolution solve_lp(const LinearProgram& lp, const SolveOptions& options = {});

/// Largest violation of the rows and bounds of `lp` at point `v`.
double max_violation(const LinearProgram& lp, const std::vector<double>& v);

/// Lagrangian lower bound g(y) = b^T y + sum_j min_{lo<=v_j<=hi} (c - A^T y)_j v_j.
/// Valid for any y with dual_ub <= 0; returns -inf when a reduced cost points
/// toward an infinite bound.
double lagrangian_bound(const LinearProgram& lp, const std::vector<double>& dual_eq,
                        const std::vector<double>& dual_ub);

}  // namespace aoi::lp
