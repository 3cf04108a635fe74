#pragma once

#include <vector>

#include "pwlstl/milp.hpp"

namespace pwlstl {

enum class LpStatus { Optimal, Infeasible, NumericalTrouble };

class NumericalInstability : public MilpError {
public:
    using MilpError::MilpError;
};

// LP relaxation of a MilpModel in bounded-variable form: one slack column
// per row, every column with finite bounds. The solver keeps an explicit
// dense basis inverse so branch-and-bound can warm-start each node from the
// previous basis after only bound changes.
//
// Pivoting is deterministic: Dantzig pricing with lowest-index tie breaks,
// switching to Bland's rule after a degenerate stall.
class BoundedSimplex {
public:
    explicit BoundedSimplex(const MilpModel& model);

    int num_rows() const { return m_; }
    int num_structural() const { return n_; }

    // Branch bounds; structural columns only. Values must stay inside the
    // model's original bounds.
    void set_column_bounds(int col, double lo, double hi);
    void reset_column_bounds();

    // Solves from the current basis (phase 1 restores feasibility, phase 2
    // optimizes). The basis persists across calls.
    LpStatus solve();

    double objective() const { return objective_; }
    // Structural variable values of the last optimal solve.
    const std::vector<double>& solution() const { return solution_; }

    long total_pivots() const { return total_pivots_; }

    // Rebuilds the basis inverse from scratch; throws NumericalInstability
    // if the stored basis went singular.
    void refactorize();

    // Resets to the all-slack basis.
    void reset_basis();

private:
    enum Status : signed char { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

    void compute_basic_values();
    void sync_nonbasic_into_bounds();
    double infeasibility() const;
    void price(const std::vector<double>& weight_rows, std::vector<double>& y) const;
    double column_dot(int col, const std::vector<double>& y) const;
    void ftran(int col, std::vector<double>& out) const;
    bool run(bool phase_one);

    int m_ = 0;
    int n_ = 0;
    std::vector<std::vector<std::pair<int, double>>> cols_;  // (row, coef) per column
    std::vector<double> rhs_;
    std::vector<double> lo_, hi_;        // current bounds, all columns
    std::vector<double> model_lo_, model_hi_;
    std::vector<double> obj_;

    std::vector<int> basis_;             // column basic in each row
    std::vector<signed char> status_;
    std::vector<double> binv_;           // dense m x m, row-major
    std::vector<double> xb_;             // basic values
    std::vector<double> xval_;           // all column values

    double objective_ = 0.0;
    std::vector<double> solution_;
    long total_pivots_ = 0;
    long pivots_since_refactor_ = 0;

    static constexpr double kFeasTol = 1e-9;
    static constexpr double kRcTol = 1e-9;
    static constexpr double kPivotTol = 1e-9;
};

}  // namespace pwlstl
