#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pwlstl {

class MilpError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when bound analysis shows an expression can exceed the model's
// big-M, which would make an indicator constraint silently unsound.
class BigMTooSmall : public MilpError {
public:
    using MilpError::MilpError;
};

enum class VarKind { Binary, Continuous };

struct VarRef {
    int id = -1;
    bool valid() const { return id >= 0; }
};

struct VarInfo {
    VarKind kind = VarKind::Continuous;
    std::string name;
    double lo = 0.0;
    double hi = 0.0;
};

// Sparse linear expression: sorted unique variable ids, no zero
// coefficients, plus a constant term.
class LinExpr {
public:
    LinExpr() = default;
    explicit LinExpr(double constant) : constant_(constant) {}
    LinExpr(VarRef v, double coeff = 1.0) { add(v, coeff); }

    void add(VarRef v, double coeff);
    void add_constant(double c) { constant_ += c; }

    const std::vector<std::pair<int, double>>& terms() const { return terms_; }
    double constant() const { return constant_; }
    bool empty() const { return terms_.empty(); }

    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator-=(const LinExpr& o);
    LinExpr& operator*=(double s);

    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a -= b; }
    friend LinExpr operator*(LinExpr a, double s) { return a *= s; }

private:
    std::vector<std::pair<int, double>> terms_;
    double constant_ = 0.0;
};

enum class Sense { Le, Ge, Eq };

struct Constraint {
    LinExpr expr;
    Sense sense = Sense::Le;
    double rhs = 0.0;
    std::string tag;  // which encoding rule emitted it
};

enum class SolveStatus { Optimal, Feasible, Infeasible, TimedOut };

struct MilpSolution {
    SolveStatus status = SolveStatus::Infeasible;
    std::vector<double> values;  // indexed by variable id
    double objective = 0.0;
    long node_count = 0;
    double best_bound = 0.0;
    std::vector<std::string> warnings;
};

// Solver-agnostic model. The objective sense is always maximize. Every
// variable carries finite bounds so indicator constraints can be audited
// against big-M.
class MilpModel {
public:
    MilpModel(double big_m, double m_eps = 1e-6, double eps_t = 1e-3);

    double big_m() const { return big_m_; }
    double m_eps() const { return m_eps_; }
    double eps_t() const { return eps_t_; }

    VarRef add_binary(std::string name);
    VarRef add_continuous(std::string name, double lo, double hi);

    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_binary() const { return num_binary_; }
    int num_continuous() const { return num_vars() - num_binary_; }
    int num_constraints() const { return static_cast<int>(constraints_.size()); }

    const VarInfo& var(int id) const { return vars_[static_cast<std::size_t>(id)]; }
    const std::vector<VarInfo>& vars() const { return vars_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }

    void add_constraint(LinExpr expr, Sense sense, double rhs, std::string tag);
    void fix(VarRef v, double value, const std::string& tag);

    void set_objective(LinExpr objective);
    const LinExpr& objective() const { return objective_; }

    // Interval analysis over variable bounds: largest magnitude the
    // expression can take.
    double bound_abs(const LinExpr& e) const;

    double eval(const LinExpr& e, const std::vector<double>& values) const;

    // Largest constraint violation of an assignment; used to audit every
    // solution before it is reported.
    double max_violation(const std::vector<double>& values) const;

    // --- indicator gadgets -------------------------------------------------

    // b = [mu >= 0]: -M(1-b) <= mu <= M b - m_eps.
    VarRef enc_linear_predicate(const LinExpr& mu, const std::string& tag);

    // b = AND(bs): b <= b_i and b >= sum(b_i) - (m-1).
    VarRef enc_and(std::span<const VarRef> bs, const std::string& tag);

    // b = OR(bs): b >= b_i and b <= sum(b_i).
    VarRef enc_or(std::span<const VarRef> bs, const std::string& tag);

    // theta = min(thetas) via a selector row: theta <= theta_i,
    // theta >= theta_i - (1-s_i)M, sum s_i = 1.
    VarRef enc_min(std::span<const VarRef> thetas, const std::string& tag);

    VarRef enc_max(std::span<const VarRef> thetas, const std::string& tag);

    // y = x * b for continuous x and binary b:
    // -Mb <= y <= Mb and x - M(1-b) <= y <= x + M(1-b).
    VarRef enc_product(const LinExpr& x, VarRef b, const std::string& tag);

    // 1 - b as a registered binary.
    VarRef complement(VarRef b, const std::string& tag);

    // Shrinks a continuous variable's interval; widening is refused. Used to
    // give derived quantities their true range so downstream big-M audits
    // stay sharp.
    void tighten_bounds(VarRef v, double lo, double hi);

private:
    void check_var(VarRef v) const;
    void check_expr(const LinExpr& e) const;

    double big_m_;
    double m_eps_;
    double eps_t_;
    int num_binary_ = 0;
    std::vector<VarInfo> vars_;
    std::vector<Constraint> constraints_;
    LinExpr objective_;
};

}  // namespace pwlstl
