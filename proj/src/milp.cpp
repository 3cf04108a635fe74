#include "pwlstl/milp.hpp"

#include <algorithm>
#include <cmath>

namespace pwlstl {

void LinExpr::add(VarRef v, double coeff) {
    if (!v.valid()) throw MilpError("invalid variable reference");
    if (coeff == 0.0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), v.id,
                               [](const auto& t, int id) { return t.first < id; });
    if (it != terms_.end() && it->first == v.id) {
        it->second += coeff;
        if (it->second == 0.0) terms_.erase(it);
    } else {
        terms_.insert(it, {v.id, coeff});
    }
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    for (const auto& [id, c] : o.terms_) add(VarRef{id}, c);
    constant_ += o.constant_;
    return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) {
    for (const auto& [id, c] : o.terms_) add(VarRef{id}, -c);
    constant_ -= o.constant_;
    return *this;
}

LinExpr& LinExpr::operator*=(double s) {
    if (s == 0.0) {
        terms_.clear();
        constant_ = 0.0;
        return *this;
    }
    for (auto& [id, c] : terms_) c *= s;
    constant_ *= s;
    return *this;
}

MilpModel::MilpModel(double big_m, double m_eps, double eps_t)
    : big_m_(big_m), m_eps_(m_eps), eps_t_(eps_t) {
    if (!(big_m_ > 0.0)) throw MilpError("big-M must be positive");
    if (!(m_eps_ > 0.0)) throw MilpError("m_eps must be positive");
    if (eps_t_ < 0.0) throw MilpError("eps_t must be nonnegative");
}

VarRef MilpModel::add_binary(std::string name) {
    vars_.push_back({VarKind::Binary, std::move(name), 0.0, 1.0});
    ++num_binary_;
    return VarRef{num_vars() - 1};
}

VarRef MilpModel::add_continuous(std::string name, double lo, double hi) {
    if (!(lo <= hi)) throw MilpError("variable bounds must satisfy lo <= hi");
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw MilpError("variable bounds must be finite");
    vars_.push_back({VarKind::Continuous, std::move(name), lo, hi});
    return VarRef{num_vars() - 1};
}

void MilpModel::check_var(VarRef v) const {
    if (!v.valid() || v.id >= num_vars()) throw MilpError("unregistered variable");
}

void MilpModel::check_expr(const LinExpr& e) const {
    for (const auto& [id, c] : e.terms()) {
        check_var(VarRef{id});
        if (!std::isfinite(c)) throw MilpError("coefficient must be finite");
    }
    if (!std::isfinite(e.constant())) throw MilpError("constant must be finite");
}

void MilpModel::add_constraint(LinExpr expr, Sense sense, double rhs, std::string tag) {
    check_expr(expr);
    if (!std::isfinite(rhs)) throw MilpError("rhs must be finite");
    if (tag.empty()) throw MilpError("constraint tag must be nonempty");
    // Normalize the constant into the rhs.
    rhs -= expr.constant();
    expr.add_constant(-expr.constant());
    constraints_.push_back({std::move(expr), sense, rhs, std::move(tag)});
}

void MilpModel::fix(VarRef v, double value, const std::string& tag) {
    add_constraint(LinExpr(v), Sense::Eq, value, tag);
}

void MilpModel::set_objective(LinExpr objective) {
    check_expr(objective);
    objective_ = std::move(objective);
}

double MilpModel::bound_abs(const LinExpr& e) const {
    double lo = e.constant();
    double hi = e.constant();
    for (const auto& [id, c] : e.terms()) {
        const VarInfo& v = vars_[static_cast<std::size_t>(id)];
        double a = c * v.lo;
        double b = c * v.hi;
        lo += std::min(a, b);
        hi += std::max(a, b);
    }
    return std::max(std::abs(lo), std::abs(hi));
}

double MilpModel::eval(const LinExpr& e, const std::vector<double>& values) const {
    double s = e.constant();
    for (const auto& [id, c] : e.terms()) s += c * values[static_cast<std::size_t>(id)];
    return s;
}

double MilpModel::max_violation(const std::vector<double>& values) const {
    double worst = 0.0;
    for (const auto& c : constraints_) {
        double v = eval(c.expr, values);
        double gap = 0.0;
        switch (c.sense) {
            case Sense::Le:
                gap = v - c.rhs;
                break;
            case Sense::Ge:
                gap = c.rhs - v;
                break;
            case Sense::Eq:
                gap = std::abs(v - c.rhs);
                break;
        }
        worst = std::max(worst, gap);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        worst = std::max(worst, vars_[i].lo - values[i]);
        worst = std::max(worst, values[i] - vars_[i].hi);
    }
    return worst;
}

VarRef MilpModel::enc_linear_predicate(const LinExpr& mu, const std::string& tag) {
    check_expr(mu);
    if (bound_abs(mu) > big_m_)
        throw BigMTooSmall("predicate range " + std::to_string(bound_abs(mu)) +
                           " exceeds big-M " + std::to_string(big_m_) + " (" + tag + ")");
    // The indicator rows only need to span this expression's own range.
    const double local_m = std::max(bound_abs(mu) + m_eps_, 2.0 * m_eps_);
    VarRef b = add_binary(tag + "_ind");
    // -M(1-b) <= mu  <=>  mu - M b >= -M
    LinExpr lower = mu;
    lower.add(b, -local_m);
    add_constraint(std::move(lower), Sense::Ge, -local_m, tag);
    // mu <= M b - m_eps
    LinExpr upper = mu;
    upper.add(b, -local_m);
    add_constraint(std::move(upper), Sense::Le, -m_eps_, tag);
    return b;
}

VarRef MilpModel::enc_and(std::span<const VarRef> bs, const std::string& tag) {
    if (bs.empty()) throw MilpError("conjunction needs at least one input");
    VarRef b = add_binary(tag + "_and");
    LinExpr sum(b);
    for (VarRef bi : bs) {
        check_var(bi);
        LinExpr le(b);
        le.add(bi, -1.0);
        add_constraint(std::move(le), Sense::Le, 0.0, tag);
        sum.add(bi, -1.0);
    }
    add_constraint(std::move(sum), Sense::Ge, -(static_cast<double>(bs.size()) - 1.0), tag);
    return b;
}

VarRef MilpModel::enc_or(std::span<const VarRef> bs, const std::string& tag) {
    if (bs.empty()) throw MilpError("disjunction needs at least one input");
    VarRef b = add_binary(tag + "_or");
    LinExpr sum(b);
    for (VarRef bi : bs) {
        check_var(bi);
        LinExpr ge(b);
        ge.add(bi, -1.0);
        add_constraint(std::move(ge), Sense::Ge, 0.0, tag);
        sum.add(bi, -1.0);
    }
    add_constraint(std::move(sum), Sense::Le, 0.0, tag);
    return b;
}

namespace {

void check_theta_bound(const MilpModel& model, std::span<const VarRef> thetas,
                       const std::string& tag) {
    for (VarRef t : thetas) {
        LinExpr e(t);
        if (model.bound_abs(e) > model.big_m())
            throw BigMTooSmall("selector operand exceeds big-M (" + tag + ")");
    }
}

}  // namespace

VarRef MilpModel::enc_min(std::span<const VarRef> thetas, const std::string& tag) {
    if (thetas.empty()) throw MilpError("min needs at least one input");
    check_theta_bound(*this, thetas, tag);
    double lo = big_m_, hi = -big_m_;
    for (VarRef t : thetas) {
        lo = std::min(lo, vars_[static_cast<std::size_t>(t.id)].lo);
        hi = std::max(hi, vars_[static_cast<std::size_t>(t.id)].hi);
    }
    VarRef theta = add_continuous(tag + "_min", lo, hi);
    // Deactivated selector rows need slack covering the inputs' spread.
    const double slack = hi - lo;
    LinExpr selector_sum;
    for (VarRef ti : thetas) {
        check_var(ti);
        LinExpr le(theta);
        le.add(ti, -1.0);
        add_constraint(std::move(le), Sense::Le, 0.0, tag);
        VarRef s = add_binary(tag + "_sel");
        LinExpr ge(theta);
        ge.add(ti, -1.0);
        ge.add(s, -slack);
        add_constraint(std::move(ge), Sense::Ge, -slack, tag);
        selector_sum.add(s, 1.0);
    }
    add_constraint(std::move(selector_sum), Sense::Eq, 1.0, tag);
    return theta;
}

VarRef MilpModel::enc_max(std::span<const VarRef> thetas, const std::string& tag) {
    if (thetas.empty()) throw MilpError("max needs at least one input");
    check_theta_bound(*this, thetas, tag);
    double lo = big_m_, hi = -big_m_;
    for (VarRef t : thetas) {
        lo = std::min(lo, vars_[static_cast<std::size_t>(t.id)].lo);
        hi = std::max(hi, vars_[static_cast<std::size_t>(t.id)].hi);
    }
    VarRef theta = add_continuous(tag + "_max", lo, hi);
    const double slack = hi - lo;
    LinExpr selector_sum;
    for (VarRef ti : thetas) {
        check_var(ti);
        LinExpr ge(theta);
        ge.add(ti, -1.0);
        add_constraint(std::move(ge), Sense::Ge, 0.0, tag);
        VarRef s = add_binary(tag + "_sel");
        LinExpr le(theta);
        le.add(ti, -1.0);
        le.add(s, slack);
        add_constraint(std::move(le), Sense::Le, slack, tag);
        selector_sum.add(s, 1.0);
    }
    add_constraint(std::move(selector_sum), Sense::Eq, 1.0, tag);
    return theta;
}

VarRef MilpModel::enc_product(const LinExpr& x, VarRef b, const std::string& tag) {
    check_expr(x);
    check_var(b);
    if (bound_abs(x) > big_m_)
        throw BigMTooSmall("product operand range " + std::to_string(bound_abs(x)) +
                           " exceeds big-M (" + tag + ")");
    const double local_m = std::max(bound_abs(x), m_eps_);
    VarRef y = add_continuous(tag + "_prod", -local_m, local_m);
    // -Mb <= y <= Mb
    LinExpr lo(y);
    lo.add(b, local_m);
    add_constraint(std::move(lo), Sense::Ge, 0.0, tag);
    LinExpr hi(y);
    hi.add(b, -local_m);
    add_constraint(std::move(hi), Sense::Le, 0.0, tag);
    // x - M(1-b) <= y  <=>  x + M b - y <= M
    LinExpr lower = x;
    lower.add(b, local_m);
    LinExpr neg_y(y, -1.0);
    lower += neg_y;
    add_constraint(std::move(lower), Sense::Le, local_m, tag);
    // y <= x + M(1-b)  <=>  x - M b - y >= -M
    LinExpr upper = x;
    upper.add(b, -local_m);
    upper += neg_y;
    add_constraint(std::move(upper), Sense::Ge, -local_m, tag);
    return y;
}

void MilpModel::tighten_bounds(VarRef v, double lo, double hi) {
    check_var(v);
    VarInfo& info = vars_[static_cast<std::size_t>(v.id)];
    // Intersect with the existing interval.
    info.lo = std::max(info.lo, lo);
    info.hi = std::min(info.hi, hi);
    if (!(info.lo <= info.hi)) throw MilpError("tighten_bounds produced an empty interval");
}

VarRef MilpModel::complement(VarRef b, const std::string& tag) {
    check_var(b);
    VarRef nb = add_binary(tag + "_not");
    LinExpr sum(nb);
    sum.add(b, 1.0);
    add_constraint(std::move(sum), Sense::Eq, 1.0, tag);
    return nb;
}

}  // namespace pwlstl
