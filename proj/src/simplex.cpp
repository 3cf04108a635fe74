#include "pwlstl/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pwlstl {

BoundedSimplex::BoundedSimplex(const MilpModel& model) {
    m_ = model.num_constraints();
    n_ = model.num_vars();
    const int total = n_ + m_;
    cols_.resize(static_cast<std::size_t>(total));
    rhs_.resize(static_cast<std::size_t>(m_));
    lo_.resize(static_cast<std::size_t>(total));
    hi_.resize(static_cast<std::size_t>(total));
    obj_.assign(static_cast<std::size_t>(total), 0.0);

    for (int j = 0; j < n_; ++j) {
        lo_[static_cast<std::size_t>(j)] = model.var(j).lo;
        hi_[static_cast<std::size_t>(j)] = model.var(j).hi;
    }
    for (const auto& [id, c] : model.objective().terms()) obj_[static_cast<std::size_t>(id)] = c;

    for (int r = 0; r < m_; ++r) {
        const Constraint& row = model.constraints()[static_cast<std::size_t>(r)];
        double row_lo = 0.0, row_hi = 0.0;
        for (const auto& [id, c] : row.expr.terms()) {
            cols_[static_cast<std::size_t>(id)].push_back({r, c});
            double a = c * model.var(id).lo;
            double b = c * model.var(id).hi;
            row_lo += std::min(a, b);
            row_hi += std::max(a, b);
        }
        rhs_[static_cast<std::size_t>(r)] = row.rhs;
        const int slack = n_ + r;
        cols_[static_cast<std::size_t>(slack)].push_back({r, 1.0});
        // Slack interval from the row's reachable range; clamped so an
        // unsatisfiable row surfaces as phase-1 infeasibility.
        switch (row.sense) {
            case Sense::Le:
                lo_[static_cast<std::size_t>(slack)] = 0.0;
                hi_[static_cast<std::size_t>(slack)] = std::max(0.0, row.rhs - row_lo);
                break;
            case Sense::Ge:
                lo_[static_cast<std::size_t>(slack)] = std::min(0.0, row.rhs - row_hi);
                hi_[static_cast<std::size_t>(slack)] = 0.0;
                break;
            case Sense::Eq:
                lo_[static_cast<std::size_t>(slack)] = 0.0;
                hi_[static_cast<std::size_t>(slack)] = 0.0;
                break;
        }
    }
    model_lo_ = lo_;
    model_hi_ = hi_;
    reset_basis();
}

void BoundedSimplex::set_column_bounds(int col, double lo, double hi) {
    lo_[static_cast<std::size_t>(col)] = lo;
    hi_[static_cast<std::size_t>(col)] = hi;
}

void BoundedSimplex::reset_column_bounds() {
    lo_ = model_lo_;
    hi_ = model_hi_;
}

void BoundedSimplex::reset_basis() {
    const int total = n_ + m_;
    basis_.resize(static_cast<std::size_t>(m_));
    status_.assign(static_cast<std::size_t>(total), kAtLower);
    binv_.assign(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int r = 0; r < m_; ++r) {
        basis_[static_cast<std::size_t>(r)] = n_ + r;
        status_[static_cast<std::size_t>(n_ + r)] = kBasic;
        binv_[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) +
              static_cast<std::size_t>(r)] = 1.0;
    }
    xval_.assign(static_cast<std::size_t>(total), 0.0);
    pivots_since_refactor_ = 0;
}

void BoundedSimplex::sync_nonbasic_into_bounds() {
    const int total = n_ + m_;
    for (int j = 0; j < total; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        if (status_[sj] == kBasic) continue;
        // A bound change can strand a nonbasic column outside its interval
        // or flip which bound it sat on.
        if (status_[sj] == kAtUpper)
            xval_[sj] = hi_[sj];
        else
            xval_[sj] = lo_[sj];
        if (xval_[sj] < lo_[sj]) {
            xval_[sj] = lo_[sj];
            status_[sj] = kAtLower;
        }
        if (xval_[sj] > hi_[sj]) {
            xval_[sj] = hi_[sj];
            status_[sj] = kAtUpper;
        }
    }
}

void BoundedSimplex::compute_basic_values() {
    std::vector<double> r = rhs_;
    const int total = n_ + m_;
    for (int j = 0; j < total; ++j) {
        const std::size_t sj = static_cast<std::size_t>(j);
        if (status_[sj] == kBasic || xval_[sj] == 0.0) continue;
        for (const auto& [row, coef] : cols_[sj]) r[static_cast<std::size_t>(row)] -= coef * xval_[sj];
    }
    xb_.assign(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
        const double* binv_row = &binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
        double s = 0.0;
        for (int k = 0; k < m_; ++k) s += binv_row[k] * r[static_cast<std::size_t>(k)];
        xb_[static_cast<std::size_t>(i)] = s;
    }
    for (int i = 0; i < m_; ++i)
        xval_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] =
            xb_[static_cast<std::size_t>(i)];
}

double BoundedSimplex::infeasibility() const {
    double total = 0.0;
    for (int i = 0; i < m_; ++i) {
        const int col = basis_[static_cast<std::size_t>(i)];
        const double v = xb_[static_cast<std::size_t>(i)];
        total += std::max(0.0, lo_[static_cast<std::size_t>(col)] - v);
        total += std::max(0.0, v - hi_[static_cast<std::size_t>(col)]);
    }
    return total;
}

void BoundedSimplex::price(const std::vector<double>& weight_rows, std::vector<double>& y) const {
    y.assign(static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i) {
        const double w = weight_rows[static_cast<std::size_t>(i)];
        if (w == 0.0) continue;
        const double* binv_row = &binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
        for (int k = 0; k < m_; ++k) y[static_cast<std::size_t>(k)] += w * binv_row[k];
    }
}

double BoundedSimplex::column_dot(int col, const std::vector<double>& y) const {
    double s = 0.0;
    for (const auto& [row, coef] : cols_[static_cast<std::size_t>(col)])
        s += coef * y[static_cast<std::size_t>(row)];
    return s;
}

void BoundedSimplex::ftran(int col, std::vector<double>& out) const {
    out.assign(static_cast<std::size_t>(m_), 0.0);
    for (const auto& [row, coef] : cols_[static_cast<std::size_t>(col)]) {
        const std::size_t k = static_cast<std::size_t>(row);
        for (int i = 0; i < m_; ++i)
            out[static_cast<std::size_t>(i)] +=
                coef * binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) + k];
    }
}

void BoundedSimplex::refactorize() {
    // Dense Gauss-Jordan on the basis matrix.
    std::vector<double> work(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int c = 0; c < m_; ++c)
        for (const auto& [row, coef] : cols_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(c)])])
            work[static_cast<std::size_t>(row) * static_cast<std::size_t>(m_) +
                 static_cast<std::size_t>(c)] = coef;

    std::vector<double> inv(static_cast<std::size_t>(m_) * static_cast<std::size_t>(m_), 0.0);
    for (int i = 0; i < m_; ++i)
        inv[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_) + static_cast<std::size_t>(i)] =
            1.0;

    const auto at = [&](std::vector<double>& mat, int r, int c) -> double& {
        return mat[static_cast<std::size_t>(r) * static_cast<std::size_t>(m_) +
                   static_cast<std::size_t>(c)];
    };
    for (int col = 0; col < m_; ++col) {
        int pivot_row = -1;
        double best = 0.0;
        for (int r = col; r < m_; ++r) {
            double v = std::abs(at(work, r, col));
            if (v > best) {
                best = v;
                pivot_row = r;
            }
        }
        if (pivot_row < 0 || best < 1e-12)
            throw NumericalInstability("basis matrix is singular");
        if (pivot_row != col) {
            // Row swaps left-multiply both sides, so the final inverse still
            // matches the basis order; basis_ stays as it is.
            for (int c = 0; c < m_; ++c) {
                std::swap(at(work, pivot_row, c), at(work, col, c));
                std::swap(at(inv, pivot_row, c), at(inv, col, c));
            }
        }
        const double piv = at(work, col, col);
        for (int c = 0; c < m_; ++c) {
            at(work, col, c) /= piv;
            at(inv, col, c) /= piv;
        }
        for (int r = 0; r < m_; ++r) {
            if (r == col) continue;
            const double f = at(work, r, col);
            if (f == 0.0) continue;
            for (int c = 0; c < m_; ++c) {
                at(work, r, c) -= f * at(work, col, c);
                at(inv, r, c) -= f * at(inv, col, c);
            }
        }
    }
    binv_ = std::move(inv);
    pivots_since_refactor_ = 0;
}

bool BoundedSimplex::run(bool phase_one) {
    const int total = n_ + m_;
    std::vector<double> y;
    std::vector<double> direction;
    std::vector<double> weights(static_cast<std::size_t>(m_));
    long degenerate_streak = 0;
    bool bland = false;

    for (;;) {
        // Weight vector: phase 1 prices infeasibility signs, phase 2 the
        // objective coefficients of the basic columns.
        double infeas = 0.0;
        for (int i = 0; i < m_; ++i) {
            const int col = basis_[static_cast<std::size_t>(i)];
            const std::size_t sc = static_cast<std::size_t>(col);
            const double v = xb_[static_cast<std::size_t>(i)];
            double w = 0.0;
            if (phase_one) {
                if (v < lo_[sc] - kFeasTol) {
                    w = -1.0;
                    infeas += lo_[sc] - v;
                } else if (v > hi_[sc] + kFeasTol) {
                    w = 1.0;
                    infeas += v - hi_[sc];
                }
            } else {
                w = obj_[sc];
            }
            weights[static_cast<std::size_t>(i)] = w;
        }
        if (phase_one && infeas <= kFeasTol) return true;

        price(weights, y);

        // Entering column: maximize the improvement rate, lowest index on
        // ties; plain Bland after a degenerate stall.
        int entering = -1;
        double entering_score = 0.0;
        int entering_dir = 0;
        for (int j = 0; j < total; ++j) {
            const std::size_t sj = static_cast<std::size_t>(j);
            if (status_[sj] == kBasic) continue;
            if (hi_[sj] - lo_[sj] <= kFeasTol) continue;  // fixed column
            double rc = phase_one ? column_dot(j, y) : obj_[sj] - column_dot(j, y);
            double score = 0.0;
            int dir = 0;
            if (status_[sj] == kAtLower && rc > kRcTol) {
                score = rc;
                dir = 1;
            } else if (status_[sj] == kAtUpper && rc < -kRcTol) {
                score = -rc;
                dir = -1;
            } else {
                continue;
            }
            if (bland) {
                entering = j;
                entering_dir = dir;
                break;
            }
            if (score > entering_score + 1e-15) {
                entering_score = score;
                entering = j;
                entering_dir = dir;
            }
        }
        if (entering < 0) {
            if (phase_one) return infeas <= kFeasTol;
            return true;  // optimal
        }

        ftran(entering, direction);

        // Ratio test. The entering column moves by t >= 0 in direction
        // sigma; basic column i changes at rate -sigma * direction[i].
        const double sigma = static_cast<double>(entering_dir);
        double t_limit = hi_[static_cast<std::size_t>(entering)] -
                         lo_[static_cast<std::size_t>(entering)];
        int leaving_row = -1;
        signed char leaving_status = kAtLower;
        for (int i = 0; i < m_; ++i) {
            const double rate = sigma * direction[static_cast<std::size_t>(i)];
            if (std::abs(rate) <= kPivotTol) continue;
            const int col = basis_[static_cast<std::size_t>(i)];
            const std::size_t sc = static_cast<std::size_t>(col);
            const double v = xb_[static_cast<std::size_t>(i)];
            double t = std::numeric_limits<double>::infinity();
            signed char hit = kAtLower;
            if (phase_one && v < lo_[sc] - kFeasTol) {
                // Below its interval: only reaching the lower bound blocks.
                if (rate < 0.0) {
                    t = (lo_[sc] - v) / (-rate);
                    hit = kAtLower;
                }
            } else if (phase_one && v > hi_[sc] + kFeasTol) {
                if (rate > 0.0) {
                    t = (v - hi_[sc]) / rate;
                    hit = kAtUpper;
                }
            } else if (rate > 0.0) {
                t = (v - lo_[sc]) / rate;
                hit = kAtLower;
            } else {
                t = (hi_[sc] - v) / (-rate);
                hit = kAtUpper;
            }
            if (t < -kFeasTol) t = 0.0;
            if (t < t_limit - 1e-12 ||
                (t < t_limit + 1e-12 && leaving_row >= 0 &&
                 basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leaving_row)])) {
                t_limit = std::max(0.0, t);
                leaving_row = i;
                leaving_status = hit;
            }
        }

        if (!std::isfinite(t_limit)) throw NumericalInstability("unbounded ray in bounded problem");

        if (t_limit <= 1e-12) {
            ++degenerate_streak;
            if (degenerate_streak > 2000) bland = true;
        } else {
            degenerate_streak = 0;
            bland = false;
        }

        const std::size_t se = static_cast<std::size_t>(entering);
        if (leaving_row < 0) {
            // Bound flip: the entering column crosses to its other bound.
            xval_[se] = entering_dir > 0 ? hi_[se] : lo_[se];
            status_[se] = entering_dir > 0 ? kAtUpper : kAtLower;
            for (int i = 0; i < m_; ++i) {
                xb_[static_cast<std::size_t>(i)] -=
                    t_limit * sigma * direction[static_cast<std::size_t>(i)];
                xval_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] =
                    xb_[static_cast<std::size_t>(i)];
            }
            continue;
        }

        const double pivot = direction[static_cast<std::size_t>(leaving_row)];
        if (std::abs(pivot) < kPivotTol)
            throw NumericalInstability("pivot element below tolerance");

        // Update values, keeping xval_ in step with the basic columns.
        const int leaving_col = basis_[static_cast<std::size_t>(leaving_row)];
        const std::size_t sl = static_cast<std::size_t>(leaving_col);
        for (int i = 0; i < m_; ++i) {
            xb_[static_cast<std::size_t>(i)] -=
                t_limit * sigma * direction[static_cast<std::size_t>(i)];
            xval_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] =
                xb_[static_cast<std::size_t>(i)];
        }
        const double entering_value =
            (entering_dir > 0 ? lo_[se] : hi_[se]) + sigma * t_limit;

        // Update the inverse: divide the pivot row, eliminate elsewhere.
        double* pivot_row_ptr =
            &binv_[static_cast<std::size_t>(leaving_row) * static_cast<std::size_t>(m_)];
        for (int k = 0; k < m_; ++k) pivot_row_ptr[k] /= pivot;
        for (int i = 0; i < m_; ++i) {
            if (i == leaving_row) continue;
            const double f = direction[static_cast<std::size_t>(i)];
            if (f == 0.0) continue;
            double* row_ptr = &binv_[static_cast<std::size_t>(i) * static_cast<std::size_t>(m_)];
            for (int k = 0; k < m_; ++k) row_ptr[k] -= f * pivot_row_ptr[k];
        }

        basis_[static_cast<std::size_t>(leaving_row)] = entering;
        status_[se] = kBasic;
        status_[sl] = leaving_status;
        xval_[sl] = leaving_status == kAtUpper ? hi_[sl] : lo_[sl];
        xb_[static_cast<std::size_t>(leaving_row)] = entering_value;
        xval_[se] = entering_value;

        ++total_pivots_;
        if (++pivots_since_refactor_ >= 4000) {
            refactorize();
            compute_basic_values();
        }
    }
}

LpStatus BoundedSimplex::solve() {
    sync_nonbasic_into_bounds();
    compute_basic_values();
    try {
        if (infeasibility() > kFeasTol) {
            if (!run(true)) return LpStatus::Infeasible;
        }
        if (!run(false)) return LpStatus::Infeasible;
    } catch (const NumericalInstability&) {
        return LpStatus::NumericalTrouble;
    }

    objective_ = 0.0;
    solution_.assign(static_cast<std::size_t>(n_), 0.0);
    for (int j = 0; j < n_; ++j) {
        solution_[static_cast<std::size_t>(j)] = xval_[static_cast<std::size_t>(j)];
        objective_ += obj_[static_cast<std::size_t>(j)] * xval_[static_cast<std::size_t>(j)];
    }
    return LpStatus::Optimal;
}

}  // namespace pwlstl
