#include "pwlstl/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>
#include <sstream>

#include "pwlstl/formula.hpp"
#include "pwlstl/simplex.hpp"

namespace pwlstl {

namespace {

constexpr double kIntTol = 1e-6;
constexpr double kVerifyTol = 1e-7;

struct Node {
    long id = 0;
    double bound = 0.0;
    int parent = -1;
    int fixed_var = -1;   // branching decision producing this node
    double fixed_value = 0.0;
};

struct NodeOrder {
    // Best bound first, then oldest node. priority_queue keeps the largest,
    // so invert the id comparison.
    bool operator()(const std::pair<double, long>& a, const std::pair<double, long>& b) const {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    }
};

}  // namespace

MilpSolution solve(const MilpModel& model, const SolverConfig& cfg) {
    const auto deadline = std::chrono::steady_clock::now() +
                          std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(cfg.time_limit));

    MilpSolution result;
    BoundedSimplex lp(model);

    std::vector<Node> nodes;
    nodes.push_back({0, 0.0, -1, -1, 0.0});
    std::priority_queue<std::pair<double, long>, std::vector<std::pair<double, long>>, NodeOrder>
        open;
    open.push({std::numeric_limits<double>::infinity(), 0});

    bool have_incumbent = false;
    double incumbent_obj = -std::numeric_limits<double>::infinity();
    std::vector<double> incumbent;
    long processed = 0;
    bool hit_limit = false;
    double best_open_bound = std::numeric_limits<double>::infinity();

    std::vector<std::pair<int, double>> path;
    while (!open.empty()) {
        auto [queued_bound, id] = open.top();
        best_open_bound = queued_bound;
        if (cfg.bound_trace) cfg.bound_trace->push_back(queued_bound);
        if (have_incumbent && queued_bound <= incumbent_obj + cfg.abs_gap) break;
        open.pop();

        if (processed >= cfg.node_limit || std::chrono::steady_clock::now() > deadline) {
            hit_limit = true;
            break;
        }
        ++processed;

        // Bound state of this node: walk the branching decisions to the root.
        path.clear();
        for (int at = static_cast<int>(id); at >= 0; at = nodes[static_cast<std::size_t>(at)].parent) {
            const Node& n = nodes[static_cast<std::size_t>(at)];
            if (n.fixed_var >= 0) path.push_back({n.fixed_var, n.fixed_value});
        }
        lp.reset_column_bounds();
        for (const auto& [var, value] : path) lp.set_column_bounds(var, value, value);

#ifdef PWLSTL_COLD_NODES
        lp.reset_basis();
#endif
        LpStatus status = lp.solve();
        if (status == LpStatus::NumericalTrouble) {
            // Rebuild the inverse and retry once from a fresh basis before
            // giving the node up.
            lp.reset_basis();
            status = lp.solve();
            if (status == LpStatus::NumericalTrouble) continue;
        }
        if (status == LpStatus::Infeasible) continue;

        const double bound = lp.objective();
        if (have_incumbent && bound <= incumbent_obj + cfg.abs_gap) continue;

        // Most fractional binary, ties to the lowest id.
        const std::vector<double>& x = lp.solution();
        int branch_var = -1;
        double branch_frac = kIntTol;
        for (int j = 0; j < model.num_vars(); ++j) {
            if (model.var(j).kind != VarKind::Binary) continue;
            double frac = std::abs(x[static_cast<std::size_t>(j)] -
                                   std::round(x[static_cast<std::size_t>(j)]));
            if (frac > branch_frac + 1e-12) {
                branch_frac = frac;
                branch_var = j;
            }
        }

        if (branch_var < 0) {
            // Integral: candidate incumbent, after the mandatory audit.
            std::vector<double> candidate = x;
            for (int j = 0; j < model.num_vars(); ++j)
                if (model.var(j).kind == VarKind::Binary)
                    candidate[static_cast<std::size_t>(j)] =
                        std::round(candidate[static_cast<std::size_t>(j)]);
            if (model.max_violation(candidate) > kVerifyTol) {
                // Rounding binaries broke a row; keep the unrounded point if
                // that one verifies.
                if (model.max_violation(x) > kVerifyTol) continue;
                candidate = x;
            }
            double obj = model.eval(model.objective(), candidate);
            if (!have_incumbent || obj > incumbent_obj) {
                have_incumbent = true;
                incumbent_obj = obj;
                incumbent = std::move(candidate);
            }
            continue;
        }

        for (double value : {1.0, 0.0}) {
            Node child;
            child.id = static_cast<long>(nodes.size());
            child.bound = bound;
            child.parent = static_cast<int>(id);
            child.fixed_var = branch_var;
            child.fixed_value = value;
            nodes.push_back(child);
            open.push({bound, child.id});
        }
    }

    result.node_count = processed;
    if (have_incumbent) {
        result.values = incumbent;
        result.objective = incumbent_obj;
        if (hit_limit) {
            result.status = SolveStatus::Feasible;
            result.best_bound = best_open_bound;
        } else {
            result.status = SolveStatus::Optimal;
            result.best_bound =
                open.empty() ? incumbent_obj : std::max(incumbent_obj, best_open_bound);
        }
        // Report binaries rounded.
        for (int j = 0; j < model.num_vars(); ++j)
            if (model.var(j).kind == VarKind::Binary)
                result.values[static_cast<std::size_t>(j)] =
                    std::round(result.values[static_cast<std::size_t>(j)]);
    } else {
        result.status = hit_limit ? SolveStatus::TimedOut : SolveStatus::Infeasible;
        result.best_bound = hit_limit ? best_open_bound : -std::numeric_limits<double>::infinity();
    }
    return result;
}

// ---------------------------------------------------------------------------
// LP file export / solution import
// ---------------------------------------------------------------------------

namespace {

std::string sanitize(const std::string& label) {
    std::string out;
    out.reserve(label.size());
    for (char c : label) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_')
            out += c;
        else
            out += '_';
    }
    if (out.empty()) out = "v";
    return out;
}

void append_term(std::string& out, double coeff, const std::string& name, bool first) {
    if (coeff >= 0.0)
        out += first ? "" : " + ";
    else
        out += first ? "-" : " - ";
    double mag = std::abs(coeff);
    out += format_number(mag);
    out += " ";
    out += name;
}

void append_expr(std::string& out, const MilpModel& model, const LinExpr& expr) {
    bool first = true;
    for (const auto& [id, coeff] : expr.terms()) {
        append_term(out, coeff, lp_var_name(model, id), first);
        first = false;
    }
    if (first) out += "0 " + lp_var_name(model, 0);
}

}  // namespace

std::string lp_var_name(const MilpModel& model, int id) {
    return sanitize(model.var(id).name) + "_" + std::to_string(id);
}

std::string export_lp(const MilpModel& model) {
    std::string out;
    out += "\\ " + std::to_string(model.num_vars()) + " variables, " +
           std::to_string(model.num_constraints()) + " constraints\n";
    if (model.objective().constant() != 0.0)
        out += "\\ objective constant " + format_number(model.objective().constant()) + "\n";
    out += "Maximize\n obj: ";
    append_expr(out, model, model.objective());
    out += "\nSubject To\n";
    for (int r = 0; r < model.num_constraints(); ++r) {
        const Constraint& c = model.constraints()[static_cast<std::size_t>(r)];
        out += " c" + std::to_string(r) + ": ";
        append_expr(out, model, c.expr);
        switch (c.sense) {
            case Sense::Le:
                out += " <= ";
                break;
            case Sense::Ge:
                out += " >= ";
                break;
            case Sense::Eq:
                out += " = ";
                break;
        }
        out += format_number(c.rhs);
        out += "\n";
    }
    out += "Bounds\n";
    for (int j = 0; j < model.num_vars(); ++j) {
        if (model.var(j).kind == VarKind::Binary) continue;
        out += " " + format_number(model.var(j).lo) + " <= " + lp_var_name(model, j) +
               " <= " + format_number(model.var(j).hi) + "\n";
    }
    bool any_binary = false;
    for (int j = 0; j < model.num_vars(); ++j) any_binary = any_binary || model.var(j).kind == VarKind::Binary;
    if (any_binary) {
        out += "Binaries\n";
        std::string line = " ";
        for (int j = 0; j < model.num_vars(); ++j) {
            if (model.var(j).kind != VarKind::Binary) continue;
            std::string name = lp_var_name(model, j);
            if (line.size() + name.size() > 78) {
                out += line + "\n";
                line = " ";
            }
            line += name + " ";
        }
        if (line != " ") out += line + "\n";
    }
    out += "End\n";
    return out;
}

MilpSolution import_solution(const MilpModel& model, const std::string& text) {
    std::map<std::string, int> by_name;
    for (int j = 0; j < model.num_vars(); ++j) by_name[lp_var_name(model, j)] = j;

    MilpSolution sol;
    sol.values.assign(static_cast<std::size_t>(model.num_vars()), 0.0);
    std::vector<bool> seen(static_cast<std::size_t>(model.num_vars()), false);

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream fields(line);
        std::string name;
        if (!(fields >> name)) continue;
        double value = 0.0;
        if (!(fields >> value))
            throw SolutionImportError("line " + std::to_string(lineno) + ": missing value");
        std::string extra;
        if (fields >> extra)
            throw SolutionImportError("line " + std::to_string(lineno) + ": trailing content");
        auto it = by_name.find(name);
        if (it == by_name.end())
            throw SolutionImportError("line " + std::to_string(lineno) + ": unknown variable '" +
                                      name + "'");
        sol.values[static_cast<std::size_t>(it->second)] = value;
        seen[static_cast<std::size_t>(it->second)] = true;
    }
    for (int j = 0; j < model.num_vars(); ++j) {
        if (!seen[static_cast<std::size_t>(j)])
            sol.warnings.push_back("variable " + lp_var_name(model, j) + " missing, defaulted to 0");
        if (model.var(j).kind == VarKind::Binary)
            sol.values[static_cast<std::size_t>(j)] = std::round(sol.values[static_cast<std::size_t>(j)]);
    }
    sol.objective = model.eval(model.objective(), sol.values);
    sol.status = SolveStatus::Feasible;
    sol.best_bound = sol.objective;
    return sol;
}

}  // namespace pwlstl
