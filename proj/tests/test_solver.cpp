#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <array>
#include <random>

#include "pwlstl/simplex.hpp"
#include "pwlstl/formula.hpp"
#include "pwlstl/solver.hpp"

using namespace pwlstl;

namespace {

constexpr double kM = 1000.0;

// Exhaustive oracle: every binary assignment, LP over the continuous rest.
MilpSolution enumerate_oracle(const MilpModel& model) {
    std::vector<int> binaries;
    for (int j = 0; j < model.num_vars(); ++j)
        if (model.var(j).kind == VarKind::Binary) binaries.push_back(j);
    REQUIRE(binaries.size() <= 18);

    MilpSolution best;
    best.status = SolveStatus::Infeasible;
    BoundedSimplex lp(model);
    for (std::size_t mask = 0; mask < (1u << binaries.size()); ++mask) {
        lp.reset_column_bounds();
        for (std::size_t k = 0; k < binaries.size(); ++k) {
            double v = (mask >> k) & 1 ? 1.0 : 0.0;
            lp.set_column_bounds(binaries[k], v, v);
        }
        lp.reset_basis();
        if (lp.solve() != LpStatus::Optimal) continue;
        if (best.status == SolveStatus::Infeasible || lp.objective() > best.objective) {
            best.status = SolveStatus::Optimal;
            best.objective = lp.objective();
            best.values = lp.solution();
        }
    }
    return best;
}

MilpModel random_model(std::mt19937_64& rng, int max_binaries) {
    std::uniform_int_distribution<int> nb(1, max_binaries);
    std::uniform_int_distribution<int> nc(0, 4);
    std::uniform_int_distribution<int> nrows(1, 8);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_real_distribution<double> bnd(0.5, 8.0);
    std::uniform_int_distribution<int> sense(0, 2);

    MilpModel model(kM);
    std::vector<VarRef> vars;
    int binaries = nb(rng);
    int continuous = nc(rng);
    for (int i = 0; i < binaries; ++i) vars.push_back(model.add_binary("b"));
    for (int i = 0; i < continuous; ++i) {
        double b = bnd(rng);
        vars.push_back(model.add_continuous("x", -b, b));
    }
    int rows = nrows(rng);
    for (int r = 0; r < rows; ++r) {
        LinExpr e;
        for (const auto& v : vars)
            if (coef(rng) > 0.0) e.add(v, coef(rng));
        if (e.empty()) e.add(vars[0], 1.0);
        Sense s = sense(rng) == 0 ? Sense::Le : (sense(rng) == 1 ? Sense::Ge : Sense::Le);
        model.add_constraint(std::move(e), s, coef(rng), "row");
    }
    LinExpr obj;
    for (const auto& v : vars) obj.add(v, coef(rng));
    model.set_objective(std::move(obj));
    return model;
}

}  // namespace

TEST_CASE("continuous maximum at the bound") {
    MilpModel model(kM);
    VarRef x = model.add_continuous("x", -10.0, 10.0);
    model.add_constraint(LinExpr(x), Sense::Le, 3.0, "cap");
    model.set_objective(LinExpr(x));
    auto sol = solve(model);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(3.0));
    CHECK(sol.values[0] == doctest::Approx(3.0));
}

TEST_CASE("two binaries with a packing row") {
    MilpModel model(kM);
    VarRef b1 = model.add_binary("b1");
    VarRef b2 = model.add_binary("b2");
    LinExpr sum(b1);
    sum.add(b2, 1.0);
    model.add_constraint(std::move(sum), Sense::Le, 1.0, "pack");
    LinExpr obj(b1, 2.0);
    obj.add(b2, 1.0);
    model.set_objective(std::move(obj));
    auto sol = solve(model);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(2.0));
    CHECK(sol.values[0] == doctest::Approx(1.0));
    CHECK(sol.values[1] == doctest::Approx(0.0));
}

TEST_CASE("infeasible bounds pair") {
    MilpModel model(kM);
    VarRef x = model.add_continuous("x", -10.0, 10.0);
    model.add_constraint(LinExpr(x), Sense::Ge, 2.0, "low");
    model.add_constraint(LinExpr(x), Sense::Le, 1.0, "high");
    model.set_objective(LinExpr(x));
    auto sol = solve(model);
    CHECK(sol.status == SolveStatus::Infeasible);
}

TEST_CASE("lp relaxation basics") {
    MilpModel model(kM);
    VarRef x = model.add_continuous("x", 0.0, 1.0);
    VarRef y = model.add_continuous("y", 0.0, 1.0);
    LinExpr sum(x);
    sum.add(y, 1.0);
    model.add_constraint(std::move(sum), Sense::Le, 1.0, "cap");
    LinExpr obj(x);
    obj.add(y, 1.0);
    model.set_objective(std::move(obj));
    BoundedSimplex lp(model);
    REQUIRE(lp.solve() == LpStatus::Optimal);
    CHECK(lp.objective() == doctest::Approx(1.0));
}

TEST_CASE("box-corner optima on twenty variables") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> coef(-4.0, 4.0);
    std::uniform_real_distribution<double> bnd(0.5, 6.0);
    for (int trial = 0; trial < 10; ++trial) {
        MilpModel model(kM);
        std::vector<VarRef> vars;
        double expect = 0.0;
        LinExpr obj;
        for (int j = 0; j < 20; ++j) {
            double lo = -bnd(rng);
            double hi = bnd(rng);
            double c = coef(rng);
            VarRef v = model.add_continuous("x", lo, hi);
            vars.push_back(v);
            obj.add(v, c);
            expect += std::max(c * lo, c * hi);
        }
        // Redundant rows wide enough to never bind.
        for (int r = 0; r < 5; ++r) {
            LinExpr e;
            for (const auto& v : vars) e.add(v, coef(rng));
            model.add_constraint(std::move(e), Sense::Le, 1e4, "slack_row");
        }
        model.set_objective(std::move(obj));
        BoundedSimplex lp(model);
        REQUIRE(lp.solve() == LpStatus::Optimal);
        CHECK(lp.objective() == doctest::Approx(expect).epsilon(1e-7));
    }
}

TEST_CASE("random lps agree with a vertex enumeration oracle") {
    // Dense brute force over active sets: candidate hyperplanes are the rows
    // at equality plus the variable bounds.
    std::mt19937_64 rng(4096);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    int solved = 0;
    for (int trial = 0; trial < 40 && solved < 10; ++trial) {
        const int n = 3;
        MilpModel model(kM);
        std::vector<VarRef> vars;
        LinExpr obj;
        for (int j = 0; j < n; ++j) {
            VarRef v = model.add_continuous("x", -4.0, 4.0);
            vars.push_back(v);
            obj.add(v, coef(rng));
        }
        for (int r = 0; r < 4; ++r) {
            LinExpr e;
            for (const auto& v : vars) e.add(v, coef(rng));
            model.add_constraint(std::move(e), Sense::Le, coef(rng) + 3.0, "row");
        }
        model.set_objective(obj);

        // Collect hyperplanes a.x = b.
        std::vector<std::array<double, 4>> planes;
        for (const auto& c : model.constraints()) {
            std::array<double, 4> p{0, 0, 0, c.rhs};
            for (const auto& [id, k] : c.expr.terms()) p[static_cast<std::size_t>(id)] = k;
            planes.push_back(p);
        }
        for (int j = 0; j < n; ++j) {
            std::array<double, 4> lo{0, 0, 0, -4.0};
            lo[static_cast<std::size_t>(j)] = 1.0;
            planes.push_back(lo);
            std::array<double, 4> hi{0, 0, 0, 4.0};
            hi[static_cast<std::size_t>(j)] = 1.0;
            planes.push_back(hi);
        }
        double best = -1e30;
        bool feasible = false;
        const std::size_t np = planes.size();
        for (std::size_t i = 0; i < np; ++i)
            for (std::size_t j = i + 1; j < np; ++j)
                for (std::size_t k = j + 1; k < np; ++k) {
                    // Solve the 3x3 system by Cramer's rule.
                    double a[3][3] = {{planes[i][0], planes[i][1], planes[i][2]},
                                      {planes[j][0], planes[j][1], planes[j][2]},
                                      {planes[k][0], planes[k][1], planes[k][2]}};
                    double b[3] = {planes[i][3], planes[j][3], planes[k][3]};
                    double det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
                                 a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
                                 a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
                    if (std::abs(det) < 1e-9) continue;
                    double x[3];
                    for (int col = 0; col < 3; ++col) {
                        double m[3][3];
                        for (int r = 0; r < 3; ++r)
                            for (int c2 = 0; c2 < 3; ++c2) m[r][c2] = a[r][c2];
                        for (int r = 0; r < 3; ++r) m[r][col] = b[r];
                        double d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                                   m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                                   m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
                        x[col] = d / det;
                    }
                    bool ok = true;
                    for (int v = 0; v < n && ok; ++v)
                        ok = x[v] >= -4.0 - 1e-7 && x[v] <= 4.0 + 1e-7;
                    for (const auto& c : model.constraints()) {
                        if (!ok) break;
                        double lhs = 0.0;
                        for (const auto& [id, kk] : c.expr.terms())
                            lhs += kk * x[static_cast<std::size_t>(id)];
                        ok = lhs <= c.rhs + 1e-7;
                    }
                    if (!ok) continue;
                    feasible = true;
                    double val = 0.0;
                    for (const auto& [id, kk] : model.objective().terms())
                        val += kk * x[static_cast<std::size_t>(id)];
                    best = std::max(best, val);
                }
        if (!feasible) continue;
        BoundedSimplex lp(model);
        REQUIRE(lp.solve() == LpStatus::Optimal);
        CHECK(lp.objective() == doctest::Approx(best).epsilon(1e-7));
        ++solved;
    }
    CHECK(solved == 10);
}

TEST_CASE("branch and bound equals exhaustive enumeration") {
    std::mt19937_64 rng(20240813);
    int compared = 0;
    for (int trial = 0; trial < 50; ++trial) {
        MilpModel model = random_model(rng, 10);
        auto oracle = enumerate_oracle(model);
        auto sol = solve(model);
        REQUIRE(sol.status == oracle.status);
        if (sol.status == SolveStatus::Optimal) {
            CHECK(sol.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
            CHECK(model.max_violation(sol.values) <= 1e-7);
            ++compared;
        }
    }
    CHECK(compared > 10);
}

TEST_CASE("determinism: identical runs, identical trees") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        MilpModel model = random_model(rng, 12);
        auto a = solve(model);
        auto b = solve(model);
        CHECK(a.status == b.status);
        CHECK(a.node_count == b.node_count);
        if (a.status == SolveStatus::Optimal) {
            REQUIRE(b.status == SolveStatus::Optimal);
            for (std::size_t j = 0; j < a.values.size(); ++j)
                CHECK(a.values[j] == b.values[j]);
        }
    }
}

TEST_CASE("best bound is non-increasing") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        MilpModel model = random_model(rng, 12);
        std::vector<double> trace;
        SolverConfig cfg;
        cfg.bound_trace = &trace;
        auto sol = solve(model, cfg);
        (void)sol;
        for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
}

TEST_CASE("lp export golden text") {
    MilpModel model(kM);
    VarRef x = model.add_continuous("x", 0.0, 3.0);
    model.add_constraint(LinExpr(x), Sense::Le, 3.0, "cap");
    model.set_objective(LinExpr(x));
    std::string expect =
        "\\ 1 variables, 1 constraints\n"
        "Maximize\n"
        " obj: 1 x_0\n"
        "Subject To\n"
        " c0: 1 x_0 <= 3\n"
        "Bounds\n"
        " 0 <= x_0 <= 3\n"
        "End\n";
    CHECK(export_lp(model) == expect);
    CHECK(export_lp(model) == export_lp(model));
}

TEST_CASE("solution import round trip") {
    std::mt19937_64 rng(23);
    MilpModel model = random_model(rng, 8);
    auto sol = solve(model);
    if (sol.status != SolveStatus::Optimal) return;
    std::string text = "# assignment\n";
    for (int j = 0; j < model.num_vars(); ++j)
        text += lp_var_name(model, j) + " " + format_number(sol.values[static_cast<std::size_t>(j)]) +
                "\n";
    auto imported = import_solution(model, text);
    CHECK(imported.status == SolveStatus::Feasible);
    CHECK(imported.objective == doctest::Approx(sol.objective));
    for (std::size_t j = 0; j < sol.values.size(); ++j)
        CHECK(imported.values[j] == doctest::Approx(sol.values[j]));
    CHECK(imported.warnings.empty());
}

TEST_CASE("solution import errors") {
    MilpModel model(kM);
    model.add_continuous("x", 0.0, 1.0);
    CHECK_THROWS_AS(import_solution(model, "alien 1.0\n"), SolutionImportError);
    CHECK_THROWS_AS(import_solution(model, "x_0\n"), SolutionImportError);
    CHECK_THROWS_AS(import_solution(model, "x_0 1.0 junk\n"), SolutionImportError);
    auto sol = import_solution(model, "# nothing\n");
    CHECK(sol.warnings.size() == 1);
    CHECK(sol.values[0] == 0.0);
}
