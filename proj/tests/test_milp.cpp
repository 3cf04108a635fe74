#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pwlstl/milp.hpp"

using namespace pwlstl;

namespace {

constexpr double kM = 100.0;

struct Box {
    double lo = -1e30;
    double hi = 1e30;
    bool empty() const { return lo > hi + 1e-12; }
};

// Feasible interval for variable `y` once every other variable is pinned.
// Rows not involving y become plain feasibility checks.
Box feasible_interval(const MilpModel& model, const std::vector<double>& pinned, int y) {
    Box box;
    box.lo = model.var(y).lo;
    box.hi = model.var(y).hi;
    for (const auto& c : model.constraints()) {
        double rest = 0.0;
        double coeff = 0.0;
        for (const auto& [id, k] : c.expr.terms()) {
            if (id == y)
                coeff = k;
            else
                rest += k * pinned[static_cast<std::size_t>(id)];
        }
        if (coeff == 0.0) {
            double v = rest;
            bool ok = true;
            if (c.sense == Sense::Le) ok = v <= c.rhs + 1e-9;
            if (c.sense == Sense::Ge) ok = v >= c.rhs - 1e-9;
            if (c.sense == Sense::Eq) ok = std::abs(v - c.rhs) <= 1e-9;
            if (!ok) return {1.0, 0.0};
            continue;
        }
        // coeff * y + rest (sense) rhs
        double bound = (c.rhs - rest) / coeff;
        bool upper = (c.sense == Sense::Le) == (coeff > 0.0);
        if (c.sense == Sense::Eq) {
            box.lo = std::max(box.lo, bound);
            box.hi = std::min(box.hi, bound);
        } else if (upper) {
            box.hi = std::min(box.hi, bound);
        } else {
            box.lo = std::max(box.lo, bound);
        }
    }
    return box;
}

// Enumerates every assignment of the model's binaries except those already
// pinned, returning the union of feasible values of `y`.
std::vector<double> feasible_outputs(const MilpModel& model, std::vector<double> values,
                                     const std::vector<int>& free_binaries, int y) {
    std::vector<double> outputs;
    const std::size_t combos = 1u << free_binaries.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
        for (std::size_t k = 0; k < free_binaries.size(); ++k)
            values[static_cast<std::size_t>(free_binaries[k])] = (mask >> k) & 1 ? 1.0 : 0.0;
        Box box = feasible_interval(model, values, y);
        if (box.empty()) continue;
        outputs.push_back(box.lo);
        if (box.hi - box.lo > 1e-9) outputs.push_back(box.hi);
    }
    return outputs;
}

std::vector<int> all_binaries(const MilpModel& model, const std::vector<int>& except = {}) {
    std::vector<int> ids;
    for (int i = 0; i < model.num_vars(); ++i) {
        if (model.var(i).kind != VarKind::Binary) continue;
        bool skip = false;
        for (int e : except) skip = skip || e == i;
        if (!skip) ids.push_back(i);
    }
    return ids;
}

}  // namespace

TEST_CASE("linear predicate indicator forces the sign of mu") {
    auto run = [](double pinned) {
        MilpModel model(kM);
        VarRef x = model.add_continuous("x", pinned, pinned);
        VarRef b = model.enc_linear_predicate(LinExpr(x), "pred");
        std::vector<double> values(static_cast<std::size_t>(model.num_vars()), 0.0);
        values[static_cast<std::size_t>(x.id)] = pinned;
        std::vector<bool> feasible(2);
        for (int v = 0; v <= 1; ++v) {
            values[static_cast<std::size_t>(b.id)] = v;
            Box box = feasible_interval(model, values, x.id);
            feasible[static_cast<std::size_t>(v)] =
                !box.empty() && box.lo <= pinned + 1e-12 && pinned <= box.hi + 1e-12;
        }
        return feasible;
    };
    auto pos = run(3.0);
    CHECK_FALSE(pos[0]);
    CHECK(pos[1]);
    auto neg = run(-3.0);
    CHECK(neg[0]);
    CHECK_FALSE(neg[1]);
    auto zero = run(0.0);
    CHECK_FALSE(zero[0]);  // 0 <= -m_eps fails
    CHECK(zero[1]);
}

TEST_CASE("predicate range must respect big-M") {
    MilpModel model(10.0);
    VarRef x = model.add_continuous("x", -50.0, 50.0);
    CHECK_THROWS_AS(model.enc_linear_predicate(LinExpr(x), "pred"), BigMTooSmall);
}

TEST_CASE("conjunction matches the truth table exhaustively") {
    for (int m = 1; m <= 3; ++m) {
        MilpModel model(kM);
        std::vector<VarRef> inputs;
        for (int i = 0; i < m; ++i) inputs.push_back(model.add_binary("b"));
        VarRef out = model.enc_and(inputs, "and");
        std::vector<double> values(static_cast<std::size_t>(model.num_vars()), 0.0);
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            bool expect = true;
            for (int i = 0; i < m; ++i) {
                bool bit = (mask >> i) & 1;
                values[static_cast<std::size_t>(inputs[static_cast<std::size_t>(i)].id)] =
                    bit ? 1.0 : 0.0;
                expect = expect && bit;
            }
            Box box = feasible_interval(model, values, out.id);
            REQUIRE_FALSE(box.empty());
            CHECK(box.lo == doctest::Approx(expect ? 1.0 : 0.0));
            CHECK(box.hi == doctest::Approx(expect ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("disjunction matches the truth table exhaustively") {
    for (int m = 1; m <= 4; ++m) {
        MilpModel model(kM);
        std::vector<VarRef> inputs;
        for (int i = 0; i < m; ++i) inputs.push_back(model.add_binary("b"));
        VarRef out = model.enc_or(inputs, "or");
        std::vector<double> values(static_cast<std::size_t>(model.num_vars()), 0.0);
        for (unsigned mask = 0; mask < (1u << m); ++mask) {
            bool expect = false;
            for (int i = 0; i < m; ++i) {
                bool bit = (mask >> i) & 1;
                values[static_cast<std::size_t>(inputs[static_cast<std::size_t>(i)].id)] =
                    bit ? 1.0 : 0.0;
                expect = expect || bit;
            }
            Box box = feasible_interval(model, values, out.id);
            REQUIRE_FALSE(box.empty());
            CHECK(box.lo == doctest::Approx(expect ? 1.0 : 0.0));
            CHECK(box.hi == doctest::Approx(expect ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("min and max selectors project to exactly the extremum") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> value(-kM / 2, kM / 2);
    std::uniform_int_distribution<int> width(1, 4);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = width(rng);
        MilpModel model(kM);
        std::vector<VarRef> thetas;
        std::vector<double> pinned;
        for (int i = 0; i < m; ++i) {
            double v = value(rng);
            pinned.push_back(v);
            thetas.push_back(model.add_continuous("t", v, v));
        }
        VarRef lo = model.enc_min(thetas, "min");
        VarRef hi = model.enc_max(thetas, "max");
        std::vector<double> values(static_cast<std::size_t>(model.num_vars()), 0.0);
        for (int i = 0; i < m; ++i)
            values[static_cast<std::size_t>(thetas[static_cast<std::size_t>(i)].id)] =
                pinned[static_cast<std::size_t>(i)];

        double expect_min = *std::min_element(pinned.begin(), pinned.end());
        double expect_max = *std::max_element(pinned.begin(), pinned.end());

        // The max output floats freely while probing min, so pin it first.
        values[static_cast<std::size_t>(hi.id)] = expect_max;
        auto outs_min = feasible_outputs(model, values, all_binaries(model), lo.id);
        REQUIRE_FALSE(outs_min.empty());
        for (double v : outs_min) CHECK(std::abs(v - expect_min) <= 1e-9);

        values[static_cast<std::size_t>(lo.id)] = expect_min;
        auto outs_max = feasible_outputs(model, values, all_binaries(model), hi.id);
        REQUIRE_FALSE(outs_max.empty());
        for (double v : outs_max) CHECK(std::abs(v - expect_max) <= 1e-9);
    }
}

TEST_CASE("tied min admits either selector") {
    MilpModel model(kM);
    VarRef a = model.add_continuous("a", 2.0, 2.0);
    VarRef b = model.add_continuous("b", 2.0, 2.0);
    std::vector<VarRef> thetas{a, b};
    VarRef lo = model.enc_min(thetas, "min");
    std::vector<double> values(static_cast<std::size_t>(model.num_vars()), 0.0);
    values[static_cast<std::size_t>(a.id)] = 2.0;
    values[static_cast<std::size_t>(b.id)] = 2.0;
    auto selectors = all_binaries(model);
    REQUIRE(selectors.size() == 2);
    int feasible_count = 0;
    for (int pick = 0; pick < 2; ++pick) {
        values[static_cast<std::size_t>(selectors[0])] = pick == 0 ? 1.0 : 0.0;
        values[static_cast<std::size_t>(selectors[1])] = pick == 0 ? 0.0 : 1.0;
        Box box = feasible_interval(model, values, lo.id);
        if (!box.empty()) {
            ++feasible_count;
            CHECK(box.lo == doctest::Approx(2.0));
            CHECK(box.hi == doctest::Approx(2.0));
        }
    }
    CHECK(feasible_count == 2);
}

TEST_CASE("product of continuous and binary") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> value(-kM / 2, kM / 2);
    for (int trial = 0; trial < 200; ++trial) {
        double v = value(rng);
        MilpModel model(kM);
        VarRef x = model.add_continuous("x", v, v);
        VarRef b = model.add_binary("b");
        VarRef y = model.enc_product(LinExpr(x), b, "prod");
        std::vector<double> values(static_cast<std::size_t>(model.num_vars()), 0.0);
        values[static_cast<std::size_t>(x.id)] = v;
        for (int bit = 0; bit <= 1; ++bit) {
            values[static_cast<std::size_t>(b.id)] = bit;
            Box box = feasible_interval(model, values, y.id);
            REQUIRE_FALSE(box.empty());
            double expect = bit ? v : 0.0;
            CHECK(box.lo == doctest::Approx(expect).epsilon(1e-12));
            CHECK(box.hi == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("every constraint carries a tag and registered variables") {
    MilpModel model(kM);
    VarRef x = model.add_continuous("x", 0.0, 1.0);
    VarRef b = model.add_binary("b");
    model.enc_product(LinExpr(x), b, "prod");
    model.enc_linear_predicate(LinExpr(x), "pred");
    for (const auto& c : model.constraints()) {
        CHECK_FALSE(c.tag.empty());
        for (const auto& [id, coeff] : c.expr.terms()) {
            CHECK(id >= 0);
            CHECK(id < model.num_vars());
            CHECK(coeff != 0.0);
        }
    }
    CHECK(model.num_binary() == 2);  // the input b plus the predicate indicator
}

TEST_CASE("expression bound analysis") {
    MilpModel model(kM);
    VarRef x = model.add_continuous("x", -2.0, 5.0);
    VarRef y = model.add_continuous("y", 1.0, 3.0);
    LinExpr e(x, 2.0);
    e.add(y, -4.0);
    e.add_constant(1.0);
    // max |2x - 4y + 1| over the box: x=5,y=1 -> 7; x=-2,y=3 -> -15.
    CHECK(model.bound_abs(e) == doctest::Approx(15.0));
}

TEST_CASE("complement binary") {
    MilpModel model(kM);
    VarRef b = model.add_binary("b");
    VarRef nb = model.complement(b, "flip");
    std::vector<double> values(static_cast<std::size_t>(model.num_vars()), 0.0);
    for (int bit = 0; bit <= 1; ++bit) {
        values[static_cast<std::size_t>(b.id)] = bit;
        Box box = feasible_interval(model, values, nb.id);
        REQUIRE_FALSE(box.empty());
        CHECK(box.lo == doctest::Approx(1.0 - bit));
        CHECK(box.hi == doctest::Approx(1.0 - bit));
    }
}
