#include "pwlstl/bench.hpp"

#include <cmath>

namespace pwlstl {

namespace {

ConvexRegion tri(const std::string& name, Point a, Point b, Point c) {
    return region_from_vertices(name, {a, b, c});
}

Mission desk_base(const std::string& name, const std::string& formula, int k) {
    Mission m;
    m.name = name;
    m.workspace = Workspace{{0.0, 0.0}, {10.0, 10.0}, 20.0, 0.1};
    m.formula_text = formula;
    m.formula = resolve_horizon(parse_formula(formula), m.workspace.horizon);
    m.num_waypoints = k;
    m.v_bound = 1.0;
    m.theta_star = 0.5;
    m.lambda = 1.0;
    return m;
}

// Visit two regions long enough to ride out a 2 s dwell window each, while
// staying clear of a block; starts inside the first region.
BenchmarkCase desk_blocks_single_window() {
    Mission m = desk_base("desk-blocks-1", "(!A1) & (F (G[0,2] R1)) & (F (G[0,2] R2))", 8);
    m.regions.emplace("R1", tri("R1", {5.5, 0.5}, {8.5, 0.5}, {7.0, 3.5}));
    m.regions.emplace("R2", tri("R2", {5.5, 6.5}, {8.5, 6.5}, {7.0, 9.5}));
    m.regions.emplace("A1", tri("A1", {0.5, 8.5}, {2.5, 8.5}, {1.5, 10.0}));
    m.start = Point{7.0, 2.0};
    return {std::move(m), BenchScale::Desk, true, 0.5, 30.0};
}

// Adds explicit visit windows on top of the dwell pattern.
BenchmarkCase desk_blocks_windows() {
    Mission m = desk_base("desk-blocks-2",
                          "(!A1) & (F[0,6] G[0,1] R1) & (F[8,14] G[0,1] R2) & (G[1,2] R1)", 8);
    m.regions.emplace("R1", tri("R1", {5.5, 0.5}, {8.5, 0.5}, {7.0, 3.5}));
    m.regions.emplace("R2", tri("R2", {5.5, 6.5}, {8.5, 6.5}, {7.0, 9.5}));
    m.regions.emplace("A1", tri("A1", {0.5, 8.5}, {2.5, 8.5}, {1.5, 10.0}));
    m.start = Point{7.0, 2.0};
    return {std::move(m), BenchScale::Desk, true, 0.5, 30.0};
}

// Charge before passing the gate, then go monitor a region.
BenchmarkCase desk_gate_charge() {
    Mission m = desk_base("desk-gate", "((!G1) U[0,8] C1) & (F (G[0,1] R1))", 8);
    m.regions.emplace("C1", tri("C1", {1.0, 0.5}, {3.0, 0.5}, {2.0, 2.5}));
    m.regions.emplace("R1", tri("R1", {5.0, 4.0}, {7.5, 4.0}, {6.25, 6.5}));
    m.regions.emplace("G1", tri("G1", {8.5, 8.5}, {10.0, 8.5}, {9.25, 10.0}));
    m.start = Point{0.5, 0.5};
    return {std::move(m), BenchScale::Desk, true, 0.5, 30.0};
}

// Collect the key, cross the door corridor, finish on the goal pad.
BenchmarkCase desk_door_key() {
    Mission m = desk_base("desk-door",
                          "(F[0,18] G[0,1] GL) & (G[0,4] (!A1)) & ((!D1) U[0,12] K1)", 8);
    m.regions.emplace("K1", tri("K1", {1.0, 0.5}, {3.0, 0.5}, {2.0, 2.5}));
    m.regions.emplace("D1", tri("D1", {3.4, 2.6}, {4.8, 2.6}, {4.1, 4.2}));
    m.regions.emplace("GL", tri("GL", {5.0, 4.0}, {7.5, 4.0}, {6.25, 6.5}));
    m.regions.emplace("A1", tri("A1", {0.5, 8.5}, {2.5, 8.5}, {1.5, 10.0}));
    m.start = Point{0.5, 0.5};
    return {std::move(m), BenchScale::Desk, true, 0.5, 30.0};
}

void add_grid_blocks(Mission& m, int count) {
    // Deterministic scatter of small triangular blocks.
    for (int i = 0; i < count; ++i) {
        double x = 1.0 + 2.3 * (i % 4);
        double y = 1.0 + 2.1 * ((i / 4) % 4) + 0.2 * (i % 3);
        m.regions.emplace("A" + std::to_string(i + 1),
                          tri("A" + std::to_string(i + 1), {x, y}, {x + 0.8, y},
                              {x + 0.4, y + 0.8}));
    }
}

BenchmarkCase paper_case(const std::string& name, const std::string& formula, int k,
                         int avoid_blocks, const std::vector<std::string>& extra) {
    Mission m = desk_base(name, formula, k);
    m.workspace.horizon = 100.0;
    m.formula = resolve_horizon(parse_formula(formula), m.workspace.horizon);
    add_grid_blocks(m, avoid_blocks);
    double x = 0.4;
    for (const auto& region : extra) {
        m.regions.emplace(region, tri(region, {x, 8.6}, {x + 1.0, 8.6}, {x + 0.5, 9.6}));
        x += 1.2;
    }
    return {std::move(m), BenchScale::Paper, true, 0.0, 0.0};
}

std::string conj_blocks(int count) {
    std::string text;
    for (int i = 1; i <= count; ++i) {
        if (!text.empty()) text += " & ";
        text += "(!A" + std::to_string(i) + ")";
    }
    return text;
}

}  // namespace

std::vector<BenchmarkCase> load_benchmarks() {
    std::vector<BenchmarkCase> cases;
    cases.push_back(desk_blocks_single_window());
    cases.push_back(desk_blocks_windows());
    cases.push_back(desk_gate_charge());
    cases.push_back(desk_door_key());

    cases.push_back(paper_case("paper-blocks-1",
                               conj_blocks(8) + " & (F (G[0,5] R1)) & (F (G[0,5] R2))", 23, 8,
                               {"R1", "R2"}));
    cases.push_back(paper_case(
        "paper-blocks-2",
        conj_blocks(20) +
            " & (F[0,50] G[0,15] R1) & (F[60,85] G[0,15] R2) & (F[20,40] G[0,15] R3) & (G[66,73] R3)",
        25, 20, {"R1", "R2", "R3"}));
    cases.push_back(paper_case(
        "paper-door-1",
        "((!G1) U[0,30] C1) & (F[50,80] G[0,5] R1) & (F (G[0,5] R2))", 23, 0,
        {"G1", "C1", "R1", "R2"}));
    {
        std::string doors;
        for (int i = 1; i <= 5; ++i) {
            doors += " & ((!D" + std::to_string(i) + ") U[0,60] R" + std::to_string(i) + ")";
        }
        cases.push_back(paper_case("paper-door-2",
                                   "(F GL) & (G[0,100] (!A1))" + doors, 35, 1,
                                   {"GL", "D1", "D2", "D3", "D4", "D5", "R1", "R2", "R3", "R4",
                                    "R5"}));
    }
    return cases;
}

ScalingReport measure_scaling(const std::string& formula_text, const std::vector<int>& ks) {
    ScalingReport report;
    for (int k : ks) {
        Mission m = desk_base("scaling", formula_text, k);
        m.regions.emplace("R", tri("R", {4.0, 4.0}, {6.0, 4.0}, {5.0, 6.0}));
        auto [model, artifacts] = encode_mission(m.to_problem());
        (void)model;
        report.points.push_back(
            {k, artifacts.num_binary, artifacts.num_continuous, artifacts.num_constraints});
    }
    auto fit = [&](auto getter) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(report.points.size());
        for (const auto& p : report.points) {
            double x = std::log(static_cast<double>(p.waypoints));
            double y = std::log(static_cast<double>(getter(p)));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    report.binary_exponent = fit([](const ScalingPoint& p) { return p.num_binary; });
    report.continuous_exponent = fit([](const ScalingPoint& p) { return p.num_continuous; });
    return report;
}

}  // namespace pwlstl
