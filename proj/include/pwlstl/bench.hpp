#pragma once

#include <string>
#include <vector>

#include "pwlstl/mission.hpp"

namespace pwlstl {

enum class BenchScale { Desk, Paper };

struct BenchmarkCase {
    Mission mission;
    BenchScale scale = BenchScale::Desk;
    bool expect_feasible = true;
    double theta_min = 0.0;      // verified robustness floor for desk cases
    double time_budget = 30.0;   // seconds, desk only
};

// Mission library: four desk-scale reach-avoid scenarios solvable by the
// built-in solver, plus the full-size formulas as export-only cases. The
// geometry is this project's own; only the formula structure follows the
// benchmark scenarios.
std::vector<BenchmarkCase> load_benchmarks();

struct ScalingPoint {
    int waypoints = 0;
    int num_binary = 0;
    int num_continuous = 0;
    int num_constraints = 0;
};

struct ScalingReport {
    double binary_exponent = 0.0;
    double continuous_exponent = 0.0;
    std::vector<ScalingPoint> points;
};

// Encodes the formula at each waypoint count over a fixed one-region
// workspace and fits log-log exponents to the variable counts.
ScalingReport measure_scaling(const std::string& formula_text, const std::vector<int>& ks);

}  // namespace pwlstl
