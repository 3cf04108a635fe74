#pragma once

#include <random>
#include <vector>

#include "pwlstl/formula.hpp"
#include "pwlstl/geometry.hpp"
#include "pwlstl/monitor.hpp"

namespace pwlstl::testing {

using Rng = std::mt19937_64;

struct InstanceOptions {
    int max_depth = 3;         // deepest operator nesting of generated formulas
    int max_waypoints = 10;    // K
    int min_waypoints = 2;
    int num_regions = 3;       // size of the region pool
    double horizon = 20.0;     // generated timestamps stay within [0, horizon]
    double workspace_extent = 10.0;
    bool allow_until = true;
};

// Random NNF formula over the region pool names R0..R{n-1}, with resolved
// windows (no full-horizon placeholders). Intervals land on a 0.5 s grid.
FormulaPtr random_formula(Rng& rng, const InstanceOptions& opt, int depth = 0);

// Nondecreasing timestamps on a 0.25 s grid (occasionally coincident) and
// uniform points in the workspace square.
PwlTrajectory random_trajectory(Rng& rng, const InstanceOptions& opt);

// Pool of convex regions named R0..R{n-1}: random triangles and quads inside
// the workspace square.
RegionMap random_regions(Rng& rng, const InstanceOptions& opt);

}  // namespace pwlstl::testing
