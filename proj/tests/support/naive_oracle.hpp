#pragma once

#include "pwlstl/monitor.hpp"

namespace pwlstl::testing {

// Deliberately unoptimized reference evaluator: recomputes atom runs and
// window index sets from scratch on every query, with no memoization. Must
// agree with eval_time_robustness bit for bit.
RobustnessMatrix naive_oracle(const FormulaIndex& index, const PwlTrajectory& traj,
                              const RegionMap& regions, double eps, Side side);

}  // namespace pwlstl::testing
