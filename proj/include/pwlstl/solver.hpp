#pragma once

#include <string>
#include <vector>

#include "pwlstl/milp.hpp"

namespace pwlstl {

struct SolverConfig {
    double time_limit = 60.0;   // seconds
    double abs_gap = 1e-6;      // proof gap for Optimal
    long node_limit = 2'000'000;
    // Branching is most-fractional with lowest-id ties; node selection is
    // best bound with lowest-id ties. Both fixed, both deterministic.

    // When set, receives the global best bound at every node pop; the
    // sequence is non-increasing by construction.
    std::vector<double>* bound_trace = nullptr;
};

class ModelUnbounded : public MilpError {
public:
    using MilpError::MilpError;
};

// Deterministic exact branch-and-bound over the model's binary variables.
// Every returned assignment is re-verified against the constraints before
// it is reported.
MilpSolution solve(const MilpModel& model, const SolverConfig& cfg = {});

// CPLEX LP text: Maximize / Subject To / Bounds / Binaries / End. Variable
// names are the debug labels sanitized to [A-Za-z0-9_] with the id appended,
// ordering is by variable id, so the output is byte-stable.
std::string export_lp(const MilpModel& model);

// The LP-file name for a variable id; import_solution expects these names.
std::string lp_var_name(const MilpModel& model, int id);

class SolutionImportError : public MilpError {
public:
    using MilpError::MilpError;
};

// Parses `name value` lines ('#' starts a comment). Missing variables
// default to zero with a warning; the objective is recomputed from the
// assignment, never read from the file.
MilpSolution import_solution(const MilpModel& model, const std::string& text);

}  // namespace pwlstl
