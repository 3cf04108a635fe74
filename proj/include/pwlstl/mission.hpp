#pragma once

#include <optional>
#include <string>

#include "pwlstl/encoder.hpp"
#include "pwlstl/formula.hpp"
#include "pwlstl/geometry.hpp"
#include "pwlstl/monitor.hpp"

namespace pwlstl {

class MissionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// On-disk mission description; see docs/mission-schema.md for the JSON
// layout. Versioned with a "schema" field.
struct Mission {
    std::string name;
    Workspace workspace;           // horizon + epsilon live here
    RegionMap regions;
    std::string formula_text;
    FormulaPtr formula;            // horizon-resolved
    int num_waypoints = 2;
    double v_bound = 1.0;
    double theta_star = 0.1;
    double lambda = 1.0;
    double eps_t = 1e-3;
    std::optional<Point> start;
    std::optional<Point> goal;
    ObjectiveKind objective = ObjectiveKind::PathLengthL1;
    Side side = Side::Right;

    SynthesisProblem to_problem() const;
};

Mission load_mission(const std::string& path);
Mission parse_mission(const std::string& json_text);

PwlTrajectory load_trajectory(const std::string& path);
PwlTrajectory parse_trajectory(const std::string& json_text);
std::string trajectory_json(const PwlTrajectory& traj);

// Monitor report for one mission/trajectory pair: per-subformula verdicts
// and both robustness sides for segment 0; all segments with `full`.
std::string monitor_report_json(const Mission& mission, const PwlTrajectory& traj, bool full);

// Satisfaction of the formula on the first segment.
bool monitor_verdict(const Mission& mission, const PwlTrajectory& traj);

}  // namespace pwlstl
