#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pwlstl/formula.hpp"
#include "pwlstl/geometry.hpp"
#include "pwlstl/milp.hpp"
#include "pwlstl/monitor.hpp"

namespace pwlstl {

class EncoderError : public MilpError {
public:
    using MilpError::MilpError;
};

class InfeasibleEndpoints : public EncoderError {
public:
    using EncoderError::EncoderError;
};

enum class ObjectiveKind { PathLengthL1, MakespanOnly };

struct SynthesisProblem {
    FormulaPtr formula;  // horizon-resolved
    RegionMap regions;
    int num_waypoints = 0;  // K
    Workspace workspace;
    double v_bound = 1.0;
    double theta_star = 0.1;
    double lambda = 1.0;
    ObjectiveKind objective = ObjectiveKind::PathLengthL1;
    std::optional<Point> start;
    std::optional<Point> goal;
    Side side = Side::Right;
    double m_eps = 1e-6;
    double eps_t = 1e-3;

    void validate() const;
    // One big-M for the whole model, from the workspace diagonal, the
    // horizon and the largest window endpoint.
    double big_m() const;
};

struct EncoderOptions {
    // Encode every temporal operator at all segments even when only segment
    // 0 is demanded; used to cross-check the reduced path.
    bool force_full_expansion = false;
    // Additionally encode the qualitative verdict z at segment 0.
    bool qualitative = false;
    // Emit the theta >= theta_star row. Tests drop it to inspect raw
    // robustness values on pinned trajectories.
    bool threshold = true;
};

struct EncodingArtifacts {
    std::vector<int> time_vars;                        // per waypoint
    std::vector<int> position_vars;                    // waypoint-major, axis-minor
    std::map<std::string, std::vector<int>> label_vars;  // region -> per-segment z
    std::vector<int> aggregator_vars;                  // counting chain
    std::vector<int> theta_vars;                       // robustness values
    std::vector<int> window_vars;                      // interval-overlap indicators
    std::vector<int> selector_vars;                    // sup/inf pick rows
    int root_theta = -1;                               // robustness of the formula at segment 0
    int root_sat = -1;                                 // qualitative verdict, when requested
    bool reduced_path = false;  // no temporal operator was expanded beyond segment 0
    int num_binary = 0;
    int num_continuous = 0;
    int num_constraints = 0;
};

// Full model for the synthesis problem: region labels, counting-based atom
// robustness, temporal-operator robustness, dynamics and objective. The
// model maximizes -J + lambda * theta with theta >= theta_star.
std::pair<MilpModel, EncodingArtifacts> encode_mission(const SynthesisProblem& prob,
                                                       const EncoderOptions& opts = {});

// Waypoints extracted from a solved assignment.
PwlTrajectory extract_trajectory(const SynthesisProblem& prob, const EncodingArtifacts& artifacts,
                                 const std::vector<double>& values);

}  // namespace pwlstl
