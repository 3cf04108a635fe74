#pragma once

#include <string>

#include "pwlstl/mission.hpp"

namespace pwlstl {

// Standalone SVG of the mission's regions and a trajectory: reach regions
// green, avoid regions red, waypoints as circles colored by timestamp along
// a blue-to-orange ramp, with time labels. Deterministic output.
std::string render_svg(const Mission& mission, const PwlTrajectory& traj);

}  // namespace pwlstl
