#pragma once

#include "pwlstl/encoder.hpp"
#include "pwlstl/monitor.hpp"

namespace pwlstl::testing {

// Fixes the trajectory decision variables of an encoded model to a concrete
// trajectory.
void pin_trajectory(MilpModel& model, const EncodingArtifacts& artifacts,
                    const PwlTrajectory& traj);

// Whether a pinned instance sits clear of the deliberate margin bands: no
// window overlap inside (-2 eps_t, 2 eps_t), no empty Always window, no
// waypoint within `geo_band` of a region's eps-offset edge, and a horizon/
// timestamp layout the encoder pins exactly.
bool clear_of_margin_bands(const FormulaIndex& index, const PwlTrajectory& traj,
                           const RegionMap& regions, double eps, double eps_t,
                           double geo_band = 1e-4);

}  // namespace pwlstl::testing
