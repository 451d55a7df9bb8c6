#pragma once

#include "arcroll/hybrid_sim.hpp"

#include <iosfwd>

namespace arcroll {

// Deterministic SVG projections of a trajectory. Contact points draw as
// dots (one color per arc), the center of mass as crosses joined by a
// polyline, transition handovers as larger rings.
void write_trajectory_top_svg(std::ostream& out, const Trajectory& traj);   // x-y plane
void write_trajectory_side_svg(std::ostream& out, const Trajectory& traj);  // x-z plane

}  // namespace arcroll
