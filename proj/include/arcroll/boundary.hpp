#pragma once

#include "arcroll/equilibrium.hpp"

#include <iosfwd>
#include <vector>

namespace arcroll {

enum class CellStatus {
  Ok,             // interior equilibrium branch
  AtEndpoint,     // branch terminated; rest configuration at an arc endpoint
  NoEquilibrium,  // flat landscape, no stable rest configuration
  Failed,         // solver error other than the above
};

const char* to_string(CellStatus s);
CellStatus parse_cell_status(const std::string& name);

struct MapCell {
  double phi1_rad = 0.0;
  double phi2_rad = 0.0;
  CellStatus status = CellStatus::Failed;
  double phi(ArcId arc) const { return arc == ArcId::Arc1 ? phi1_rad : phi2_rad; }
};

// Dense node grid over (theta1, theta2) in [0, 180] deg for one state.
// Index (i, j) maps to theta1 = i * resolution, theta2 = j * resolution.
struct EquilibriumMap {
  RobotParams params;
  LocomotionState state = LocomotionState::S1;
  double resolution_deg = 10.0;
  std::vector<MapCell> cells;  // row-major, theta1 fastest

  int nodes_per_axis() const { return static_cast<int>(180.0 / resolution_deg) + 1; }
  const MapCell& at(int i, int j) const { return cells[j * nodes_per_axis() + i]; }
  MapCell& at(int i, int j) { return cells[j * nodes_per_axis() + i]; }
};

// Polyline of control-space points (degrees) where the from_state branch
// terminates or jumps; crossing it lands the robot in to_state.
struct BoundaryCurve {
  LocomotionState from_state = LocomotionState::S1;
  LocomotionState to_state = LocomotionState::S1;
  std::vector<std::pair<double, double>> points_deg;  // (theta1, theta2)
};

enum class PathMode { Intuitive, NonIntuitive };

const char* to_string(PathMode m);

struct PathWaypoint {
  LocomotionState state = LocomotionState::S1;
  double theta1_deg = 0.0;
  double theta2_deg = 0.0;
};

// Consecutive waypoints differ in at most one theta; cost_deg is the total
// angular travel of the shifted masses.
struct ControlPath {
  PathMode mode = PathMode::Intuitive;
  std::vector<PathWaypoint> waypoints;
  double cost_deg = 0.0;
};

// Solves every grid node of the state's equilibrium branch, walking each row
// by continuation. Per-cell failures are recorded in the cell status, never
// thrown. resolution_deg must be one of 0.5, 1, 2, 5, 10 so the grid closes
// exactly; rows are distributed over `workers` threads and merged by index,
// so the result is identical for any worker count.
EquilibriumMap map_equilibria(const RobotParams& params, LocomotionState state,
                              double resolution_deg, int workers = 1);

// Finds cell edges where the branch presence changes, where an
// endpoint-parked branch flips ends, or where the contact angle spikes by
// more than 5 deg above the neighboring edge deltas, and chains their
// midpoints into per-(from, to) polylines. Smooth-but-steep regions do not
// qualify: a spike must stand out locally, which is what survives re-solving
// at finer resolution. Edges whose dying contact sits exactly between the
// endpoints (facing the degenerate apex-on-apex control point) have no
// defined landing state and are not reported.
std::vector<BoundaryCurve> extract_boundaries(const EquilibriumMap& map);

// Plans a single state change. Intuitive mode drives the rolling-arc mass to
// the endpoint whose pivot is target_state; NonIntuitive mode marches the
// four axis rays across the from-state map and takes the cheapest first
// boundary crossing that lands in target_state. Angles in degrees.
ControlPath plan_transition(const std::vector<EquilibriumMap>& maps, LocomotionState from_state,
                            double theta1_deg, double theta2_deg, LocomotionState target_state,
                            PathMode mode);

// Sum of absolute theta changes across consecutive waypoints, degrees.
double path_cost(const ControlPath& path);

// Columns: theta1_deg, theta2_deg, state, phi1_deg, phi2_deg, status.
// Rows ordered theta2-major, theta1 ascending within a row.
void write_map_csv(std::ostream& out, const EquilibriumMap& map);

// Heatmap of the rolling contact angle with boundary polylines overlaid.
void write_map_svg(std::ostream& out, const EquilibriumMap& map,
                   const std::vector<BoundaryCurve>& curves);

}  // namespace arcroll
