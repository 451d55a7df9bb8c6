// Quasistatic equilibrium of the chassis pinned at one arc endpoint while the
// other arc rests tangentially on the ground plane.
#pragma once

#include "arcroll/errors.hpp"
#include "arcroll/geometry.hpp"

namespace arcroll {

// One locomotion regime of the hybrid automaton: which arc endpoint acts as
// the pivot, and which arc rolls.
//
//   S1: pivot at arc 2's 0-end,  arc 1 rolls
//   S2: pivot at arc 2's pi-end, arc 1 rolls
//   S3: pivot at arc 1's 0-end,  arc 2 rolls
//   S4: pivot at arc 1's pi-end, arc 2 rolls
enum class LocomotionState { S1, S2, S3, S4 };

ArcId pivot_arc(LocomotionState s);
double pivot_phi_rad(LocomotionState s);  // 0 or pi
ArcId rolling_arc(LocomotionState s);

// Inverse of the (pivot_arc, pivot_phi) mapping above.
LocomotionState state_for_pivot(ArcId arc, double phi_rad);

const char* to_string(LocomotionState s);
LocomotionState parse_state(const std::string& name);

// Ground-plane location of the pinned arc endpoint.
struct PivotAnchor {
  double x_mm = 0.0;
  double y_mm = 0.0;
};

struct EquilibriumConfig {
  LocomotionState state = LocomotionState::S1;
  ControlInput control;
  ContactAngles contacts;  // pivot arc at its pinned station, exact
  RigidTransform pose;     // body frame -> world frame
  Vec3 com_world = Vec3::Zero();
  double potential_mm = 0.0;  // world height of the center of mass
  // True when the energy minimum sits at a rolling-arc endpoint, i.e. the
  // interior equilibrium branch has terminated for these controls.
  bool contact_at_endpoint = false;
};

// World height of the center of mass under the given pose.
double potential_energy(const RobotParams& params, const ControlInput& control,
                        const RigidTransform& pose);

// Minimum-potential configuration with the pivot pinned at `anchor`, the
// rolling arc touching the plane, and no arc point below it. Orientation is
// gauge-fixed with the support direction along world +x.
//
// Throws InfeasibleContact when no candidate satisfies the contact
// constraints and NoStableEquilibrium when the landscape has no strict
// minimum (flat within tolerance).
EquilibriumConfig solve_equilibrium(const RobotParams& params, LocomotionState state,
                                    const ControlInput& control, const PivotAnchor& anchor);

// Continuation variant: descends from the predecessor's contact angle to the
// connected local minimum and propagates the heading by rolling the contact
// without slip (ground track length equals arc length traversed).
// `predecessor` must be a configuration of the same state.
EquilibriumConfig solve_equilibrium(const RobotParams& params, LocomotionState state,
                                    const ControlInput& control, const PivotAnchor& anchor,
                                    const EquilibriumConfig& predecessor);

// Brute-force reference: exhaustive scan of the contact station at grid_deg
// (<= 0.25 deg) with the rocking angle resolved per candidate from the
// non-penetration window. Independent of the closed-form construction used
// by solve_equilibrium; intended for tests and cross-validation only.
EquilibriumConfig oracle_equilibrium(const RobotParams& params, LocomotionState state,
                                     const ControlInput& control, const PivotAnchor& anchor,
                                     double grid_deg);

// Station of the lowest point of `arc` under `pose`, refined to 1e-6 rad.
// Throws DegenerateContact when the arc lies horizontal (all points at equal
// height within tolerance).
double contact_angle_from_pose(const RobotParams& params, ArcId arc,
                               const RigidTransform& pose);

}  // namespace arcroll
