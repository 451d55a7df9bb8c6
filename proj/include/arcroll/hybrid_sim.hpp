#pragma once

#include "arcroll/equilibrium.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace arcroll {

// One leg of a control schedule. Within a segment only the driven arc's
// shifting mass moves; theta walks from theta_from to theta_to in steps of
// increment_rad (the sign of the walk comes from the endpoints, the increment
// is always positive).
struct ScheduleSegment {
  ArcId driven_arc = ArcId::Arc1;
  double theta_from_rad = 0.0;
  double theta_to_rad = 0.0;
  double increment_rad = deg_to_rad(10.0);
};

struct ControlSchedule {
  std::vector<ScheduleSegment> segments;
};

enum class TransitionKind {
  // The rolling contact reached an arc endpoint and the new state's
  // equilibrium coincides with the handover configuration: the robot pivots
  // smoothly onto the next arc.
  IntuitiveEndpoint,
  // The interior equilibrium branch died and the new state's rest
  // configuration sits more than 5 degrees away in contact angle: the robot
  // topples to it with no control change.
  NonIntuitiveJump,
};

const char* to_string(TransitionKind kind);

struct TransitionEvent {
  TransitionKind kind = TransitionKind::IntuitiveEndpoint;
  LocomotionState from_state = LocomotionState::S1;
  LocomotionState to_state = LocomotionState::S1;
  Vec3 handover_world = Vec3::Zero();
  int step_index = 0;
};

struct TrajectorySample {
  int step_index = 0;
  LocomotionState state = LocomotionState::S1;
  ControlInput control;
  ContactAngles contacts;
  RigidTransform pose;
  Vec3 com_world = Vec3::Zero();
  Vec3 q1_world = Vec3::Zero();  // arc 1 contact point, world frame
  Vec3 q2_world = Vec3::Zero();  // arc 2 contact point, world frame
  std::optional<TransitionEvent> event;
};

struct Trajectory {
  RobotParams params;
  std::vector<TrajectorySample> samples;
};

struct TrajectoryMetrics {
  double path_length_mm = 0.0;       // planar CoM path length
  double net_displacement_mm = 0.0;  // planar CoM start-to-end distance
  double duration_s = 0.0;
  double speed_bl_per_s = 0.0;
};

// Runs the schedule through the four-state automaton. Each increment is
// solved by continuation from the previous sample; when the rolling contact
// reaches an arc endpoint the pivot is handed over to that endpoint and the
// run continues in the new state. A transition event rides on the arrival
// sample; a toppling transition additionally appends one post-topple sample
// at the same control.
Trajectory run_sequence(const RobotParams& params, const EquilibriumConfig& start,
                        const ControlSchedule& schedule);

// World-frame anchor for the state entered through `event`: the xy position
// of the endpoint that becomes the new pivot, evaluated under current.pose.
PivotAnchor handover_pivot(const RobotParams& params, const TrajectorySample& current,
                           const TransitionEvent& event);

// Closed-form per-transition displacement shape [cos(theta), +/-sin(theta),
// sqrt(r)/2] used as a diagnostic overlay against the reconstructed poses.
// Only the four gait transitions are defined; anything else is a domain
// error. Not used in pose composition.
Vec3 nominal_transition_displacement(double radius_mm, LocomotionState from, LocomotionState to,
                                     double theta_rad);

// duration = total shifted-mass travel / shift_rate; speed is net planar CoM
// displacement in body lengths per second.
TrajectoryMetrics trajectory_metrics(const Trajectory& traj, double shift_rate_rad_s);

// Column order is part of the format: step, state, theta1_deg, theta2_deg,
// phi1_deg, phi2_deg, r11..r33 row-major, ox_mm, oy_mm, oz_mm,
// com_{x,y,z}_mm, q1{x,y,z}_mm, q2{x,y,z}_mm, event. Values print as %.17g
// so a round trip through the reader reproduces them bit for bit.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in, const RobotParams& params);

}  // namespace arcroll
