#pragma once

#include "arcroll/hybrid_sim.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace arcroll {

// One labeled motion-capture marker position, capture frame, millimetres.
struct Marker {
  std::string label;
  Vec3 position_mm = Vec3::Zero();
};

struct MocapFrame {
  double time_s = 0.0;
  std::vector<Marker> markers;
};

struct ImuSample {
  double time_s = 0.0;
  Vec3 accel_ms2 = Vec3::Zero();
};

// Rigid planar registration of a measured path onto a simulated one. The
// transform maps capture coordinates into the simulation frame: rotate by
// yaw_rad about vertical, then translate by (tx_mm, ty_mm); heights pass
// through unchanged because gravity already fixes the vertical axis.
struct AlignmentResult {
  double yaw_rad = 0.0;
  double tx_mm = 0.0;
  double ty_mm = 0.0;
  double rmse_mm = 0.0;
  // one residual per matched sample: RMS of the two arc-centroid errors
  std::vector<double> residuals_mm;
};

struct ImpactAnalysis {
  double impact_time_s = 0.0;
  double settle_duration_s = 0.0;
  std::vector<std::string> warnings;  // e.g. later impacts after settling
};

// A signed stepper move for one arc's shifting mass.
struct StepCommand {
  ArcId arc = ArcId::Arc1;
  long steps = 0;
  double rate_sps = 0.0;
};

// Angular stations of the simulated capture markers along each arc. Three per
// arc, enough to define the arc pose, away from the contested endpoints.
const std::vector<double>& marker_stations_rad();

// Wide-format capture CSV: header time_s,<label>_x_mm,<label>_y_mm,
// <label>_z_mm,... with labels arc1_m1..arc1_mK, arc2_m1..arc2_mK. Throws
// MissingHeader, BadFieldCount, NonMonotonicTime with 1-based line numbers.
std::vector<MocapFrame> parse_mocap_csv(const std::string& text);

// Exports a simulated trajectory as synthetic capture frames at the marker
// stations, timestamped by dividing mass travel by shift_rate_rad_s. Values
// print with full precision, so parsing the output reproduces them exactly.
void write_mocap_csv(std::ostream& out, const Trajectory& traj, double shift_rate_rad_s);

// Timeline used by the exporter and the aligner: travel time accumulates as
// total mass travel / shift_rate; a settling hop that moves no mass still
// advances time by a fixed dwell so timestamps stay strictly increasing.
std::vector<double> sample_times_s(const Trajectory& traj, double shift_rate_rad_s);

// Least-squares yaw + planar translation registering the measured arc
// centroid paths onto the simulated ones, after linearly resampling the
// measured frames onto the simulation timeline. Needs >= 3 markers per arc
// per frame and >= 10 time-matched samples (else InsufficientOverlap).
AlignmentResult align_trajectories(const Trajectory& sim, const std::vector<MocapFrame>& measured,
                                   double shift_rate_rad_s);

// IMU CSV: header time_s,ax_ms2,ay_ms2,az_ms2.
std::vector<ImuSample> parse_imu_csv(const std::string& text);
void write_imu_csv(std::ostream& out, const std::vector<ImuSample>& samples);

// Finds the first impact (deviation from the at-rest accelerometer baseline
// exceeds 5x quiet_band) and how long the signal takes to stay inside
// quiet_band for hold_s continuously. The baseline is the mean acceleration
// vector over the initial quiet stretch, so a constant sensor bias cancels.
// Later impacts after settling are listed in warnings. Throws
// NoImpactDetected when nothing exceeds the threshold or nothing settles.
ImpactAnalysis detect_impact_settling(const std::vector<ImuSample>& samples,
                                      double quiet_band_ms2 = 0.5, double hold_s = 1.0);

// Microsteps to shift a mass by delta_theta along its arc: six lead-screw
// revolutions of 200 full steps sweep the full half circle. microstep_factor
// must be a power of two up to 32 and |delta_theta| at most pi.
long theta_to_steps(double delta_theta_rad, int microstep_factor);

// One stepper command per schedule segment.
std::vector<StepCommand> steps_for_schedule(const ControlSchedule& schedule, int microstep_factor,
                                            double rate_sps);

// Step schedule CSV: header arc,steps,rate_sps.
void write_step_csv(std::ostream& out, const std::vector<StepCommand>& commands);

}  // namespace arcroll
