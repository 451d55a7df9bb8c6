#pragma once

#include "arcroll/geometry.hpp"

#include <iosfwd>
#include <string>

namespace arcroll {

// Flat run configuration. Defaults describe the physical prototype; the
// file form is a strict flat JSON object carrying exactly these keys.
struct RunConfig {
  double radius_mm = 272.5;
  double arc_mass_g = 1300.0;
  double shift_mass_g = 1150.0;
  double body_length_mm = 585.0;
  int steps_per_rev = 200;
  int revs_per_arc = 6;
  int microstep_factor = 1;
  double grid_resolution_deg = 10.0;
  double increment_deg = 10.0;
  double shift_rate_deg_s = 10.0;

  RobotParams robot() const;
  // Throws std::invalid_argument on non-positive entries or an off-menu
  // microstep factor / grid resolution.
  void validate() const;
};

// Strict parse: the document must be a JSON object whose keys are exactly
// the RunConfig fields, all numeric. Unknown or missing keys are errors.
RunConfig load_run_config(const std::string& text);
RunConfig load_run_config_file(const std::string& path);

// Writes all fields; load_run_config(saved text) reproduces the values.
void save_run_config(std::ostream& out, const RunConfig& config);

}  // namespace arcroll
