#include "arcroll/telemetry.hpp"

#include "arcroll/format.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace arcroll {

namespace {

// Time charged to a settling hop that moves no mass, keeping export
// timestamps strictly increasing.
constexpr double kSettleDwellS = 0.25;
// Leading stretch of the IMU record used to estimate the at-rest baseline.
constexpr double kBaselineWindowS = 0.25;

double parse_field(const std::string& field, std::size_t line) {
  try {
    return parse_double(field);
  } catch (const std::invalid_argument& e) {
    throw CsvError("BadValue", line, e.what());
  }
}

std::vector<std::string> non_empty_lines(const std::string& text,
                                         std::vector<std::size_t>* line_numbers) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line != "\r") {
      lines.push_back(line);
      line_numbers->push_back(number);
    }
  }
  return lines;
}

// Mean capture-marker position of one arc in a frame, by label prefix.
Vec3 arc_centroid(const MocapFrame& frame, ArcId arc) {
  const std::string prefix = to_string(arc);
  Vec3 sum = Vec3::Zero();
  int count = 0;
  for (const Marker& m : frame.markers) {
    if (m.label.rfind(prefix, 0) == 0) {
      sum += m.position_mm;
      ++count;
    }
  }
  if (count < 3) {
    throw std::invalid_argument("frame at t=" + g17(frame.time_s) + " has fewer than 3 " +
                                prefix + " markers");
  }
  return sum / count;
}

// Same summation order as arc_centroid so that a round-tripped export
// matches the measured centroid bit for bit.
Vec3 sim_arc_centroid(const TrajectorySample& s, const RobotParams& params, ArcId arc) {
  Vec3 sum = Vec3::Zero();
  for (double station : marker_stations_rad()) {
    sum += s.pose.apply(contact_position_body(params, arc, station));
  }
  return sum / static_cast<double>(marker_stations_rad().size());
}

}  // namespace

const std::vector<double>& marker_stations_rad() {
  static const std::vector<double> stations{kPi / 4, kPi / 2, 3 * kPi / 4};
  return stations;
}

std::vector<MocapFrame> parse_mocap_csv(const std::string& text) {
  std::vector<std::size_t> line_no;
  const std::vector<std::string> lines = non_empty_lines(text, &line_no);
  if (lines.empty()) throw MissingHeader(1, "empty input");

  const std::vector<std::string> head = split_csv_line(lines[0]);
  if (head.empty() || head[0] != "time_s" || head.size() < 4 || (head.size() - 1) % 3 != 0) {
    throw MissingHeader(line_no[0], "expected time_s,<label>_x_mm,<label>_y_mm,<label>_z_mm,...");
  }
  std::vector<std::string> labels;
  for (std::size_t c = 1; c < head.size(); c += 3) {
    const std::string& x = head[c];
    if (x.size() < 6 || x.substr(x.size() - 5) != "_x_mm") {
      throw MissingHeader(line_no[0], "column '" + x + "' does not end in _x_mm");
    }
    const std::string label = x.substr(0, x.size() - 5);
    if (head[c + 1] != label + "_y_mm" || head[c + 2] != label + "_z_mm") {
      throw MissingHeader(line_no[0], "columns for '" + label + "' are not x,y,z triples");
    }
    labels.push_back(label);
  }

  std::vector<MocapFrame> frames;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> f = split_csv_line(lines[r]);
    if (f.size() != head.size()) {
      throw BadFieldCount(line_no[r], "expected " + std::to_string(head.size()) + " fields, got " +
                                          std::to_string(f.size()));
    }
    MocapFrame frame;
    frame.time_s = parse_field(f[0], line_no[r]);
    if (!frames.empty() && frame.time_s <= frames.back().time_s) {
      throw NonMonotonicTime(line_no[r], "t=" + f[0]);
    }
    for (std::size_t m = 0; m < labels.size(); ++m) {
      Marker marker;
      marker.label = labels[m];
      marker.position_mm = Vec3(parse_field(f[1 + 3 * m], line_no[r]),
                                parse_field(f[2 + 3 * m], line_no[r]),
                                parse_field(f[3 + 3 * m], line_no[r]));
      frame.markers.push_back(std::move(marker));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

std::vector<double> sample_times_s(const Trajectory& traj, double shift_rate_rad_s) {
  if (!(shift_rate_rad_s > 0.0)) {
    throw std::invalid_argument("shift rate must be positive");
  }
  std::vector<double> times;
  times.reserve(traj.samples.size());
  double t = 0.0;
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    if (k > 0) {
      const ControlInput& a = traj.samples[k - 1].control;
      const ControlInput& b = traj.samples[k].control;
      const double travel = std::abs(b.theta1_rad - a.theta1_rad) +
                            std::abs(b.theta2_rad - a.theta2_rad);
      t += travel > 0.0 ? travel / shift_rate_rad_s : kSettleDwellS;
    }
    times.push_back(t);
  }
  return times;
}

void write_mocap_csv(std::ostream& out, const Trajectory& traj, double shift_rate_rad_s) {
  const std::vector<double> times = sample_times_s(traj, shift_rate_rad_s);
  out << "time_s";
  for (ArcId arc : {ArcId::Arc1, ArcId::Arc2}) {
    for (std::size_t m = 0; m < marker_stations_rad().size(); ++m) {
      const std::string label = std::string(to_string(arc)) + "_m" + std::to_string(m + 1);
      out << ',' << label << "_x_mm," << label << "_y_mm," << label << "_z_mm";
    }
  }
  out << '\n';
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    out << g17(times[k]);
    for (ArcId arc : {ArcId::Arc1, ArcId::Arc2}) {
      for (double station : marker_stations_rad()) {
        const Vec3 p =
            traj.samples[k].pose.apply(contact_position_body(traj.params, arc, station));
        out << ',' << g17(p.x()) << ',' << g17(p.y()) << ',' << g17(p.z());
      }
    }
    out << '\n';
  }
}

AlignmentResult align_trajectories(const Trajectory& sim, const std::vector<MocapFrame>& measured,
                                   double shift_rate_rad_s) {
  if (measured.size() < 2) {
    throw InsufficientOverlap("need at least two capture frames");
  }
  const std::vector<double> times = sample_times_s(sim, shift_rate_rad_s);

  std::vector<Vec3> meas1(measured.size()), meas2(measured.size());
  for (std::size_t i = 0; i < measured.size(); ++i) {
    meas1[i] = arc_centroid(measured[i], ArcId::Arc1);
    meas2[i] = arc_centroid(measured[i], ArcId::Arc2);
  }

  // Resample the measured centroid paths onto the simulation timeline.
  struct Pair {
    Vec3 m1, m2, c1, c2;
  };
  std::vector<Pair> matched;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < sim.samples.size(); ++k) {
    const double t = times[k];
    if (t < measured.front().time_s || t > measured.back().time_s) continue;
    while (seg + 2 < measured.size() && measured[seg + 1].time_s < t) ++seg;
    const double t0 = measured[seg].time_s, t1 = measured[seg + 1].time_s;
    const double w = (t - t0) / (t1 - t0);
    Pair p;
    p.m1 = (1.0 - w) * meas1[seg] + w * meas1[seg + 1];
    p.m2 = (1.0 - w) * meas2[seg] + w * meas2[seg + 1];
    p.c1 = sim_arc_centroid(sim.samples[k], sim.params, ArcId::Arc1);
    p.c2 = sim_arc_centroid(sim.samples[k], sim.params, ArcId::Arc2);
    matched.push_back(p);
  }
  if (matched.size() < 10) {
    throw InsufficientOverlap("only " + std::to_string(matched.size()) +
                              " time-matched samples, need 10");
  }

  // Planar Procrustes over the pooled centroid pairs.
  double mx = 0, my = 0, cx = 0, cy = 0;
  for (const Pair& p : matched) {
    mx += p.m1.x() + p.m2.x();
    my += p.m1.y() + p.m2.y();
    cx += p.c1.x() + p.c2.x();
    cy += p.c1.y() + p.c2.y();
  }
  const double n = 2.0 * static_cast<double>(matched.size());
  mx /= n;
  my /= n;
  cx /= n;
  cy /= n;
  double sxx = 0, sxy = 0;
  for (const Pair& p : matched) {
    for (const Vec3* pair : {&p.m1, &p.m2}) {
      const Vec3& c = pair == &p.m1 ? p.c1 : p.c2;
      const double dmx = pair->x() - mx, dmy = pair->y() - my;
      const double dcx = c.x() - cx, dcy = c.y() - cy;
      sxx += dmx * dcx + dmy * dcy;
      sxy += dmx * dcy - dmy * dcx;
    }
  }
  AlignmentResult result;
  result.yaw_rad = (sxx == 0.0 && sxy == 0.0) ? 0.0 : std::atan2(sxy, sxx);
  const double cs = std::cos(result.yaw_rad), sn = std::sin(result.yaw_rad);
  result.tx_mm = cx - (cs * mx - sn * my);
  result.ty_mm = cy - (sn * mx + cs * my);

  auto apply = [&](const Vec3& v) {
    return Vec3(cs * v.x() - sn * v.y() + result.tx_mm, sn * v.x() + cs * v.y() + result.ty_mm,
                v.z());
  };
  double sq_sum = 0.0;
  for (const Pair& p : matched) {
    const double e1 = (apply(p.m1) - p.c1).squaredNorm();
    const double e2 = (apply(p.m2) - p.c2).squaredNorm();
    result.residuals_mm.push_back(std::sqrt((e1 + e2) / 2.0));
    sq_sum += (e1 + e2) / 2.0;
  }
  result.rmse_mm = std::sqrt(sq_sum / static_cast<double>(matched.size()));
  return result;
}

std::vector<ImuSample> parse_imu_csv(const std::string& text) {
  std::vector<std::size_t> line_no;
  const std::vector<std::string> lines = non_empty_lines(text, &line_no);
  if (lines.empty()) throw MissingHeader(1, "empty input");
  if (split_csv_line(lines[0]) !=
      std::vector<std::string>{"time_s", "ax_ms2", "ay_ms2", "az_ms2"}) {
    throw MissingHeader(line_no[0], "expected time_s,ax_ms2,ay_ms2,az_ms2");
  }
  std::vector<ImuSample> samples;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::vector<std::string> f = split_csv_line(lines[r]);
    if (f.size() != 4) {
      throw BadFieldCount(line_no[r], "expected 4 fields, got " + std::to_string(f.size()));
    }
    ImuSample s;
    s.time_s = parse_field(f[0], line_no[r]);
    if (!samples.empty() && s.time_s <= samples.back().time_s) {
      throw NonMonotonicTime(line_no[r], "t=" + f[0]);
    }
    s.accel_ms2 =
        Vec3(parse_field(f[1], line_no[r]), parse_field(f[2], line_no[r]),
             parse_field(f[3], line_no[r]));
    samples.push_back(s);
  }
  return samples;
}

void write_imu_csv(std::ostream& out, const std::vector<ImuSample>& samples) {
  out << "time_s,ax_ms2,ay_ms2,az_ms2\n";
  for (const ImuSample& s : samples) {
    out << g17(s.time_s) << ',' << g17(s.accel_ms2.x()) << ',' << g17(s.accel_ms2.y()) << ','
        << g17(s.accel_ms2.z()) << '\n';
  }
}

ImpactAnalysis detect_impact_settling(const std::vector<ImuSample>& samples,
                                      double quiet_band_ms2, double hold_s) {
  if (samples.size() < 20) {
    throw std::invalid_argument("need at least 20 IMU samples");
  }
  if (!(quiet_band_ms2 > 0.0) || !(hold_s > 0.0)) {
    throw std::invalid_argument("quiet band and hold must be positive");
  }
  const double span = samples.back().time_s - samples.front().time_s;
  if ((static_cast<double>(samples.size()) - 1.0) / span < 50.0) {
    throw std::invalid_argument("sample rate below 50 Hz");
  }

  Vec3 baseline = Vec3::Zero();
  std::size_t base_n = 0;
  const double base_end = samples.front().time_s + kBaselineWindowS;
  while (base_n < samples.size() &&
         (samples[base_n].time_s <= base_end || base_n < 10)) {
    baseline += samples[base_n].accel_ms2;
    ++base_n;
  }
  baseline /= static_cast<double>(base_n);

  std::vector<double> dev(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dev[i] = (samples[i].accel_ms2 - baseline).norm();
  }

  const double threshold = 5.0 * quiet_band_ms2;
  std::size_t impact = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (dev[i] > threshold) {
      impact = i;
      break;
    }
  }
  if (impact == samples.size()) {
    throw NoImpactDetected("no deviation above " + g17(threshold) + " m/s^2");
  }

  double settle_time = 0.0;
  bool in_run = false;
  double run_start = 0.0;
  std::size_t settled_at = samples.size();
  for (std::size_t i = impact; i < samples.size(); ++i) {
    if (dev[i] < quiet_band_ms2) {
      if (!in_run) {
        in_run = true;
        run_start = samples[i].time_s;
      }
      if (samples[i].time_s - run_start >= hold_s) {
        settle_time = run_start;
        settled_at = i;
        break;
      }
    } else {
      in_run = false;
    }
  }
  if (settled_at == samples.size()) {
    throw NoImpactDetected("signal does not settle within the record");
  }

  ImpactAnalysis out;
  out.impact_time_s = samples[impact].time_s;
  out.settle_duration_s = settle_time - out.impact_time_s;
  bool above = false;
  for (std::size_t i = settled_at; i < samples.size(); ++i) {
    const bool now = dev[i] > threshold;
    if (now && !above) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "additional impact at t=%.3f s", samples[i].time_s);
      out.warnings.push_back(buf);
    }
    above = now;
  }
  return out;
}

long theta_to_steps(double delta_theta_rad, int microstep_factor) {
  if (microstep_factor != 1 && microstep_factor != 2 && microstep_factor != 4 &&
      microstep_factor != 8 && microstep_factor != 16 && microstep_factor != 32) {
    throw std::invalid_argument("microstep factor must be 1, 2, 4, 8, 16 or 32");
  }
  if (!(std::abs(delta_theta_rad) <= kPi + 1e-12)) {
    throw std::invalid_argument("|delta theta| exceeds pi");
  }
  // six screw revolutions of 200 full steps per half circle
  return std::lround(delta_theta_rad / kPi * 6.0 * 200.0 * microstep_factor);
}

std::vector<StepCommand> steps_for_schedule(const ControlSchedule& schedule, int microstep_factor,
                                            double rate_sps) {
  if (!(rate_sps > 0.0)) {
    throw std::invalid_argument("step rate must be positive");
  }
  std::vector<StepCommand> commands;
  for (const ScheduleSegment& seg : schedule.segments) {
    StepCommand cmd;
    cmd.arc = seg.driven_arc;
    cmd.steps = theta_to_steps(seg.theta_to_rad - seg.theta_from_rad, microstep_factor);
    cmd.rate_sps = rate_sps;
    commands.push_back(cmd);
  }
  return commands;
}

void write_step_csv(std::ostream& out, const std::vector<StepCommand>& commands) {
  out << "arc,steps,rate_sps\n";
  for (const StepCommand& c : commands) {
    out << to_string(c.arc) << ',' << c.steps << ',' << g17(c.rate_sps) << '\n';
  }
}

}  // namespace arcroll
