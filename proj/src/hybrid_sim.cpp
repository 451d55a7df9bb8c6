#include "arcroll/hybrid_sim.hpp"

#include "arcroll/format.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace arcroll {

namespace {

constexpr double kEndpointTolRad = deg_to_rad(0.5);
constexpr double kJumpTolRad = deg_to_rad(5.0);

TrajectorySample make_sample(const RobotParams& params, int step, const EquilibriumConfig& cfg,
                             std::optional<TransitionEvent> event) {
  TrajectorySample s;
  s.step_index = step;
  s.state = cfg.state;
  s.control = cfg.control;
  s.contacts = cfg.contacts;
  s.pose = cfg.pose;
  s.com_world = cfg.com_world;
  s.q1_world = cfg.pose.apply(contact_position_body(params, ArcId::Arc1, cfg.contacts.phi1_rad));
  s.q2_world = cfg.pose.apply(contact_position_body(params, ArcId::Arc2, cfg.contacts.phi2_rad));
  s.event = std::move(event);
  return s;
}

void validate_segment(const ScheduleSegment& seg) {
  if (!(seg.increment_rad > 0.0)) {
    throw std::invalid_argument("schedule increment must be positive");
  }
  for (double t : {seg.theta_from_rad, seg.theta_to_rad}) {
    if (!(t >= 0.0 && t <= kPi)) {
      throw std::invalid_argument("schedule theta outside [0, pi]");
    }
  }
}

// Reinterprets an endpoint-arrival configuration in the state it borders:
// the rolling arc's endpoint becomes the pivot and the old pivot becomes the
// rolling contact, with the pose untouched.
EquilibriumConfig reinterpret_at_handover(const EquilibriumConfig& arrival,
                                          LocomotionState to_state) {
  EquilibriumConfig hand = arrival;
  hand.state = to_state;
  hand.contacts.phi(pivot_arc(to_state)) = pivot_phi_rad(to_state);
  hand.contacts.phi(rolling_arc(to_state)) = pivot_phi_rad(arrival.state);
  hand.contact_at_endpoint = true;
  return hand;
}

struct SimCursor {
  EquilibriumConfig cfg;
  PivotAnchor anchor;
  int step = 0;
};

// `arrival` is an at-endpoint configuration of cur.cfg.state. Hands the pivot
// over (repeatedly, if the landing state is itself at an endpoint) and leaves
// the cursor on the settled configuration.
void resolve_transition(const RobotParams& params, std::vector<TrajectorySample>& samples,
                        SimCursor& cur, EquilibriumConfig arrival) {
  for (int hops = 0;; ++hops) {
    if (hops > 8) {
      throw SolverError("pivot handover cascade did not settle");
    }
    const LocomotionState from = arrival.state;
    const double phi_roll = arrival.contacts.phi(rolling_arc(from));
    const LocomotionState to = state_for_pivot(rolling_arc(from), phi_roll);
    const Vec3 handover_world =
        arrival.pose.apply(contact_position_body(params, rolling_arc(from), phi_roll));
    const PivotAnchor new_anchor{handover_world.x(), handover_world.y()};

    const EquilibriumConfig hand = reinterpret_at_handover(arrival, to);
    const EquilibriumConfig resolved =
        solve_equilibrium(params, to, arrival.control, new_anchor, hand);
    const double dphi = std::abs(resolved.contacts.phi(rolling_arc(to)) -
                                 hand.contacts.phi(rolling_arc(to)));

    TransitionEvent event;
    event.kind =
        dphi > kJumpTolRad ? TransitionKind::NonIntuitiveJump : TransitionKind::IntuitiveEndpoint;
    event.from_state = from;
    event.to_state = to;
    event.handover_world = handover_world;
    event.step_index = cur.step;
    samples.push_back(make_sample(params, cur.step, arrival, event));

    if (dphi <= kEndpointTolRad) {
      // The new state's rest configuration is the handover configuration
      // itself; the next schedule step continues from here.
      cur.cfg = resolved;
      cur.anchor = new_anchor;
      return;
    }

    // The robot moves to the new rest configuration with no control change.
    ++cur.step;
    if (!resolved.contact_at_endpoint) {
      samples.push_back(make_sample(params, cur.step, resolved, std::nullopt));
      cur.cfg = resolved;
      cur.anchor = new_anchor;
      return;
    }
    // Settled at the far endpoint of the new state: another handover.
    arrival = resolved;
    cur.anchor = new_anchor;
  }
}


}  // namespace

const char* to_string(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::IntuitiveEndpoint:
      return "IntuitiveEndpoint";
    case TransitionKind::NonIntuitiveJump:
      return "NonIntuitiveJump";
  }
  throw std::invalid_argument("bad TransitionKind");
}

Trajectory run_sequence(const RobotParams& params, const EquilibriumConfig& start,
                        const ControlSchedule& schedule) {
  params.validate();
  for (const ScheduleSegment& seg : schedule.segments) {
    validate_segment(seg);
  }

  Trajectory traj;
  traj.params = params;

  SimCursor cur;
  cur.cfg = start;
  const Vec3 pivot_w = start.pose.apply(
      contact_position_body(params, pivot_arc(start.state), pivot_phi_rad(start.state)));
  cur.anchor = PivotAnchor{pivot_w.x(), pivot_w.y()};
  traj.samples.push_back(make_sample(params, cur.step, start, std::nullopt));

  for (const ScheduleSegment& seg : schedule.segments) {
    if (std::abs(cur.cfg.control.theta(seg.driven_arc) - seg.theta_from_rad) > 1e-9) {
      throw std::invalid_argument("segment theta_from does not match the current control");
    }
    const double span = seg.theta_to_rad - seg.theta_from_rad;
    const double dir = span >= 0.0 ? 1.0 : -1.0;
    const int nsteps = static_cast<int>(std::ceil(std::abs(span) / seg.increment_rad - 1e-12));
    for (int k = 1; k <= nsteps; ++k) {
      if (seg.driven_arc == pivot_arc(cur.cfg.state)) {
        throw ScheduleStateMismatch("segment drives the pivot arc of state " +
                                    std::string(to_string(cur.cfg.state)));
      }
      const double theta_k =
          k == nsteps ? seg.theta_to_rad : seg.theta_from_rad + dir * k * seg.increment_rad;
      ControlInput next = cur.cfg.control;
      next.theta(seg.driven_arc) = theta_k;

      EquilibriumConfig solved;
      try {
        solved = solve_equilibrium(params, cur.cfg.state, next, cur.anchor, cur.cfg);
      } catch (const SolverError& e) {
        throw SolverError("step " + std::to_string(cur.step + 1) + ": " + e.what());
      }
      ++cur.step;
      if (!solved.contact_at_endpoint) {
        traj.samples.push_back(make_sample(params, cur.step, solved, std::nullopt));
        cur.cfg = solved;
        continue;
      }
      resolve_transition(params, traj.samples, cur, solved);
    }
  }
  return traj;
}

PivotAnchor handover_pivot(const RobotParams& params, const TrajectorySample& current,
                           const TransitionEvent& event) {
  const Vec3 p = current.pose.apply(
      contact_position_body(params, pivot_arc(event.to_state), pivot_phi_rad(event.to_state)));
  return PivotAnchor{p.x(), p.y()};
}

Vec3 nominal_transition_displacement(double radius_mm, LocomotionState from, LocomotionState to,
                                     double theta_rad) {
  if (!(radius_mm > 0.0)) {
    throw std::domain_error("radius must be positive");
  }
  const double z = std::sqrt(radius_mm) / 2.0;
  const bool plus = (from == LocomotionState::S1 && to == LocomotionState::S4) ||
                    (from == LocomotionState::S2 && to == LocomotionState::S3);
  const bool minus = (from == LocomotionState::S4 && to == LocomotionState::S2) ||
                     (from == LocomotionState::S3 && to == LocomotionState::S1);
  if (!plus && !minus) {
    throw std::domain_error(std::string("no displacement form for transition ") +
                            to_string(from) + "->" + to_string(to));
  }
  const double sign = plus ? 1.0 : -1.0;
  return Vec3(std::cos(theta_rad), sign * std::sin(theta_rad), z);
}

TrajectoryMetrics trajectory_metrics(const Trajectory& traj, double shift_rate_rad_s) {
  if (!(shift_rate_rad_s > 0.0)) {
    throw std::invalid_argument("shift rate must be positive");
  }
  if (traj.samples.empty()) {
    throw std::invalid_argument("empty trajectory");
  }
  TrajectoryMetrics m;
  double travel = 0.0;
  for (size_t i = 1; i < traj.samples.size(); ++i) {
    const TrajectorySample& a = traj.samples[i - 1];
    const TrajectorySample& b = traj.samples[i];
    travel += std::abs(b.control.theta1_rad - a.control.theta1_rad) +
              std::abs(b.control.theta2_rad - a.control.theta2_rad);
    m.path_length_mm += (b.com_world.head<2>() - a.com_world.head<2>()).norm();
  }
  m.net_displacement_mm =
      (traj.samples.back().com_world.head<2>() - traj.samples.front().com_world.head<2>()).norm();
  m.duration_s = travel / shift_rate_rad_s;
  if (m.duration_s <= 0.0) {
    throw std::domain_error("zero-duration trajectory: speed undefined");
  }
  m.speed_bl_per_s = m.net_displacement_mm / traj.params.body_length_mm / m.duration_s;
  return m;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "step,state,theta1_deg,theta2_deg,phi1_deg,phi2_deg,"
         "r11,r12,r13,r21,r22,r23,r31,r32,r33,ox_mm,oy_mm,oz_mm,"
         "com_x_mm,com_y_mm,com_z_mm,q1x_mm,q1y_mm,q1z_mm,q2x_mm,q2y_mm,q2z_mm,event\n";
  for (const TrajectorySample& s : traj.samples) {
    out << s.step_index << ',' << to_string(s.state) << ','
        << g17(rad_to_deg(s.control.theta1_rad)) << ',' << g17(rad_to_deg(s.control.theta2_rad))
        << ',' << g17(rad_to_deg(s.contacts.phi1_rad)) << ','
        << g17(rad_to_deg(s.contacts.phi2_rad));
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out << ',' << g17(s.pose.rotation(r, c));
      }
    }
    for (int i = 0; i < 3; ++i) {
      out << ',' << g17(s.pose.translation(i));
    }
    for (const Vec3* v : {&s.com_world, &s.q1_world, &s.q2_world}) {
      out << ',' << g17((*v).x()) << ',' << g17((*v).y()) << ',' << g17((*v).z());
    }
    out << ',';
    if (s.event) {
      const TransitionEvent& e = *s.event;
      out << to_string(e.kind) << ':' << to_string(e.from_state) << "->"
          << to_string(e.to_state) << ':' << g17(e.handover_world.x()) << ':'
          << g17(e.handover_world.y()) << ':' << g17(e.handover_world.z());
    }
    out << '\n';
  }
}

Trajectory read_trajectory_csv(std::istream& in, const RobotParams& params) {
  Trajectory traj;
  traj.params = params;
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) {
    throw MissingHeader(1, "empty trajectory file");
  }
  ++line_no;
  if (split_csv_line(line).size() != 28 || split_csv_line(line)[0] != "step") {
    throw MissingHeader(line_no, "bad trajectory header");
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 28) {
      throw BadFieldCount(line_no, "expected 28 fields, got " + std::to_string(f.size()));
    }
    try {
      TrajectorySample s;
      s.step_index = static_cast<int>(parse_long(f[0]));
      s.state = parse_state(f[1]);
      s.control = ControlInput(deg_to_rad(parse_double(f[2])), deg_to_rad(parse_double(f[3])));
      s.contacts.phi1_rad = deg_to_rad(parse_double(f[4]));
      s.contacts.phi2_rad = deg_to_rad(parse_double(f[5]));
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          s.pose.rotation(r, c) = parse_double(f[6 + 3 * r + c]);
        }
      }
      for (int i = 0; i < 3; ++i) {
        s.pose.translation(i) = parse_double(f[15 + i]);
      }
      s.com_world = Vec3(parse_double(f[18]), parse_double(f[19]), parse_double(f[20]));
      s.q1_world = Vec3(parse_double(f[21]), parse_double(f[22]), parse_double(f[23]));
      s.q2_world = Vec3(parse_double(f[24]), parse_double(f[25]), parse_double(f[26]));
      if (!f[27].empty()) {
        std::istringstream es(f[27]);
        std::string kind, pair, x, y, z;
        std::getline(es, kind, ':');
        std::getline(es, pair, ':');
        std::getline(es, x, ':');
        std::getline(es, y, ':');
        std::getline(es, z, ':');
        TransitionEvent e;
        if (kind == "IntuitiveEndpoint") {
          e.kind = TransitionKind::IntuitiveEndpoint;
        } else if (kind == "NonIntuitiveJump") {
          e.kind = TransitionKind::NonIntuitiveJump;
        } else {
          throw std::invalid_argument("bad event kind '" + kind + "'");
        }
        const size_t arrow = pair.find("->");
        if (arrow == std::string::npos) {
          throw std::invalid_argument("bad event states '" + pair + "'");
        }
        e.from_state = parse_state(pair.substr(0, arrow));
        e.to_state = parse_state(pair.substr(arrow + 2));
        e.handover_world = Vec3(parse_double(x), parse_double(y), parse_double(z));
        e.step_index = s.step_index;
        s.event = e;
      }
      if (!traj.samples.empty() && s.step_index <= traj.samples.back().step_index) {
        throw std::invalid_argument("step indices not increasing");
      }
      traj.samples.push_back(std::move(s));
    } catch (const std::invalid_argument& e) {
      throw CsvError("trajectory", line_no, e.what());
    }
  }
  if (traj.samples.empty()) {
    throw CsvError("trajectory", line_no, "no samples");
  }
  return traj;
}

}  // namespace arcroll
