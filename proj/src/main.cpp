#include "arcroll/boundary.hpp"
#include "arcroll/config.hpp"
#include "arcroll/format.hpp"
#include "arcroll/plots.hpp"
#include "arcroll/telemetry.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace arcroll;
using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::invalid_argument("cannot write file '" + path + "'");
  }
  return out;
}

ArcId parse_arc(const std::string& name) {
  if (name == "arc1") return ArcId::Arc1;
  if (name == "arc2") return ArcId::Arc2;
  throw std::invalid_argument("arc must be 'arc1' or 'arc2', got '" + name + "'");
}

void require_keys(const json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) {
      throw std::invalid_argument("unknown key '" + key + "' in " + where);
    }
  }
  for (const char* k : required) {
    if (!j.contains(k)) {
      throw std::invalid_argument("missing key '" + std::string(k) + "' in " + where);
    }
  }
}

double number_at(const json& j, const char* key, const std::string& where) {
  if (!j.at(key).is_number()) {
    throw std::invalid_argument("key '" + std::string(key) + "' in " + where +
                                " must be a number");
  }
  return j.at(key).get<double>();
}

// Schedule file: {"start": {"state": "S1", "theta1_deg": 90, "theta2_deg": 0},
//                 "segments": [{"arc": "arc1", "from_deg": 90, "to_deg": 180,
//                               "increment_deg": 10?}, ...]}
struct ScheduleFile {
  LocomotionState state = LocomotionState::S1;
  double theta1_deg = 0.0;
  double theta2_deg = 0.0;
  ControlSchedule schedule;
};

ScheduleFile parse_schedule_file(const std::string& text, double default_increment_deg) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("schedule is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("schedule must be a JSON object");
  require_keys(j, {"start", "segments"}, {}, "schedule");
  const json& start = j.at("start");
  if (!start.is_object()) throw std::invalid_argument("schedule 'start' must be an object");
  require_keys(start, {"state", "theta1_deg", "theta2_deg"}, {}, "schedule start");

  ScheduleFile out;
  out.state = parse_state(start.at("state").get<std::string>());
  out.theta1_deg = number_at(start, "theta1_deg", "schedule start");
  out.theta2_deg = number_at(start, "theta2_deg", "schedule start");
  const json& segments = j.at("segments");
  if (!segments.is_array()) throw std::invalid_argument("schedule 'segments' must be an array");
  for (const json& seg : segments) {
    require_keys(seg, {"arc", "from_deg", "to_deg"}, {"increment_deg"}, "schedule segment");
    ScheduleSegment s;
    s.driven_arc = parse_arc(seg.at("arc").get<std::string>());
    s.theta_from_rad = deg_to_rad(number_at(seg, "from_deg", "schedule segment"));
    s.theta_to_rad = deg_to_rad(number_at(seg, "to_deg", "schedule segment"));
    const double inc = seg.contains("increment_deg")
                           ? number_at(seg, "increment_deg", "schedule segment")
                           : default_increment_deg;
    s.increment_rad = deg_to_rad(inc);
    out.schedule.segments.push_back(s);
  }
  return out;
}

std::string waypoints_text(const ControlPath& path) {
  std::string text;
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    const PathWaypoint& w = path.waypoints[i];
    if (i > 0) text += " -> ";
    text += "(" + std::string(to_string(w.state)) + "," + g17(w.theta1_deg) + "," +
            g17(w.theta2_deg) + ")";
  }
  return text;
}

struct Options {
  std::string config_path;
  std::string out_prefix = "arcroll";
  int workers = 1;

  RunConfig config() const {
    RunConfig c = config_path.empty() ? RunConfig{} : load_run_config_file(config_path);
    c.validate();
    return c;
  }
};

int cmd_simulate(const Options& opt, const std::string& schedule_path) {
  const RunConfig cfg = opt.config();
  const RobotParams params = cfg.robot();
  const ScheduleFile sched =
      parse_schedule_file(read_file(schedule_path), cfg.increment_deg);
  const EquilibriumConfig start = solve_equilibrium(
      params, sched.state,
      ControlInput(deg_to_rad(sched.theta1_deg), deg_to_rad(sched.theta2_deg)),
      PivotAnchor{0.0, 0.0});
  const Trajectory traj = run_sequence(params, start, sched.schedule);

  {
    std::ofstream out = open_out(opt.out_prefix + "_trajectory.csv");
    write_trajectory_csv(out, traj);
  }
  {
    std::ofstream out = open_out(opt.out_prefix + "_top.svg");
    write_trajectory_top_svg(out, traj);
  }
  {
    std::ofstream out = open_out(opt.out_prefix + "_side.svg");
    write_trajectory_side_svg(out, traj);
  }

  std::size_t events = 0;
  for (const TrajectorySample& s : traj.samples) events += s.event.has_value();
  std::cout << "samples=" << traj.samples.size() << " events=" << events << "\n";
  if (traj.samples.size() > 1) {
    const TrajectoryMetrics m = trajectory_metrics(traj, deg_to_rad(cfg.shift_rate_deg_s));
    std::cout << "path_mm=" << g17(m.path_length_mm) << " net_mm=" << g17(m.net_displacement_mm)
              << " duration_s=" << g17(m.duration_s) << " bl_per_s=" << g17(m.speed_bl_per_s)
              << "\n";
  }
  return 0;
}

int cmd_map(const Options& opt, const std::string& state_name, double res_deg) {
  const RunConfig cfg = opt.config();
  const double res = res_deg > 0.0 ? res_deg : cfg.grid_resolution_deg;
  const EquilibriumMap map =
      map_equilibria(cfg.robot(), parse_state(state_name), res, opt.workers);
  const std::vector<BoundaryCurve> curves = extract_boundaries(map);
  {
    std::ofstream out = open_out(opt.out_prefix + "_map.csv");
    write_map_csv(out, map);
  }
  {
    std::ofstream out = open_out(opt.out_prefix + "_map.svg");
    write_map_svg(out, map, curves);
  }
  int counts[4] = {0, 0, 0, 0};
  for (const MapCell& c : map.cells) ++counts[static_cast<int>(c.status)];
  const int n = map.nodes_per_axis();
  std::cout << "nodes=" << n << "x" << n << " ok=" << counts[0] << " at_endpoint=" << counts[1]
            << " no_equilibrium=" << counts[2] << " failed=" << counts[3]
            << " curves=" << curves.size() << "\n";
  return 0;
}

int cmd_plan(const Options& opt, const std::string& from_name, double t1_deg, double t2_deg,
             const std::string& target_name, const std::string& mode) {
  const RunConfig cfg = opt.config();
  const LocomotionState from = parse_state(from_name);
  const LocomotionState target = parse_state(target_name);
  if (mode != "intuitive" && mode != "non_intuitive" && mode != "both") {
    throw std::invalid_argument("mode must be intuitive, non_intuitive or both");
  }
  std::vector<EquilibriumMap> maps;
  maps.push_back(map_equilibria(cfg.robot(), from, cfg.grid_resolution_deg, opt.workers));

  std::ostringstream report;
  double intuitive_cost = -1.0;
  if (mode != "non_intuitive") {
    const ControlPath p =
        plan_transition(maps, from, t1_deg, t2_deg, target, PathMode::Intuitive);
    intuitive_cost = p.cost_deg;
    report << "intuitive cost_deg=" << g17(p.cost_deg) << " waypoints=" << waypoints_text(p)
           << "\n";
  }
  if (mode != "intuitive") {
    try {
      const ControlPath p =
          plan_transition(maps, from, t1_deg, t2_deg, target, PathMode::NonIntuitive);
      report << "non_intuitive cost_deg=" << g17(p.cost_deg)
             << " waypoints=" << waypoints_text(p) << "\n";
      if (mode == "both") {
        report << (p.cost_deg <= intuitive_cost ? "non_intuitive saves_deg="
                                                : "non_intuitive loses_deg=")
               << g17(std::abs(intuitive_cost - p.cost_deg)) << "\n";
      }
    } catch (const NoBoundaryInRange& e) {
      if (mode != "both") throw;
      report << "non_intuitive unavailable: " << e.what() << "\n";
    }
  }
  std::cout << report.str();
  std::ofstream out = open_out(opt.out_prefix + "_plan.txt");
  out << report.str();
  return 0;
}

int cmd_compare(const Options& opt, const std::string& trajectory_path,
                const std::string& mocap_path) {
  const RunConfig cfg = opt.config();
  std::ifstream tin(trajectory_path);
  if (!tin) {
    throw std::invalid_argument("cannot open file '" + trajectory_path + "'");
  }
  const Trajectory traj = read_trajectory_csv(tin, cfg.robot());
  const std::vector<MocapFrame> frames = parse_mocap_csv(read_file(mocap_path));
  const AlignmentResult a =
      align_trajectories(traj, frames, deg_to_rad(cfg.shift_rate_deg_s));

  std::ofstream out = open_out(opt.out_prefix + "_residuals.csv");
  out << "sample,residual_mm\n";
  for (std::size_t i = 0; i < a.residuals_mm.size(); ++i) {
    out << i << ',' << g17(a.residuals_mm[i]) << '\n';
  }
  std::cout << "yaw_deg=" << g17(rad_to_deg(a.yaw_rad)) << " tx_mm=" << g17(a.tx_mm)
            << " ty_mm=" << g17(a.ty_mm) << " rmse_mm=" << g17(a.rmse_mm)
            << " matched=" << a.residuals_mm.size() << "\n";
  return 0;
}

int cmd_impact(const Options& opt, const std::string& imu_path, double band, double hold) {
  const ImpactAnalysis a = detect_impact_settling(parse_imu_csv(read_file(imu_path)), band, hold);
  std::ostringstream report;
  report << "impact_time_s=" << g17(a.impact_time_s)
         << " settle_duration_s=" << g17(a.settle_duration_s) << "\n";
  for (const std::string& w : a.warnings) report << "warning: " << w << "\n";
  std::cout << report.str();
  std::ofstream out = open_out(opt.out_prefix + "_impact.txt");
  out << report.str();
  return 0;
}

int cmd_steps(const Options& opt, double deg, bool have_deg, const std::string& schedule_path) {
  const RunConfig cfg = opt.config();
  const double steps_per_half_turn =
      static_cast<double>(cfg.revs_per_arc) * cfg.steps_per_rev * cfg.microstep_factor;
  if (have_deg) {
    if (!(std::abs(deg) <= 180.0)) {
      throw std::invalid_argument("|deg| must be at most 180");
    }
    const long steps = std::lround(deg / 180.0 * steps_per_half_turn);
    std::cout << "steps=" << steps << "\n";
    return 0;
  }
  const ScheduleFile sched = parse_schedule_file(read_file(schedule_path), cfg.increment_deg);
  const double rate_sps = cfg.shift_rate_deg_s / 180.0 * steps_per_half_turn;
  const std::vector<StepCommand> commands =
      steps_for_schedule(sched.schedule, cfg.microstep_factor, rate_sps);
  std::ofstream out = open_out(opt.out_prefix + "_steps.csv");
  write_step_csv(out, commands);
  std::cout << "commands=" << commands.size() << " rate_sps=" << g17(rate_sps) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curved-arc rolling robot: simulation, mapping, planning and telemetry analysis"};
  app.require_subcommand(1);

  Options opt;
  app.add_option("--config", opt.config_path, "JSON run configuration file");
  app.add_option("--out", opt.out_prefix, "output file prefix");
  app.add_option("--workers", opt.workers, "worker threads for map solving")
      ->check(CLI::PositiveNumber);

  std::string schedule_path, state_name = "S1", from_name = "S1", target_name, mode = "both";
  std::string trajectory_path, mocap_path, imu_path;
  double res_deg = -1.0, t1_deg = 0.0, t2_deg = 0.0, band = 0.5, hold = 1.0, deg = 0.0;

  CLI::App* simulate = app.add_subcommand("simulate", "run a control schedule quasistatically");
  simulate->add_option("--schedule", schedule_path, "schedule JSON file")->required();

  CLI::App* map_cmd = app.add_subcommand("map", "solve the equilibrium map for one state");
  map_cmd->add_option("--state", state_name, "locomotion state (S1..S4)");
  map_cmd->add_option("--res", res_deg, "grid resolution in degrees");

  CLI::App* plan = app.add_subcommand("plan", "plan a state transition");
  plan->add_option("--from", from_name, "current state");
  plan->add_option("--t1", t1_deg, "current theta1 in degrees");
  plan->add_option("--t2", t2_deg, "current theta2 in degrees");
  plan->add_option("--target", target_name, "target state")->required();
  plan->add_option("--mode", mode, "intuitive, non_intuitive or both");

  CLI::App* compare = app.add_subcommand("compare", "align a capture file to a trajectory");
  compare->add_option("--trajectory", trajectory_path, "simulated trajectory CSV")->required();
  compare->add_option("--mocap", mocap_path, "motion capture CSV")->required();

  CLI::App* impact = app.add_subcommand("impact", "impact settling time from IMU data");
  impact->add_option("--imu", imu_path, "IMU CSV file")->required();
  impact->add_option("--band", band, "quiet band in m/s^2");
  impact->add_option("--hold", hold, "required quiet hold in seconds");

  CLI::App* steps = app.add_subcommand("steps", "convert mass travel to stepper steps");
  CLI::Option* deg_opt = steps->add_option("--deg", deg, "angular travel in degrees");
  CLI::Option* sched_opt =
      steps->add_option("--schedule", schedule_path, "schedule JSON file to convert");
  deg_opt->excludes(sched_opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(opt, schedule_path);
    if (map_cmd->parsed()) return cmd_map(opt, state_name, res_deg);
    if (plan->parsed()) return cmd_plan(opt, from_name, t1_deg, t2_deg, target_name, mode);
    if (compare->parsed()) return cmd_compare(opt, trajectory_path, mocap_path);
    if (impact->parsed()) return cmd_impact(opt, imu_path, band, hold);
    if (steps->parsed()) {
      if (!*deg_opt && !*sched_opt) {
        throw std::invalid_argument("steps needs --deg or --schedule");
      }
      return cmd_steps(opt, deg, static_cast<bool>(*deg_opt), schedule_path);
    }
    throw std::invalid_argument("no command given");
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
