// Python bindings for the arcroll core library.
#include "arcroll/boundary.hpp"
#include "arcroll/config.hpp"
#include "arcroll/hybrid_sim.hpp"
#include "arcroll/telemetry.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

namespace py = pybind11;
using namespace arcroll;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write file '" + path + "'");
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Two-arc rolling chassis: equilibria, rolling sequences, transition "
            "maps and telemetry analysis";

  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

  // ---------------------------------------------------------------- geometry
  py::enum_<ArcId>(m, "ArcId").value("Arc1", ArcId::Arc1).value("Arc2", ArcId::Arc2);

  py::class_<ArcParams>(m, "ArcParams")
      .def(py::init<>())
      .def(py::init([](double radius_mm, double arc_mass_g, double shift_mass_g) {
             return ArcParams{radius_mm, arc_mass_g, shift_mass_g};
           }),
           py::arg("radius_mm"), py::arg("arc_mass_g"), py::arg("shift_mass_g"))
      .def_readwrite("radius_mm", &ArcParams::radius_mm)
      .def_readwrite("arc_mass_g", &ArcParams::arc_mass_g)
      .def_readwrite("shift_mass_g", &ArcParams::shift_mass_g);

  py::class_<RobotParams>(m, "RobotParams")
      .def(py::init<>())
      .def_static("prototype", &RobotParams::prototype)
      .def_readwrite("arc1", &RobotParams::arc1)
      .def_readwrite("arc2", &RobotParams::arc2)
      .def_readwrite("body_length_mm", &RobotParams::body_length_mm)
      .def("radius_mm", &RobotParams::radius_mm)
      .def("total_mass_g", &RobotParams::total_mass_g)
      .def("validate", &RobotParams::validate);

  py::class_<ControlInput>(m, "ControlInput")
      .def(py::init<>())
      .def(py::init<double, double>(), py::arg("theta1_rad"), py::arg("theta2_rad"))
      .def_readwrite("theta1_rad", &ControlInput::theta1_rad)
      .def_readwrite("theta2_rad", &ControlInput::theta2_rad)
      .def("theta", py::overload_cast<ArcId>(&ControlInput::theta, py::const_));

  py::class_<ContactAngles>(m, "ContactAngles")
      .def(py::init<>())
      .def_readwrite("phi1_rad", &ContactAngles::phi1_rad)
      .def_readwrite("phi2_rad", &ContactAngles::phi2_rad)
      .def("phi", py::overload_cast<ArcId>(&ContactAngles::phi, py::const_));

  py::class_<RigidTransform>(m, "RigidTransform")
      .def(py::init<>())
      .def_static("identity", &RigidTransform::identity)
      .def_readwrite("rotation", &RigidTransform::rotation)
      .def_readwrite("translation", &RigidTransform::translation)
      .def("apply", &RigidTransform::apply)
      .def("rotate", &RigidTransform::rotate)
      .def("compose", &RigidTransform::compose)
      .def("inverse", &RigidTransform::inverse)
      .def("is_orthonormal", &RigidTransform::is_orthonormal, py::arg("tol") = 1e-9);

  m.def("mass_position_body", &mass_position_body);
  m.def("contact_position_body", &contact_position_body);
  m.def("com_body", &com_body);

  // ------------------------------------------------------------- equilibrium
  py::enum_<LocomotionState>(m, "LocomotionState")
      .value("S1", LocomotionState::S1)
      .value("S2", LocomotionState::S2)
      .value("S3", LocomotionState::S3)
      .value("S4", LocomotionState::S4);

  m.def("pivot_arc", &pivot_arc);
  m.def("pivot_phi_rad", &pivot_phi_rad);
  m.def("rolling_arc", &rolling_arc);
  m.def("state_for_pivot", &state_for_pivot);

  py::class_<PivotAnchor>(m, "PivotAnchor")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return PivotAnchor{x, y}; }), py::arg("x_mm"),
           py::arg("y_mm"))
      .def_readwrite("x_mm", &PivotAnchor::x_mm)
      .def_readwrite("y_mm", &PivotAnchor::y_mm);

  py::class_<EquilibriumConfig>(m, "EquilibriumConfig")
      .def_readonly("state", &EquilibriumConfig::state)
      .def_readonly("control", &EquilibriumConfig::control)
      .def_readonly("contacts", &EquilibriumConfig::contacts)
      .def_readonly("pose", &EquilibriumConfig::pose)
      .def_readonly("com_world", &EquilibriumConfig::com_world)
      .def_readonly("potential_mm", &EquilibriumConfig::potential_mm)
      .def_readonly("contact_at_endpoint", &EquilibriumConfig::contact_at_endpoint);

  m.def("potential_energy", &potential_energy);
  m.def("solve_equilibrium",
        py::overload_cast<const RobotParams&, LocomotionState, const ControlInput&,
                          const PivotAnchor&>(&solve_equilibrium),
        py::arg("params"), py::arg("state"), py::arg("control"),
        py::arg("anchor") = PivotAnchor{});
  m.def("solve_equilibrium",
        py::overload_cast<const RobotParams&, LocomotionState, const ControlInput&,
                          const PivotAnchor&, const EquilibriumConfig&>(&solve_equilibrium),
        py::arg("params"), py::arg("state"), py::arg("control"), py::arg("anchor"),
        py::arg("predecessor"));
  m.def("oracle_equilibrium", &oracle_equilibrium, py::arg("params"), py::arg("state"),
        py::arg("control"), py::arg("anchor"), py::arg("grid_deg"));

  // -------------------------------------------------------------- simulation
  py::class_<ScheduleSegment>(m, "ScheduleSegment")
      .def(py::init<>())
      .def(py::init([](ArcId arc, double from_rad, double to_rad, double increment_rad) {
             return ScheduleSegment{arc, from_rad, to_rad, increment_rad};
           }),
           py::arg("driven_arc"), py::arg("theta_from_rad"), py::arg("theta_to_rad"),
           py::arg("increment_rad") = deg_to_rad(10.0))
      .def_readwrite("driven_arc", &ScheduleSegment::driven_arc)
      .def_readwrite("theta_from_rad", &ScheduleSegment::theta_from_rad)
      .def_readwrite("theta_to_rad", &ScheduleSegment::theta_to_rad)
      .def_readwrite("increment_rad", &ScheduleSegment::increment_rad);

  py::class_<ControlSchedule>(m, "ControlSchedule")
      .def(py::init<>())
      .def(py::init([](std::vector<ScheduleSegment> segments) {
             ControlSchedule s;
             s.segments = std::move(segments);
             return s;
           }),
           py::arg("segments"))
      .def_readwrite("segments", &ControlSchedule::segments);

  py::enum_<TransitionKind>(m, "TransitionKind")
      .value("IntuitiveEndpoint", TransitionKind::IntuitiveEndpoint)
      .value("NonIntuitiveJump", TransitionKind::NonIntuitiveJump);

  py::class_<TransitionEvent>(m, "TransitionEvent")
      .def_readonly("kind", &TransitionEvent::kind)
      .def_readonly("from_state", &TransitionEvent::from_state)
      .def_readonly("to_state", &TransitionEvent::to_state)
      .def_readonly("handover_world", &TransitionEvent::handover_world)
      .def_readonly("step_index", &TransitionEvent::step_index);

  py::class_<TrajectorySample>(m, "TrajectorySample")
      .def_readonly("step_index", &TrajectorySample::step_index)
      .def_readonly("state", &TrajectorySample::state)
      .def_readonly("control", &TrajectorySample::control)
      .def_readonly("contacts", &TrajectorySample::contacts)
      .def_readonly("pose", &TrajectorySample::pose)
      .def_readonly("com_world", &TrajectorySample::com_world)
      .def_readonly("q1_world", &TrajectorySample::q1_world)
      .def_readonly("q2_world", &TrajectorySample::q2_world)
      .def_readonly("event", &TrajectorySample::event);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("params", &Trajectory::params)
      .def_readonly("samples", &Trajectory::samples);

  py::class_<TrajectoryMetrics>(m, "TrajectoryMetrics")
      .def_readonly("path_length_mm", &TrajectoryMetrics::path_length_mm)
      .def_readonly("net_displacement_mm", &TrajectoryMetrics::net_displacement_mm)
      .def_readonly("duration_s", &TrajectoryMetrics::duration_s)
      .def_readonly("speed_bl_per_s", &TrajectoryMetrics::speed_bl_per_s);

  m.def("run_sequence", &run_sequence, py::arg("params"), py::arg("start"),
        py::arg("schedule"));
  m.def("trajectory_metrics", &trajectory_metrics, py::arg("trajectory"),
        py::arg("shift_rate_rad_s"));
  m.def("write_trajectory_csv",
        [](const std::string& path, const Trajectory& traj) {
          std::ofstream out = open_out(path);
          write_trajectory_csv(out, traj);
        },
        py::arg("path"), py::arg("trajectory"));
  m.def("read_trajectory_csv",
        [](const std::string& path, const RobotParams& params) {
          std::ifstream in = open_in(path);
          return read_trajectory_csv(in, params);
        },
        py::arg("path"), py::arg("params"));

  // ---------------------------------------------------- map, boundaries, plan
  py::enum_<CellStatus>(m, "CellStatus")
      .value("Ok", CellStatus::Ok)
      .value("AtEndpoint", CellStatus::AtEndpoint)
      .value("NoEquilibrium", CellStatus::NoEquilibrium)
      .value("Failed", CellStatus::Failed);

  py::class_<MapCell>(m, "MapCell")
      .def_readonly("phi1_rad", &MapCell::phi1_rad)
      .def_readonly("phi2_rad", &MapCell::phi2_rad)
      .def_readonly("status", &MapCell::status);

  py::class_<EquilibriumMap>(m, "EquilibriumMap")
      .def_readonly("params", &EquilibriumMap::params)
      .def_readonly("state", &EquilibriumMap::state)
      .def_readonly("resolution_deg", &EquilibriumMap::resolution_deg)
      .def_readonly("cells", &EquilibriumMap::cells)
      .def("nodes_per_axis", &EquilibriumMap::nodes_per_axis)
      .def("at", py::overload_cast<int, int>(&EquilibriumMap::at, py::const_), py::arg("i"),
           py::arg("j"));

  py::class_<BoundaryCurve>(m, "BoundaryCurve")
      .def_readonly("from_state", &BoundaryCurve::from_state)
      .def_readonly("to_state", &BoundaryCurve::to_state)
      .def_readonly("points_deg", &BoundaryCurve::points_deg);

  py::enum_<PathMode>(m, "PathMode")
      .value("Intuitive", PathMode::Intuitive)
      .value("NonIntuitive", PathMode::NonIntuitive);

  py::class_<PathWaypoint>(m, "PathWaypoint")
      .def(py::init([](LocomotionState state, double t1, double t2) {
             return PathWaypoint{state, t1, t2};
           }),
           py::arg("state"), py::arg("theta1_deg"), py::arg("theta2_deg"))
      .def_readwrite("state", &PathWaypoint::state)
      .def_readwrite("theta1_deg", &PathWaypoint::theta1_deg)
      .def_readwrite("theta2_deg", &PathWaypoint::theta2_deg);

  py::class_<ControlPath>(m, "ControlPath")
      .def_readonly("mode", &ControlPath::mode)
      .def_readonly("waypoints", &ControlPath::waypoints)
      .def_readonly("cost_deg", &ControlPath::cost_deg);

  m.def("map_equilibria", &map_equilibria, py::arg("params"), py::arg("state"),
        py::arg("resolution_deg"), py::arg("workers") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("extract_boundaries", &extract_boundaries, py::arg("map"));
  m.def("plan_transition", &plan_transition, py::arg("maps"), py::arg("from_state"),
        py::arg("theta1_deg"), py::arg("theta2_deg"), py::arg("target"), py::arg("mode"));
  m.def("path_cost", &path_cost, py::arg("path"));
  m.def("write_map_csv",
        [](const std::string& path, const EquilibriumMap& map) {
          std::ofstream out = open_out(path);
          write_map_csv(out, map);
        },
        py::arg("path"), py::arg("map"));

  // --------------------------------------------------------------- telemetry
  py::class_<ImuSample>(m, "ImuSample")
      .def(py::init<>())
      .def(py::init([](double time_s, const Vec3& accel_ms2) {
             ImuSample s;
             s.time_s = time_s;
             s.accel_ms2 = accel_ms2;
             return s;
           }),
           py::arg("time_s"), py::arg("accel_ms2"))
      .def_readwrite("time_s", &ImuSample::time_s)
      .def_readwrite("accel_ms2", &ImuSample::accel_ms2);

  py::class_<ImpactAnalysis>(m, "ImpactAnalysis")
      .def_readonly("impact_time_s", &ImpactAnalysis::impact_time_s)
      .def_readonly("settle_duration_s", &ImpactAnalysis::settle_duration_s)
      .def_readonly("warnings", &ImpactAnalysis::warnings);

  m.def("detect_impact_settling", &detect_impact_settling, py::arg("samples"),
        py::arg("quiet_band_ms2") = 0.5, py::arg("hold_s") = 1.0);

  py::class_<StepCommand>(m, "StepCommand")
      .def_readonly("arc", &StepCommand::arc)
      .def_readonly("steps", &StepCommand::steps)
      .def_readonly("rate_sps", &StepCommand::rate_sps);

  m.def("theta_to_steps", &theta_to_steps, py::arg("delta_theta_rad"),
        py::arg("microstep_factor"));
  m.def("steps_for_schedule", &steps_for_schedule, py::arg("schedule"),
        py::arg("microstep_factor"), py::arg("rate_sps"));

  // ------------------------------------------------------------------ config
  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("radius_mm", &RunConfig::radius_mm)
      .def_readwrite("arc_mass_g", &RunConfig::arc_mass_g)
      .def_readwrite("shift_mass_g", &RunConfig::shift_mass_g)
      .def_readwrite("body_length_mm", &RunConfig::body_length_mm)
      .def_readwrite("steps_per_rev", &RunConfig::steps_per_rev)
      .def_readwrite("revs_per_arc", &RunConfig::revs_per_arc)
      .def_readwrite("microstep_factor", &RunConfig::microstep_factor)
      .def_readwrite("grid_resolution_deg", &RunConfig::grid_resolution_deg)
      .def_readwrite("increment_deg", &RunConfig::increment_deg)
      .def_readwrite("shift_rate_deg_s", &RunConfig::shift_rate_deg_s)
      .def("robot", &RunConfig::robot)
      .def("validate", &RunConfig::validate);

  m.def("load_run_config", &load_run_config, py::arg("text"));
  m.def("load_run_config_file", &load_run_config_file, py::arg("path"));
  m.def("save_run_config",
        [](const std::string& path, const RunConfig& config) {
          std::ofstream out = open_out(path);
          save_run_config(out, config);
        },
        py::arg("path"), py::arg("config"));
}
