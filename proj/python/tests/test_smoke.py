"""Smoke tests for the Python bindings.

Deep numerical checks live in the C++ suites; these only exercise the
binding surface end to end.
"""

import math

import pytest

import arcroll as ar


def prototype():
    p = ar.RobotParams.prototype()
    p.validate()
    return p


def test_prototype_parameters():
    p = prototype()
    assert p.radius_mm() == 272.5
    assert p.arc1.arc_mass_g == 1300.0
    assert p.arc2.shift_mass_g == 1150.0
    assert p.body_length_mm == 585.0
    assert p.total_mass_g() == 2 * 1300.0 + 2 * 1150.0


def test_body_frame_geometry():
    p = prototype()
    q = ar.contact_position_body(p, ar.ArcId.Arc1, math.pi / 2)
    assert q == pytest.approx([0.0, 272.5, 0.0])
    q2 = ar.contact_position_body(p, ar.ArcId.Arc2, math.pi / 2)
    assert q2 == pytest.approx([0.0, -272.5, 0.0])
    com = ar.com_body(p, ar.ControlInput(math.pi / 2, math.pi / 2))
    assert com[0] == pytest.approx(0.0, abs=1e-12)


def test_solve_equilibrium_and_errors():
    p = prototype()
    cfg = ar.solve_equilibrium(
        p, ar.LocomotionState.S1, ar.ControlInput(math.pi / 2, 0.0), ar.PivotAnchor(0.0, 0.0)
    )
    # Mass 1 parked at the apex, mass 2 at the pivot end: the rolling contact
    # rests at the apex as well, and the pivot stays pinned at its endpoint.
    assert cfg.contacts.phi1_rad == pytest.approx(math.pi / 2, abs=1e-3)
    assert cfg.contacts.phi2_rad == 0.0
    assert cfg.pose.is_orthonormal()
    assert cfg.com_world[2] > 0.0
    assert cfg.potential_mm == pytest.approx(cfg.com_world[2])

    with pytest.raises(ar.SolverError):
        ar.solve_equilibrium(
            p,
            ar.LocomotionState.S1,
            ar.ControlInput(math.pi / 2, math.pi / 2),
            ar.PivotAnchor(0.0, 0.0),
        )
    with pytest.raises(ValueError):
        ar.solve_equilibrium(
            p, ar.LocomotionState.S1, ar.ControlInput(-0.5, 0.0), ar.PivotAnchor(0.0, 0.0)
        )


def test_full_gait_sequence(tmp_path):
    p = prototype()
    inc = math.radians(10.0)
    start = ar.solve_equilibrium(
        p, ar.LocomotionState.S1, ar.ControlInput(math.pi / 2, 0.0), ar.PivotAnchor(0.0, 0.0)
    )
    schedule = ar.ControlSchedule(
        [
            ar.ScheduleSegment(ar.ArcId.Arc1, math.pi / 2, math.pi, inc),
            ar.ScheduleSegment(ar.ArcId.Arc2, 0.0, math.pi, inc),
            ar.ScheduleSegment(ar.ArcId.Arc1, math.pi, 0.0, inc),
            ar.ScheduleSegment(ar.ArcId.Arc2, math.pi, 0.0, inc),
        ]
    )
    traj = ar.run_sequence(p, start, schedule)
    assert len(traj.samples) == 64
    events = [s.event for s in traj.samples if s.event is not None]
    assert len(events) == 4
    assert all(e.kind == ar.TransitionKind.IntuitiveEndpoint for e in events)
    assert [e.to_state for e in events] == [
        ar.LocomotionState.S4,
        ar.LocomotionState.S2,
        ar.LocomotionState.S3,
        ar.LocomotionState.S1,
    ]

    metrics = ar.trajectory_metrics(traj, math.radians(10.0))
    assert metrics.net_displacement_mm > 0.0
    assert metrics.duration_s == pytest.approx(63.0)
    assert metrics.speed_bl_per_s > 0.0

    path = tmp_path / "traj.csv"
    ar.write_trajectory_csv(str(path), traj)
    back = ar.read_trajectory_csv(str(path), p)
    assert len(back.samples) == len(traj.samples)
    assert back.samples[-1].com_world == pytest.approx(traj.samples[-1].com_world)


def test_map_and_planning(tmp_path):
    p = prototype()
    m = ar.map_equilibria(p, ar.LocomotionState.S1, 10.0, workers=4)
    assert m.nodes_per_axis() == 19
    assert len(m.cells) == 19 * 19
    assert m.at(9, 9).status == ar.CellStatus.NoEquilibrium
    assert m.at(9, 0).status == ar.CellStatus.Ok
    assert m.at(9, 0).phi1_rad == pytest.approx(math.pi / 2, abs=1e-3)

    curves = ar.extract_boundaries(m)
    assert curves
    assert {c.to_state for c in curves} == {ar.LocomotionState.S3, ar.LocomotionState.S4}

    plan = ar.plan_transition(
        [m], ar.LocomotionState.S1, 130.0, 40.0, ar.LocomotionState.S4, ar.PathMode.NonIntuitive
    )
    assert plan.cost_deg == 5.0
    assert plan.waypoints[-1].state == ar.LocomotionState.S4
    assert ar.path_cost(plan) == plan.cost_deg

    intuitive = ar.plan_transition(
        [m], ar.LocomotionState.S1, 130.0, 40.0, ar.LocomotionState.S4, ar.PathMode.Intuitive
    )
    assert intuitive.cost_deg == 50.0

    csv_path = tmp_path / "map.csv"
    ar.write_map_csv(str(csv_path), m)
    lines = csv_path.read_text().splitlines()
    assert lines[0] == "theta1_deg,theta2_deg,state,phi1_deg,phi2_deg,status"
    assert len(lines) == 1 + 19 * 19


def test_steps_and_impact():
    assert ar.theta_to_steps(math.pi, 1) == 1200
    assert ar.theta_to_steps(-math.pi / 2, 4) == -2400
    with pytest.raises(ValueError):
        ar.theta_to_steps(0.1, 3)

    fs = 200.0
    samples = []
    lam = math.log(80.0) / 5.0
    for i in range(2000):
        t = i / fs
        ax = 0.0
        if t >= 2.0:
            u = t - 2.0
            ax = 40.0 * math.exp(-lam * u) * math.sin(2.0 * math.pi * 3.0 * u)
        samples.append(ar.ImuSample(t, [ax, 0.0, 9.81]))
    result = ar.detect_impact_settling(samples, quiet_band_ms2=0.5, hold_s=1.0)
    assert result.impact_time_s == pytest.approx(2.0, abs=0.1)
    assert 4.8 < result.settle_duration_s < 5.2
    assert result.warnings == []


def test_config_round_trip(tmp_path):
    cfg = ar.RunConfig()
    assert cfg.radius_mm == 272.5
    assert cfg.steps_per_rev == 200
    cfg.microstep_factor = 8
    path = tmp_path / "run.json"
    ar.save_run_config(str(path), cfg)
    back = ar.load_run_config_file(str(path))
    assert back.microstep_factor == 8
    assert back.robot().total_mass_g() == cfg.robot().total_mass_g()
    with pytest.raises(ValueError):
        ar.load_run_config('{"radius_mm": 1}')
