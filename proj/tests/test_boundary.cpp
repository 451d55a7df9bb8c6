#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "arcroll/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

using namespace arcroll;

namespace {

const RobotParams kProto = RobotParams::prototype();

const EquilibriumMap& s1_map10() {
  static const EquilibriumMap m = map_equilibria(kProto, LocomotionState::S1, 10.0, 4);
  return m;
}

const EquilibriumMap& s3_map10() {
  static const EquilibriumMap m = map_equilibria(kProto, LocomotionState::S3, 10.0, 4);
  return m;
}

// Closed-form interior station of the rolling contact for the S1 branch,
// atan2 of the unpivoted-mass moment components. Exists iff the y component
// is positive.
double s1_branch_phi(double t1_rad, double t2_rad) {
  const double tot = kProto.total_mass_g();
  const double ax = kProto.arc1.shift_mass_g * kProto.radius_mm() * std::cos(t1_rad) / tot;
  const double ay = (kProto.arc1.shift_mass_g * std::sin(t1_rad) -
                     kProto.arc2.shift_mass_g * std::sin(t2_rad)) *
                    kProto.radius_mm() / tot;
  return std::atan2(ay, ax);
}

EquilibriumMap synthetic_map(double res,
                             const std::function<MapCell(double, double)>& cell_of) {
  EquilibriumMap m;
  m.params = kProto;
  m.state = LocomotionState::S1;
  m.resolution_deg = res;
  const int n = m.nodes_per_axis();
  m.cells.resize(static_cast<size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      m.at(i, j) = cell_of(i * res, j * res);
    }
  }
  return m;
}

EquilibriumMap step_map() {
  return synthetic_map(10.0, [](double t1, double) {
    return MapCell{deg_to_rad(t1 <= 80.0 ? 20.0 : 40.0), 0.0, CellStatus::Ok};
  });
}

size_t total_points(const std::vector<BoundaryCurve>& curves) {
  size_t n = 0;
  for (const BoundaryCurve& c : curves) n += c.points_deg.size();
  return n;
}

}  // namespace

TEST_CASE("map grid shape and statuses match the branch existence condition") {
  const EquilibriumMap& m = s1_map10();
  CHECK(m.nodes_per_axis() == 19);
  CHECK(m.cells.size() == 19u * 19u);

  int no_eq = 0, failed = 0;
  for (int j = 0; j < 19; ++j) {
    for (int i = 0; i < 19; ++i) {
      const MapCell& c = m.at(i, j);
      no_eq += c.status == CellStatus::NoEquilibrium;
      failed += c.status == CellStatus::Failed;
      if (i == 9 && j == 9) {
        CHECK(c.status == CellStatus::NoEquilibrium);
        continue;
      }
      const double gap =
          std::sin(deg_to_rad(i * 10.0)) - std::sin(deg_to_rad(j * 10.0));
      if (gap > 1e-9) {
        CHECK(c.status == CellStatus::Ok);
        CHECK(c.phi2_rad == 0.0);  // pivot arc parked at its pivot endpoint
        CHECK(std::abs(c.phi1_rad - s1_branch_phi(deg_to_rad(i * 10.0), deg_to_rad(j * 10.0))) <
              deg_to_rad(0.01));
      } else {
        CHECK(c.status == CellStatus::AtEndpoint);
      }
    }
  }
  CHECK(no_eq == 1);
  CHECK(failed == 0);
}

TEST_CASE("arc relabel symmetry: S3 map is the transposed S1 map") {
  const EquilibriumMap& a = s1_map10();
  const EquilibriumMap& b = s3_map10();
  for (int j = 0; j < 19; ++j) {
    for (int i = 0; i < 19; ++i) {
      const MapCell& cb = b.at(i, j);
      const MapCell& ca = a.at(j, i);
      CHECK(cb.status == ca.status);
      if (cb.status == CellStatus::NoEquilibrium) continue;
      CHECK(cb.phi1_rad == 0.0);
      CHECK(std::abs(cb.phi2_rad - ca.phi1_rad) < deg_to_rad(0.01));
    }
  }
}

TEST_CASE("finer grid nests: 5 deg map agrees with the 10 deg map on shared nodes") {
  const EquilibriumMap& coarse = s1_map10();
  const EquilibriumMap fine = map_equilibria(kProto, LocomotionState::S1, 5.0, 4);
  REQUIRE(fine.nodes_per_axis() == 37);
  for (int j = 0; j < 19; ++j) {
    for (int i = 0; i < 19; ++i) {
      const MapCell& cc = coarse.at(i, j);
      const MapCell& cf = fine.at(2 * i, 2 * j);
      CHECK(cf.status == cc.status);
      if (cc.status == CellStatus::Ok || cc.status == CellStatus::AtEndpoint) {
        CHECK(std::abs(cf.phi1_rad - cc.phi1_rad) < deg_to_rad(0.2));
      }
    }
  }
}

TEST_CASE("worker count does not change the map bytes") {
  const EquilibriumMap one = map_equilibria(kProto, LocomotionState::S1, 10.0, 1);
  const EquilibriumMap four = map_equilibria(kProto, LocomotionState::S1, 10.0, 4);
  std::ostringstream csv1, csv4;
  write_map_csv(csv1, one);
  write_map_csv(csv4, four);
  CHECK(csv1.str() == csv4.str());
  CHECK(csv1.str().size() > 0);
}

TEST_CASE("map rejects off-menu resolutions and bad params") {
  CHECK_THROWS_AS(map_equilibria(kProto, LocomotionState::S1, 3.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(map_equilibria(kProto, LocomotionState::S1, 0.0, 1), std::invalid_argument);
}

TEST_CASE("uniform synthetic map has no boundaries") {
  const EquilibriumMap m = synthetic_map(
      10.0, [](double, double) { return MapCell{deg_to_rad(30.0), 0.0, CellStatus::Ok}; });
  CHECK(extract_boundaries(m).empty());
}

TEST_CASE("empty map is rejected") {
  EquilibriumMap m;
  CHECK_THROWS_AS(extract_boundaries(m), EmptyMap);
}

TEST_CASE("synthetic step discontinuity yields one vertical polyline of midpoints") {
  const std::vector<BoundaryCurve> curves = extract_boundaries(step_map());
  REQUIRE(curves.size() == 1);
  const BoundaryCurve& c = curves.front();
  CHECK(c.from_state == LocomotionState::S1);
  CHECK(c.to_state == LocomotionState::S3);  // low side is nearer the 0 endpoint
  REQUIRE(c.points_deg.size() == 19);
  for (size_t k = 0; k < c.points_deg.size(); ++k) {
    CHECK(c.points_deg[k].first == 85.0);
    CHECK(c.points_deg[k].second == k * 10.0);
  }
}

TEST_CASE("endpoint-parked flip is a boundary even with no interior branch") {
  const EquilibriumMap m = synthetic_map(10.0, [](double t1, double) {
    return MapCell{t1 <= 80.0 ? 0.0 : kPi, 0.0, CellStatus::AtEndpoint};
  });
  const std::vector<BoundaryCurve> curves = extract_boundaries(m);
  REQUIRE(curves.size() == 1);
  CHECK(curves.front().to_state == LocomotionState::S3);
  CHECK(curves.front().points_deg.size() == 19);
  CHECK(curves.front().points_deg.front() == std::pair<double, double>(85.0, 0.0));
}

TEST_CASE("isolated failed cells are interpolated, not turned into boundaries") {
  EquilibriumMap uniform = synthetic_map(
      10.0, [](double, double) { return MapCell{deg_to_rad(30.0), 0.0, CellStatus::Ok}; });
  uniform.at(5, 5) = MapCell{0.0, 0.0, CellStatus::Failed};
  CHECK(extract_boundaries(uniform).empty());

  EquilibriumMap step = step_map();
  step.at(9, 7) = MapCell{0.0, 0.0, CellStatus::Failed};
  const std::vector<BoundaryCurve> curves = extract_boundaries(step);
  REQUIRE(curves.size() == 1);  // the curve must not fragment at the failure
  CHECK(curves.front().points_deg.size() == 19);
  for (const auto& p : curves.front().points_deg) CHECK(p.first == 85.0);
}

TEST_CASE("a smooth tracking ramp is not reported as a boundary") {
  // phi tracks theta1 on the theta2 = 0 row: adjacent cells differ by the
  // full grid pitch, yet the branch is perfectly smooth there. Only the two
  // end-of-branch crossings near theta1 = 0 and 180 are real boundaries.
  const std::vector<BoundaryCurve> curves = extract_boundaries(s1_map10());
  for (const BoundaryCurve& c : curves) {
    for (const auto& p : c.points_deg) {
      if (p.second == 0.0) CHECK((p.first == 5.0 || p.first == 175.0));
    }
  }
}

TEST_CASE("real map boundaries split into the two landing states by apex side") {
  const std::vector<BoundaryCurve> curves = extract_boundaries(s1_map10());
  CHECK(curves.size() >= 2);
  bool saw_s3 = false, saw_s4 = false;
  for (const BoundaryCurve& c : curves) {
    CHECK(c.from_state == LocomotionState::S1);
    const bool to_s3 = c.to_state == LocomotionState::S3;
    const bool to_s4 = c.to_state == LocomotionState::S4;
    CHECK((to_s3 || to_s4));
    saw_s3 = saw_s3 || to_s3;
    saw_s4 = saw_s4 || to_s4;
    for (const auto& p : c.points_deg) {
      CHECK(p.first >= 0.0);
      CHECK(p.first <= 180.0);
      CHECK(p.second >= 0.0);
      CHECK(p.second <= 180.0);
      if (to_s3) CHECK(p.first <= 90.0);
      if (to_s4) CHECK(p.first > 90.0);
    }
  }
  CHECK(saw_s3);
  CHECK(saw_s4);
}

TEST_CASE("boundaries are relabel-symmetric between the S1 and S3 maps") {
  auto point_set = [](const std::vector<BoundaryCurve>& curves, LocomotionState to,
                      bool swap_axes) {
    std::set<std::pair<double, double>> pts;
    for (const BoundaryCurve& c : curves) {
      if (c.to_state != to) continue;
      for (const auto& p : c.points_deg) {
        pts.insert(swap_axes ? std::pair<double, double>(p.second, p.first) : p);
      }
    }
    return pts;
  };
  const std::vector<BoundaryCurve> b1 = extract_boundaries(s1_map10());
  const std::vector<BoundaryCurve> b3 = extract_boundaries(s3_map10());
  // swapping arc labels swaps S1<->S3 and S2<->S4 and transposes the axes
  CHECK(point_set(b1, LocomotionState::S3, true) == point_set(b3, LocomotionState::S1, false));
  CHECK(point_set(b1, LocomotionState::S4, true) == point_set(b3, LocomotionState::S2, false));
  CHECK(total_points(b1) == total_points(b3));
  CHECK(total_points(b1) > 0);
}

TEST_CASE("every boundary point survives a tenfold finer re-solve") {
  const EquilibriumMap& m = s1_map10();
  const std::vector<BoundaryCurve> curves = extract_boundaries(m);
  const PivotAnchor origin{0.0, 0.0};
  size_t checked = 0;
  for (const BoundaryCurve& c : curves) {
    for (const auto& p : c.points_deg) {
      // Recover the crossed edge from the midpoint: exactly one coordinate
      // sits halfway between grid lines.
      const bool horizontal = std::fmod(p.first, 10.0) != 0.0;
      const double lo = (horizontal ? p.first : p.second) - 5.0;
      std::vector<int> interior(11, 0);
      std::vector<double> phi(11, 0.0);
      for (int k = 0; k <= 10; ++k) {
        const double t1 = horizontal ? lo + k : p.first;
        const double t2 = horizontal ? p.second : lo + k;
        try {
          const EquilibriumConfig cfg = solve_equilibrium(
              kProto, LocomotionState::S1, ControlInput(deg_to_rad(t1), deg_to_rad(t2)), origin);
          interior[k] = !cfg.contact_at_endpoint;
          phi[k] = cfg.contacts.phi1_rad;
        } catch (const SolverError&) {
          interior[k] = 0;
        }
      }
      bool jump = false;
      for (int k = 0; k < 10 && !jump; ++k) {
        jump = interior[k] != interior[k + 1] ||
               (interior[k] && interior[k + 1] &&
                std::abs(phi[k] - phi[k + 1]) > deg_to_rad(2.5));
      }
      CHECK(jump);
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("intuitive plans drive the rolling mass to the endpoint") {
  const std::vector<EquilibriumMap> maps{s1_map10()};

  // dead-branch start on the theta1 = 0 edge still plans, full travel
  const ControlPath edge = plan_transition(maps, LocomotionState::S1, 0.0, 40.0,
                                           LocomotionState::S4, PathMode::Intuitive);
  CHECK(edge.cost_deg == 180.0);
  REQUIRE(edge.waypoints.size() == 3);
  CHECK(edge.waypoints[1].state == LocomotionState::S1);
  CHECK(edge.waypoints[1].theta1_deg == 180.0);
  CHECK(edge.waypoints[1].theta2_deg == 40.0);
  CHECK(edge.waypoints[2].state == LocomotionState::S4);

  const ControlPath up = plan_transition(maps, LocomotionState::S1, 50.0, 20.0,
                                         LocomotionState::S4, PathMode::Intuitive);
  CHECK(up.cost_deg == 130.0);
  const ControlPath down = plan_transition(maps, LocomotionState::S1, 50.0, 20.0,
                                           LocomotionState::S3, PathMode::Intuitive);
  CHECK(down.cost_deg == 50.0);
  CHECK(down.waypoints[1].theta1_deg == 0.0);
}

TEST_CASE("only pivot-handover states are reachable in one transition") {
  const std::vector<EquilibriumMap> maps{s1_map10()};
  CHECK_THROWS_AS(plan_transition(maps, LocomotionState::S1, 50.0, 20.0, LocomotionState::S2,
                                  PathMode::Intuitive),
                  UnreachableState);
  CHECK_THROWS_AS(plan_transition(maps, LocomotionState::S1, 50.0, 20.0, LocomotionState::S1,
                                  PathMode::NonIntuitive),
                  UnreachableState);
  CHECK_THROWS_AS(plan_transition(maps, LocomotionState::S2, 50.0, 20.0, LocomotionState::S3,
                                  PathMode::Intuitive),
                  std::invalid_argument);  // no S2 map supplied
}

TEST_CASE("non-intuitive plan stops at the first boundary on the cheapest ray") {
  const std::vector<EquilibriumMap> maps{s1_map10()};
  const ControlPath p = plan_transition(maps, LocomotionState::S1, 130.0, 40.0,
                                        LocomotionState::S4, PathMode::NonIntuitive);
  CHECK(p.cost_deg == 5.0);
  REQUIRE(p.waypoints.size() == 3);
  CHECK(p.waypoints[0].theta1_deg == 130.0);
  CHECK(p.waypoints[1].theta1_deg == 135.0);
  CHECK(p.waypoints[1].theta2_deg == 40.0);
  CHECK(p.waypoints[1].state == LocomotionState::S1);
  CHECK(p.waypoints[2].state == LocomotionState::S4);
  CHECK(p.waypoints[2].theta1_deg == 135.0);
}

TEST_CASE("non-intuitive ties break by ray order") {
  // from (50, 20) the -theta1 and +theta2 crossings both cost 25; the ray
  // order theta1 first makes the -theta1 crossing the winner
  const std::vector<EquilibriumMap> maps{s1_map10()};
  const ControlPath p = plan_transition(maps, LocomotionState::S1, 50.0, 20.0,
                                        LocomotionState::S3, PathMode::NonIntuitive);
  CHECK(p.cost_deg == 25.0);
  REQUIRE(p.waypoints.size() == 3);
  CHECK(p.waypoints[1].theta1_deg == 25.0);
  CHECK(p.waypoints[1].theta2_deg == 20.0);
}

TEST_CASE("non-intuitive planning fails cleanly when no boundary is in reach") {
  const std::vector<EquilibriumMap> maps{synthetic_map(
      10.0, [](double, double) { return MapCell{deg_to_rad(30.0), 0.0, CellStatus::Ok}; })};
  CHECK_THROWS_AS(plan_transition(maps, LocomotionState::S1, 90.0, 90.0, LocomotionState::S3,
                                  PathMode::NonIntuitive),
                  NoBoundaryInRange);
}

TEST_CASE("unsolvable starts are rejected") {
  const std::vector<EquilibriumMap> maps{s1_map10()};
  CHECK_THROWS_AS(plan_transition(maps, LocomotionState::S1, 90.0, 90.0, LocomotionState::S3,
                                  PathMode::NonIntuitive),
                  std::invalid_argument);
}

TEST_CASE("some start beats the full endpoint travel via a boundary crossing") {
  const EquilibriumMap& m = s1_map10();
  const std::vector<EquilibriumMap> maps{m};
  bool beaten = false;
  for (int j = 0; j < 19; ++j) {
    for (int i = 0; i < 19; ++i) {
      if (m.at(i, j).status != CellStatus::Ok) continue;
      const double t1 = i * 10.0, t2 = j * 10.0;
      double ni;
      try {
        ni = plan_transition(maps, LocomotionState::S1, t1, t2, LocomotionState::S4,
                             PathMode::NonIntuitive)
                 .cost_deg;
      } catch (const NoBoundaryInRange&) {
        continue;
      }
      CHECK(ni >= 0.0);
      const double intuitive = plan_transition(maps, LocomotionState::S1, t1, t2,
                                               LocomotionState::S4, PathMode::Intuitive)
                                   .cost_deg;
      CHECK(intuitive == 180.0 - t1);
      beaten = beaten || ni < intuitive;
    }
  }
  CHECK(beaten);
}

TEST_CASE("path cost sums driven-mass travel and reproduces the two-leg total") {
  ControlPath p;
  p.mode = PathMode::NonIntuitive;
  p.waypoints = {{LocomotionState::S1, 0.0, 30.0},
                 {LocomotionState::S1, 50.31, 30.0},
                 {LocomotionState::S1, 50.31, 142.5}};
  CHECK(path_cost(p) == 50.31 + 112.5);
  CHECK(path_cost(p) == 162.81);

  ControlPath empty;
  CHECK(path_cost(empty) == 0.0);

  ControlPath one;
  one.waypoints = {{LocomotionState::S1, 12.0, 34.0}};
  CHECK(path_cost(one) == 0.0);
}

TEST_CASE("map CSV has the documented column layout") {
  EquilibriumMap m = synthetic_map(10.0, [](double t1, double t2) {
    MapCell c{0.0, 0.0, CellStatus::Ok};
    if (t1 == 90.0 && t2 == 90.0) {
      c = MapCell{std::nan(""), std::nan(""), CellStatus::NoEquilibrium};
    }
    if (t1 == 10.0 && t2 == 0.0) c.status = CellStatus::Failed;
    return c;
  });
  std::ostringstream out;
  write_map_csv(out, m);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta1_deg,theta2_deg,state,phi1_deg,phi2_deg,status");
  std::getline(in, line);
  CHECK(line == "0,0,S1,0,0,ok");
  std::getline(in, line);
  CHECK(line == "10,0,S1,0,0,failed");
  int rows = 2;
  bool nan_row = false;
  while (std::getline(in, line)) {
    ++rows;
    nan_row = nan_row || line == "90,90,S1,nan,nan,no_equilibrium";
  }
  CHECK(rows == 19 * 19);
  CHECK(nan_row);
}

TEST_CASE("cell status names round trip") {
  for (CellStatus s : {CellStatus::Ok, CellStatus::AtEndpoint, CellStatus::NoEquilibrium,
                       CellStatus::Failed}) {
    CHECK(parse_cell_status(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_cell_status("bogus"), std::invalid_argument);
  CHECK(std::string(to_string(PathMode::Intuitive)) == "intuitive");
  CHECK(std::string(to_string(PathMode::NonIntuitive)) == "non_intuitive");
}

TEST_CASE("map SVG output is deterministic and well formed") {
  const EquilibriumMap& m = s1_map10();
  const std::vector<BoundaryCurve> curves = extract_boundaries(m);
  std::ostringstream a, b;
  write_map_svg(a, m, curves);
  write_map_svg(b, m, curves);
  CHECK(a.str() == b.str());
  CHECK(a.str().find("<svg") == 0);
  CHECK(a.str().find("<polyline") != std::string::npos);
  CHECK(a.str().rfind("</svg>\n") == a.str().size() - 7);
}
