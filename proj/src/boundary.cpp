#include "arcroll/boundary.hpp"

#include "arcroll/format.hpp"
#include "arcroll/svg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <thread>

namespace arcroll {

namespace {

constexpr double kJumpDeg = 5.0;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

const double kAllowedResolutions[] = {0.5, 1.0, 2.0, 5.0, 10.0};

void check_resolution(double res) {
  for (double r : kAllowedResolutions) {
    if (res == r) return;
  }
  throw std::invalid_argument("resolution_deg must be one of 0.5, 1, 2, 5, 10");
}

void solve_row(const RobotParams& params, LocomotionState state, double res_deg, int j, int n,
               MapCell* row) {
  const PivotAnchor origin{0.0, 0.0};
  const double t2 = std::clamp(deg_to_rad(j * res_deg), 0.0, kPi);
  EquilibriumConfig prev;
  bool have_prev = false;
  for (int i = 0; i < n; ++i) {
    const double t1 = std::clamp(deg_to_rad(i * res_deg), 0.0, kPi);
    const ControlInput c(t1, t2);
    MapCell& cell = row[i];
    try {
      prev = have_prev ? solve_equilibrium(params, state, c, origin, prev)
                       : solve_equilibrium(params, state, c, origin);
      cell.phi1_rad = prev.contacts.phi1_rad;
      cell.phi2_rad = prev.contacts.phi2_rad;
      cell.status = prev.contact_at_endpoint ? CellStatus::AtEndpoint : CellStatus::Ok;
      have_prev = true;
    } catch (const NoStableEquilibrium&) {
      cell = MapCell{kNan, kNan, CellStatus::NoEquilibrium};
      have_prev = false;
    } catch (const InfeasibleContact&) {
      cell = MapCell{kNan, kNan, CellStatus::NoEquilibrium};
      have_prev = false;
    } catch (const SolverError&) {
      cell = MapCell{kNan, kNan, CellStatus::Failed};
      have_prev = false;
    }
  }
}

// Per-node view used by edge classification: the rolling contact angle, its
// validity, and whether the interior branch is alive. Failed cells borrow
// interpolated values from their neighbors so isolated failures do not
// fragment curves.
struct EffGrid {
  int n = 0;
  std::vector<double> phi;
  std::vector<char> valid;
  std::vector<char> present;
  double at_phi(int i, int j) const { return phi[j * n + i]; }
  bool at_valid(int i, int j) const { return valid[j * n + i] != 0; }
  bool at_present(int i, int j) const { return present[j * n + i] != 0; }
};

EffGrid make_effective(const EquilibriumMap& map) {
  const ArcId roll = rolling_arc(map.state);
  const int n = map.nodes_per_axis();
  EffGrid g;
  g.n = n;
  g.phi.assign(n * n, kNan);
  g.valid.assign(n * n, 0);
  g.present.assign(n * n, 0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const MapCell& c = map.at(i, j);
      if (c.status == CellStatus::Ok || c.status == CellStatus::AtEndpoint) {
        g.phi[j * n + i] = c.phi(roll);
        g.valid[j * n + i] = 1;
        g.present[j * n + i] = c.status == CellStatus::Ok;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (map.at(i, j).status != CellStatus::Failed) continue;
      double sum = 0.0;
      int cnt = 0, alive = 0;
      const int di[] = {1, -1, 0, 0};
      const int dj[] = {0, 0, 1, -1};
      for (int k = 0; k < 4; ++k) {
        const int ii = i + di[k], jj = j + dj[k];
        if (ii < 0 || ii >= n || jj < 0 || jj >= n) continue;
        const MapCell& nb = map.at(ii, jj);
        if (nb.status == CellStatus::Ok || nb.status == CellStatus::AtEndpoint) {
          sum += nb.phi(roll);
          ++cnt;
          alive += nb.status == CellStatus::Ok;
        }
      }
      if (cnt > 0) {
        g.phi[j * n + i] = sum / cnt;
        g.valid[j * n + i] = 1;
        g.present[j * n + i] = 2 * alive >= cnt;
      }
    }
  }
  return g;
}

// Delta of an edge for the spike test: finite only when both cells hold an
// interior branch value.
double interior_delta(const EffGrid& g, int i1, int j1, int i2, int j2) {
  if (i1 < 0 || j1 < 0 || i2 < 0 || j2 < 0 || i1 >= g.n || j1 >= g.n || i2 >= g.n || j2 >= g.n) {
    return 0.0;  // beyond the grid: nothing to compare against
  }
  if (!g.at_present(i1, j1) || !g.at_present(i2, j2) || !g.at_valid(i1, j1) ||
      !g.at_valid(i2, j2)) {
    return kInf;
  }
  return std::abs(g.at_phi(i1, j1) - g.at_phi(i2, j2));
}

struct EdgeClass {
  bool boundary = false;
  LocomotionState to_state = LocomotionState::S1;
};

// Classifies the edge between nodes (i, j) and (i + di, j + dj), di/dj one of
// the unit axis steps.
EdgeClass classify_edge(const EquilibriumMap& map, const EffGrid& g, int i, int j, int di,
                        int dj) {
  EdgeClass out;
  const int i2 = i + di, j2 = j + dj;
  const bool pa = g.at_present(i, j), pb = g.at_present(i2, j2);
  const bool va = g.at_valid(i, j), vb = g.at_valid(i2, j2);
  const double fa = g.at_phi(i, j), fb = g.at_phi(i2, j2);
  bool is_boundary = false;
  if (pa != pb) {
    is_boundary = true;  // the interior branch terminates across this edge
  } else if (!pa && va && vb && std::abs(fa - fb) > deg_to_rad(kJumpDeg)) {
    is_boundary = true;  // endpoint-parked branch flips ends
  } else if (pa && va && vb) {
    const double d = std::abs(fa - fb);
    // A genuine discontinuity spikes above the neighboring edge deltas; a
    // steep smooth ramp does not, and dissolves on a finer grid.
    const double before = interior_delta(g, i - di, j - dj, i, j);
    const double after = interior_delta(g, i2, j2, i2 + di, j2 + dj);
    if (d > deg_to_rad(kJumpDeg) + before && d > deg_to_rad(kJumpDeg) + after) {
      is_boundary = true;
    }
  }
  if (!is_boundary) return out;

  // The landing state is the pivot at the endpoint the dying contact is
  // nearest to, taken from whichever side sits closest to an endpoint.
  double phi_ref;
  if (va && vb) {
    const double da = std::min(fa, kPi - fa), db = std::min(fb, kPi - fb);
    phi_ref = db < da ? fb : fa;
  } else if (va) {
    phi_ref = fa;
  } else if (vb) {
    phi_ref = fb;
  } else {
    return out;  // nothing to classify against
  }
  if (std::abs(phi_ref - kPi / 2) < 1e-6) {
    // The dying contact sits exactly between the endpoints, which only
    // happens on edges facing the degenerate apex-on-apex control point.
    // There is no defined landing state there, so it is not a transition.
    return out;
  }
  out.boundary = true;
  out.to_state = state_for_pivot(rolling_arc(map.state), phi_ref <= kPi / 2 ? 0.0 : kPi);
  return out;
}

using PointDeg = std::pair<double, double>;

double point_dist(const PointDeg& a, const PointDeg& b) {
  return std::hypot(a.first - b.first, a.second - b.second);
}

std::vector<std::vector<PointDeg>> chain_points(std::vector<PointDeg> pts, double max_gap) {
  std::sort(pts.begin(), pts.end());
  std::vector<char> used(pts.size(), 0);
  std::vector<std::vector<PointDeg>> chains;
  for (size_t seed = 0; seed < pts.size(); ++seed) {
    if (used[seed]) continue;
    std::vector<PointDeg> chain{pts[seed]};
    used[seed] = 1;
    for (int pass = 0; pass < 2; ++pass) {
      for (;;) {
        size_t best = pts.size();
        double best_d = max_gap + 1e-9;
        for (size_t k = 0; k < pts.size(); ++k) {
          if (used[k]) continue;
          const double d = point_dist(chain.back(), pts[k]);
          if (d < best_d) {
            best_d = d;
            best = k;
          }
        }
        if (best == pts.size()) break;
        chain.push_back(pts[best]);
        used[best] = 1;
      }
      std::reverse(chain.begin(), chain.end());
    }
    if (chain.back() < chain.front()) std::reverse(chain.begin(), chain.end());
    chains.push_back(std::move(chain));
  }
  return chains;
}

}  // namespace

const char* to_string(CellStatus s) {
  switch (s) {
    case CellStatus::Ok:
      return "ok";
    case CellStatus::AtEndpoint:
      return "at_endpoint";
    case CellStatus::NoEquilibrium:
      return "no_equilibrium";
    case CellStatus::Failed:
      return "failed";
  }
  throw std::invalid_argument("bad CellStatus");
}

CellStatus parse_cell_status(const std::string& name) {
  if (name == "ok") return CellStatus::Ok;
  if (name == "at_endpoint") return CellStatus::AtEndpoint;
  if (name == "no_equilibrium") return CellStatus::NoEquilibrium;
  if (name == "failed") return CellStatus::Failed;
  throw std::invalid_argument("bad cell status '" + name + "'");
}

const char* to_string(PathMode m) {
  switch (m) {
    case PathMode::Intuitive:
      return "intuitive";
    case PathMode::NonIntuitive:
      return "non_intuitive";
  }
  throw std::invalid_argument("bad PathMode");
}

EquilibriumMap map_equilibria(const RobotParams& params, LocomotionState state,
                              double resolution_deg, int workers) {
  params.validate();
  check_resolution(resolution_deg);
  EquilibriumMap map;
  map.params = params;
  map.state = state;
  map.resolution_deg = resolution_deg;
  const int n = map.nodes_per_axis();
  map.cells.assign(static_cast<size_t>(n) * n, MapCell{});

  const int nthreads = std::clamp(workers, 1, n);
  std::atomic<int> next_row{0};
  auto work = [&]() {
    for (;;) {
      const int j = next_row.fetch_add(1);
      if (j >= n) break;
      solve_row(params, state, resolution_deg, j, n, map.cells.data() + static_cast<size_t>(j) * n);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  return map;
}

std::vector<BoundaryCurve> extract_boundaries(const EquilibriumMap& map) {
  const int n = map.nodes_per_axis();
  if (map.cells.size() != static_cast<size_t>(n) * n || map.cells.empty()) {
    throw EmptyMap("equilibrium map is empty or incomplete");
  }
  const EffGrid g = make_effective(map);
  const double res = map.resolution_deg;

  // Bucket boundary edge midpoints by landing state.
  std::vector<PointDeg> buckets[4];
  auto bucket_of = [](LocomotionState s) { return static_cast<int>(s); };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      if (i + 1 < n) {
        const EdgeClass e = classify_edge(map, g, i, j, 1, 0);
        if (e.boundary) buckets[bucket_of(e.to_state)].push_back({(i + 0.5) * res, j * res});
      }
      if (j + 1 < n) {
        const EdgeClass e = classify_edge(map, g, i, j, 0, 1);
        if (e.boundary) buckets[bucket_of(e.to_state)].push_back({i * res, (j + 0.5) * res});
      }
    }
  }

  std::vector<BoundaryCurve> curves;
  for (int b = 0; b < 4; ++b) {
    if (buckets[b].empty()) continue;
    for (std::vector<PointDeg>& chain : chain_points(std::move(buckets[b]), 2.0 * res)) {
      BoundaryCurve curve;
      curve.from_state = map.state;
      curve.to_state = static_cast<LocomotionState>(b);
      curve.points_deg = std::move(chain);
      curves.push_back(std::move(curve));
    }
  }
  return curves;
}

ControlPath plan_transition(const std::vector<EquilibriumMap>& maps, LocomotionState from_state,
                            double theta1_deg, double theta2_deg, LocomotionState target_state,
                            PathMode mode) {
  const EquilibriumMap* map = nullptr;
  for (const EquilibriumMap& m : maps) {
    if (m.state == from_state) {
      map = &m;
      break;
    }
  }
  if (map == nullptr) {
    throw std::invalid_argument("map set does not contain the from state");
  }
  const ArcId roll = rolling_arc(from_state);
  const LocomotionState to_low = state_for_pivot(roll, 0.0);
  const LocomotionState to_high = state_for_pivot(roll, kPi);
  if (target_state != to_low && target_state != to_high) {
    throw UnreachableState(std::string("no single transition from ") + to_string(from_state) +
                           " to " + to_string(target_state));
  }

  const int n = map->nodes_per_axis();
  const double res = map->resolution_deg;
  const int i0 = std::clamp(static_cast<int>(std::lround(theta1_deg / res)), 0, n - 1);
  const int j0 = std::clamp(static_cast<int>(std::lround(theta2_deg / res)), 0, n - 1);
  const CellStatus start_status = map->at(i0, j0).status;
  if (start_status == CellStatus::NoEquilibrium || start_status == CellStatus::Failed) {
    throw std::invalid_argument("start configuration has no solvable equilibrium");
  }

  ControlPath path;
  path.mode = mode;
  const PathWaypoint start{from_state, theta1_deg, theta2_deg};

  if (mode == PathMode::Intuitive) {
    const double end_deg = target_state == to_low ? 0.0 : 180.0;
    PathWaypoint driven = start;
    (roll == ArcId::Arc1 ? driven.theta1_deg : driven.theta2_deg) = end_deg;
    PathWaypoint landed = driven;
    landed.state = target_state;
    path.waypoints = {start, driven, landed};
    path.cost_deg = path_cost(path);
    return path;
  }

  const EffGrid g = make_effective(*map);
  struct Candidate {
    double cost = kInf;
    PathWaypoint crossing;
  };
  Candidate best;
  const int rays[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (const int* ray : rays) {
    const int di = ray[0], dj = ray[1];
    int i = i0, j = j0;
    while (true) {
      const int i2 = i + di, j2 = j + dj;
      if (i2 < 0 || i2 >= n || j2 < 0 || j2 >= n) break;
      // classify_edge expects the lexicographically lower node first
      const EdgeClass e = di + dj > 0 ? classify_edge(*map, g, i, j, di, dj)
                                      : classify_edge(*map, g, i2, j2, -di, -dj);
      if (e.boundary) {
        if (e.to_state == target_state) {
          PathWaypoint crossing = start;
          double cost;
          if (di != 0) {
            crossing.theta1_deg = (std::min(i, i2) + 0.5) * res;
            cost = std::abs(crossing.theta1_deg - theta1_deg);
          } else {
            crossing.theta2_deg = (std::min(j, j2) + 0.5) * res;
            cost = std::abs(crossing.theta2_deg - theta2_deg);
          }
          if (cost < best.cost) {
            best.cost = cost;
            best.crossing = crossing;
          }
        }
        break;  // the robot transitions at the first boundary it meets
      }
      i = i2;
      j = j2;
    }
  }
  if (!(best.cost < kInf)) {
    throw NoBoundaryInRange(std::string("no boundary crossing into ") + to_string(target_state) +
                            " along either control axis");
  }
  PathWaypoint landed = best.crossing;
  landed.state = target_state;
  path.waypoints = {start, best.crossing, landed};
  path.cost_deg = path_cost(path);
  return path;
}

double path_cost(const ControlPath& path) {
  double cost = 0.0;
  for (size_t k = 1; k < path.waypoints.size(); ++k) {
    cost += std::abs(path.waypoints[k].theta1_deg - path.waypoints[k - 1].theta1_deg) +
            std::abs(path.waypoints[k].theta2_deg - path.waypoints[k - 1].theta2_deg);
  }
  return cost;
}

void write_map_csv(std::ostream& out, const EquilibriumMap& map) {
  out << "theta1_deg,theta2_deg,state,phi1_deg,phi2_deg,status\n";
  const int n = map.nodes_per_axis();
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const MapCell& c = map.at(i, j);
      out << g17(i * map.resolution_deg) << ',' << g17(j * map.resolution_deg) << ','
          << to_string(map.state) << ',' << g17(rad_to_deg(c.phi1_rad)) << ','
          << g17(rad_to_deg(c.phi2_rad)) << ',' << to_string(c.status) << '\n';
    }
  }
}

void write_map_svg(std::ostream& out, const EquilibriumMap& map,
                   const std::vector<BoundaryCurve>& curves) {
  const int n = map.nodes_per_axis();
  const double margin = 50.0, plot = 540.0;
  const double cell = plot / (n - 1);
  auto x_of = [&](double t1_deg) { return margin + t1_deg / 180.0 * plot; };
  auto y_of = [&](double t2_deg) { return margin + plot - t2_deg / 180.0 * plot; };

  SvgWriter svg(out, plot + 2 * margin, plot + 2 * margin);
  svg.rect(0, 0, plot + 2 * margin, plot + 2 * margin, "#ffffff");
  char color[8];
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const MapCell& c = map.at(i, j);
      std::string fill;
      switch (c.status) {
        case CellStatus::Ok: {
          const double t = std::clamp(c.phi(rolling_arc(map.state)) / kPi, 0.0, 1.0);
          std::snprintf(color, sizeof(color), "#%02x%02x%02x", static_cast<int>(40 + 215 * t),
                        static_cast<int>(80 + 100 * t), static_cast<int>(255 - 215 * t));
          fill = color;
          break;
        }
        case CellStatus::AtEndpoint:
          fill = map.at(i, j).phi(rolling_arc(map.state)) < kPi / 2 ? "#d9d9d9" : "#8c8c8c";
          break;
        case CellStatus::NoEquilibrium:
          fill = "#bb2222";
          break;
        case CellStatus::Failed:
          fill = "#ff00ff";
          break;
      }
      svg.rect(x_of(i * map.resolution_deg) - cell / 2, y_of(j * map.resolution_deg) - cell / 2,
               cell, cell, fill);
    }
  }
  for (const BoundaryCurve& curve : curves) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(curve.points_deg.size());
    for (const PointDeg& p : curve.points_deg) {
      pts.push_back({x_of(p.first), y_of(p.second)});
    }
    svg.polyline(pts, "#dd0000", 2.0, "6,4");
  }
  svg.line(margin, margin + plot, margin + plot, margin + plot, "#000000", 1.0);
  svg.line(margin, margin, margin, margin + plot, "#000000", 1.0);
  svg.text(margin + plot / 2 - 40, margin + plot + 32, 14, "theta1 [deg]");
  svg.text(8, margin + 12, 14, "theta2");
  svg.text(margin, margin - 12, 14,
           std::string(to_string(map.state)) + " map, " + g17(map.resolution_deg) + " deg");
}

}  // namespace arcroll
