#include "arcroll/equilibrium.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

namespace arcroll {

namespace {

constexpr int kArcSamples = 721;        // 0.25 deg clearance stations
constexpr double kCoarseGridDeg = 2.0;  // seeding grid for the station search
constexpr double kRefineTolRad = 1e-6;
constexpr double kEndpointSnapRad = 1e-5;
const double kProbeRad = deg_to_rad(0.1);
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Workspace {
  const RobotParams* params = nullptr;
  LocomotionState state = LocomotionState::S1;
  ArcId roll = ArcId::Arc1;
  Vec3 pivot_body = Vec3::Zero();
  Vec3 com_b = Vec3::Zero();
  std::vector<Vec3> samples;  // both arcs
  double radius = 0.0;
  double pen_tol = 0.0;
};

Workspace make_workspace(const RobotParams& params, LocomotionState state,
                         const ControlInput& control) {
  params.validate();
  Workspace ws;
  ws.params = &params;
  ws.state = state;
  ws.roll = rolling_arc(state);
  ws.pivot_body = contact_position_body(params, pivot_arc(state), pivot_phi_rad(state));
  ws.com_b = com_body(params, control);
  ws.radius = params.radius_mm();
  ws.pen_tol = 1e-9 * ws.radius;
  ws.samples.reserve(2 * kArcSamples);
  for (ArcId arc : {ArcId::Arc1, ArcId::Arc2}) {
    for (int i = 0; i < kArcSamples; ++i) {
      ws.samples.push_back(contact_position_body(params, arc, kPi * i / (kArcSamples - 1)));
    }
  }
  return ws;
}

// Resting orientation with the pivot pinned and the rolling arc tangent to
// the ground at station phi. Both contact points sit on the plane, so the
// plane spanned by the support chord and the contact tangent must map onto
// the ground, with the arc's curvature normal pointing up; that fixes the
// orientation up to a heading rotation about the vertical.
struct Frame {
  Vec3 up;     // body direction carried to world +z
  Vec3 dhat;   // support chord direction in the body frame
  double len;  // chord length
  Mat3 R0;     // canonical orientation: support chord along world +x
};

std::optional<Frame> tangency_frame(const Workspace& ws, double phi) {
  Vec3 q = contact_position_body(*ws.params, ws.roll, phi);
  Vec3 d = q - ws.pivot_body;
  const double len = d.norm();
  if (len < 1e-12 * ws.radius) return std::nullopt;
  Vec3 dhat = d / len;
  Vec3 t = arc_tangent_body(ws.roll, phi);
  Vec3 m = dhat.cross(t);
  const double mn = m.norm();
  if (mn < 1e-12) return std::nullopt;
  m /= mn;
  const double side = -q.normalized().dot(m);  // curvature normal vs plane normal
  if (std::abs(side) < 1e-12) return std::nullopt;
  Frame f;
  f.up = side > 0.0 ? m : Vec3(-m);
  f.dhat = dhat;
  f.len = len;
  f.R0.row(0) = dhat;
  f.R0.row(1) = f.up.cross(dhat);
  f.R0.row(2) = f.up;
  return f;
}

double clearance(const Workspace& ws, const Frame& f) {
  double lo = kInf;
  for (const Vec3& x : ws.samples) lo = std::min(lo, f.up.dot(x - ws.pivot_body));
  return lo;
}

double energy_at(const Workspace& ws, double phi) {
  auto f = tangency_frame(ws, phi);
  if (!f) return kInf;
  if (clearance(ws, *f) < -ws.pen_tol) return kInf;
  return f->up.dot(ws.com_b - ws.pivot_body);
}

template <class F>
double golden_min(F&& fn, double a, double b, double tol) {
  constexpr double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a);
  double x2 = a + gr * (b - a);
  double f1 = fn(x1);
  double f2 = fn(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = fn(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = fn(x2);
    }
  }
  return 0.5 * (a + b);
}

struct SearchResult {
  double phi;
};

SearchResult global_search(const Workspace& ws) {
  const int n = static_cast<int>(std::lround(180.0 / kCoarseGridDeg));
  std::vector<double> es(n + 1);
  int best = -1;
  double emin = kInf;
  double emax = -kInf;
  for (int i = 0; i <= n; ++i) {
    es[i] = energy_at(ws, kPi * i / n);
    if (es[i] < kInf) {
      if (es[i] < emin) {
        emin = es[i];
        best = i;
      }
      emax = std::max(emax, es[i]);
    }
  }
  if (best < 0) throw InfeasibleContact("no contact station admits a resting orientation");
  if (emax - emin < 1e-9 * ws.radius) {
    throw NoStableEquilibrium("potential is flat across all contact stations");
  }
  const double a = kPi * std::max(0, best - 1) / n;
  const double b = kPi * std::min(n, best + 1) / n;
  return {golden_min([&](double p) { return energy_at(ws, p); }, a, b, kRefineTolRad)};
}

SearchResult local_search(const Workspace& ws, double seed) {
  const double h = deg_to_rad(kCoarseGridDeg);
  seed = std::clamp(seed, 0.0, kPi);
  double e0 = energy_at(ws, seed);
  double lo = std::max(0.0, seed - h);
  double hi = std::min(kPi, seed + h);
  double elo = energy_at(ws, lo);
  double ehi = energy_at(ws, hi);
  if (e0 == kInf && elo == kInf && ehi == kInf) return global_search(ws);
  // Walk downhill until the connected minimum is bracketed.
  while (elo < e0 && lo > 0.0) {
    hi = seed;
    ehi = e0;
    seed = lo;
    e0 = elo;
    lo = std::max(0.0, lo - h);
    elo = energy_at(ws, lo);
  }
  while (ehi < e0 && hi < kPi) {
    lo = seed;
    elo = e0;
    seed = hi;
    e0 = ehi;
    hi = std::min(kPi, hi + h);
    ehi = energy_at(ws, hi);
  }
  return {golden_min([&](double p) { return energy_at(ws, p); }, lo, hi, kRefineTolRad)};
}

EquilibriumConfig finish(const Workspace& ws, const ControlInput& control,
                         const PivotAnchor& anchor, double phi, double alpha) {
  if (phi < kEndpointSnapRad) phi = 0.0;
  if (phi > kPi - kEndpointSnapRad) phi = kPi;
  auto f = tangency_frame(ws, phi);
  if (!f || clearance(ws, *f) < -ws.pen_tol) {
    throw InfeasibleContact("solved station does not admit a resting orientation");
  }
  const double e = f->up.dot(ws.com_b - ws.pivot_body);

  // Stability certificate: nearby feasible stations must not sit lower, and
  // the minimum must not be flat.
  double rise = kInf;
  for (double dir : {-1.0, 1.0}) {
    const double p = phi + dir * kProbeRad;
    if (p < 0.0 || p > kPi) continue;
    const double ep = energy_at(ws, p);
    if (ep == kInf) continue;
    if (ep < e - 1e-6 * ws.radius) {
      throw NoStableEquilibrium("perturbing the contact station lowers the potential");
    }
    rise = std::min(rise, ep - e);
  }
  if (rise != kInf && rise < 1e-9 * ws.radius) {
    throw NoStableEquilibrium("potential is flat around the candidate station");
  }

  RigidTransform pose;
  pose.rotation = Eigen::AngleAxisd(alpha, Vec3::UnitZ()).toRotationMatrix() * f->R0;
  pose.translation = Vec3(anchor.x_mm, anchor.y_mm, 0.0) - pose.rotation * ws.pivot_body;

  EquilibriumConfig cfg;
  cfg.state = ws.state;
  cfg.control = control;
  cfg.contacts.phi(pivot_arc(ws.state)) = pivot_phi_rad(ws.state);
  cfg.contacts.phi(ws.roll) = phi;
  cfg.pose = pose;
  cfg.com_world = pose.apply(ws.com_b);
  cfg.potential_mm = cfg.com_world.z();
  cfg.contact_at_endpoint = (phi == 0.0 || phi == kPi);
  return cfg;
}

}  // namespace

ArcId pivot_arc(LocomotionState s) {
  return (s == LocomotionState::S1 || s == LocomotionState::S2) ? ArcId::Arc2 : ArcId::Arc1;
}

double pivot_phi_rad(LocomotionState s) {
  return (s == LocomotionState::S1 || s == LocomotionState::S3) ? 0.0 : kPi;
}

ArcId rolling_arc(LocomotionState s) { return other_arc(pivot_arc(s)); }

LocomotionState state_for_pivot(ArcId arc, double phi_rad) {
  const bool at_zero = std::abs(phi_rad) < 1e-9;
  const bool at_pi = std::abs(phi_rad - kPi) < 1e-9;
  if (!at_zero && !at_pi) throw std::invalid_argument("pivot station must be 0 or pi");
  if (arc == ArcId::Arc2) return at_zero ? LocomotionState::S1 : LocomotionState::S2;
  return at_zero ? LocomotionState::S3 : LocomotionState::S4;
}

const char* to_string(LocomotionState s) {
  switch (s) {
    case LocomotionState::S1: return "S1";
    case LocomotionState::S2: return "S2";
    case LocomotionState::S3: return "S3";
    default: return "S4";
  }
}

LocomotionState parse_state(const std::string& name) {
  if (name == "S1") return LocomotionState::S1;
  if (name == "S2") return LocomotionState::S2;
  if (name == "S3") return LocomotionState::S3;
  if (name == "S4") return LocomotionState::S4;
  throw std::invalid_argument("unknown state name: " + name);
}

double potential_energy(const RobotParams& params, const ControlInput& control,
                        const RigidTransform& pose) {
  return pose.apply(com_body(params, control)).z();
}

EquilibriumConfig solve_equilibrium(const RobotParams& params, LocomotionState state,
                                    const ControlInput& control, const PivotAnchor& anchor) {
  Workspace ws = make_workspace(params, state, control);
  SearchResult r = global_search(ws);
  return finish(ws, control, anchor, r.phi, 0.0);
}

EquilibriumConfig solve_equilibrium(const RobotParams& params, LocomotionState state,
                                    const ControlInput& control, const PivotAnchor& anchor,
                                    const EquilibriumConfig& predecessor) {
  if (predecessor.state != state) {
    throw std::invalid_argument("predecessor belongs to a different state");
  }
  Workspace ws = make_workspace(params, state, control);
  const double phi_prev = predecessor.contacts.phi(ws.roll);
  SearchResult r = local_search(ws, phi_prev);

  // Heading propagation: the contact must neither slip on the ground nor on
  // the arc, so the ground track advances by the arc length traversed, in the
  // direction the contact tangent points.
  double alpha = 0.0;
  Vec3 d_prev = contact_position_body(params, ws.roll, phi_prev) - ws.pivot_body;
  const double len_prev = d_prev.norm();
  if (len_prev > 1e-12 * ws.radius) {
    Vec3 dw = predecessor.pose.rotate(d_prev / len_prev);
    const double alpha_prev = std::atan2(dw.y(), dw.x());
    Vec3 tw = predecessor.pose.rotate(arc_tangent_body(ws.roll, phi_prev));
    const double along = tw.dot(Vec3(-std::sin(alpha_prev), std::cos(alpha_prev), 0.0));
    const int eta = along >= 0.0 ? 1 : -1;
    auto f = tangency_frame(ws, r.phi);
    const double len_new = f ? f->len : len_prev;
    alpha = alpha_prev + eta * ws.radius * (r.phi - phi_prev) / len_new;
  }
  return finish(ws, control, anchor, r.phi, alpha);
}

EquilibriumConfig oracle_equilibrium(const RobotParams& params, LocomotionState state,
                                     const ControlInput& control, const PivotAnchor& anchor,
                                     double grid_deg) {
  if (!(grid_deg > 0.0) || grid_deg > 0.25) {
    throw std::invalid_argument("oracle grid must be in (0, 0.25] deg");
  }
  params.validate();
  const ArcId roll = rolling_arc(state);
  const Vec3 P = contact_position_body(params, pivot_arc(state), pivot_phi_rad(state));
  const Vec3 com_b = com_body(params, control);
  const double r = params.radius_mm();
  const double eps_len = 1e-9 * r;

  const int m = static_cast<int>(std::ceil(180.0 / grid_deg));
  std::vector<Vec3> cloud;
  cloud.reserve(2 * (m + 1));
  for (ArcId arc : {ArcId::Arc1, ArcId::Arc2}) {
    for (int i = 0; i <= m; ++i) {
      cloud.push_back(contact_position_body(params, arc, kPi * i / m));
    }
  }

  struct Candidate {
    double phi, beta, energy;
    Mat3 align;
  };
  std::optional<Candidate> best;
  double emin = kInf, emax = -kInf;

  for (int k = 0; k <= m; ++k) {
    const double phi = kPi * k / m;
    Vec3 d = contact_position_body(params, roll, phi) - P;
    const double len = d.norm();
    if (len < eps_len) continue;
    Mat3 A = Eigen::Quaterniond::FromTwoVectors(d / len, Vec3::UnitX()).toRotationMatrix();

    // Rocking about the support chord (now the world x axis): each cloud
    // point stays above the plane for a half-circle of rocking angles; the
    // feasible set is the intersection of those windows.
    bool any = false, infeasible = false;
    double cref = 0.0, lo = -kInf, hi = kInf;
    for (const Vec3& x : cloud) {
      Vec3 v = A * (x - P);
      const double rho = std::hypot(v.y(), v.z());
      if (rho < eps_len) continue;  // on the rocking axis
      double c = kPi / 2 - std::atan2(v.z(), v.y());
      if (!any) {
        cref = c;
        any = true;
      } else {
        c -= 2 * kPi * std::round((c - cref) / (2 * kPi));
      }
      lo = std::max(lo, c - kPi / 2);
      hi = std::min(hi, c + kPi / 2);
      if (lo > hi + 1e-12) {
        infeasible = true;
        break;
      }
    }
    if (!any || infeasible) continue;

    Vec3 w = A * (com_b - P);
    auto height = [&](double beta) { return w.y() * std::sin(beta) + w.z() * std::cos(beta); };
    double beta = lo;
    double e = height(lo);
    if (height(hi) < e) {
      beta = hi;
      e = height(hi);
    }
    double bmin = std::atan2(-w.y(), -w.z());
    bmin -= 2 * kPi * std::round((bmin - 0.5 * (lo + hi)) / (2 * kPi));
    if (bmin >= lo && bmin <= hi && height(bmin) < e) {
      beta = bmin;
      e = height(bmin);
    }

    emin = std::min(emin, e);
    emax = std::max(emax, e);
    if (!best || e < best->energy) best = Candidate{phi, beta, e, A};
  }

  if (!best) throw InfeasibleContact("no contact station admits a resting orientation");
  if (emax - emin < 1e-9 * r) {
    throw NoStableEquilibrium("potential is flat across all contact stations");
  }

  RigidTransform pose;
  pose.rotation = Eigen::AngleAxisd(best->beta, Vec3::UnitX()).toRotationMatrix() * best->align;
  pose.translation = Vec3(anchor.x_mm, anchor.y_mm, 0.0) - pose.rotation * P;

  EquilibriumConfig cfg;
  cfg.state = state;
  cfg.control = control;
  cfg.contacts.phi(pivot_arc(state)) = pivot_phi_rad(state);
  cfg.contacts.phi(roll) = best->phi;
  cfg.pose = pose;
  cfg.com_world = pose.apply(com_b);
  cfg.potential_mm = cfg.com_world.z();
  cfg.contact_at_endpoint = (best->phi == 0.0 || best->phi == kPi);
  return cfg;
}

double contact_angle_from_pose(const RobotParams& params, ArcId arc,
                               const RigidTransform& pose) {
  params.validate();
  auto z_at = [&](double phi) { return pose.apply(contact_position_body(params, arc, phi)).z(); };
  const int n = kArcSamples;
  double zmin = kInf, zmax = -kInf;
  int bi = 0;
  for (int i = 0; i < n; ++i) {
    const double z = z_at(kPi * i / (n - 1));
    if (z < zmin) {
      zmin = z;
      bi = i;
    }
    zmax = std::max(zmax, z);
  }
  if (zmax - zmin < 1e-9 * params.radius_mm()) {
    throw DegenerateContact("arc lies horizontal; lowest point undefined");
  }
  const double h = kPi / (n - 1);
  const double a = std::max(0.0, kPi * bi / (n - 1) - h);
  const double b = std::min(kPi, kPi * bi / (n - 1) + h);
  return golden_min(z_at, a, b, kRefineTolRad);
}

}  // namespace arcroll
