#include "arcroll/geometry.hpp"

#include <cmath>
#include <string>

namespace arcroll {

namespace {

void check_station(double angle_rad, const char* what) {
  if (!(angle_rad >= 0.0 && angle_rad <= kPi)) {
    throw std::domain_error(std::string(what) + " outside [0, pi]");
  }
}

}  // namespace

const char* to_string(ArcId arc) { return arc == ArcId::Arc1 ? "arc1" : "arc2"; }

RobotParams RobotParams::prototype() {
  RobotParams p;
  p.arc1 = {272.5, 1300.0, 1150.0};
  p.arc2 = {272.5, 1300.0, 1150.0};
  p.body_length_mm = 585.0;
  return p;
}

void RobotParams::validate() const {
  for (const ArcParams* a : {&arc1, &arc2}) {
    if (!(a->radius_mm > 0.0) || !(a->arc_mass_g > 0.0) || !(a->shift_mass_g > 0.0)) {
      throw std::invalid_argument("arc parameters must be positive");
    }
  }
  if (std::abs(arc1.radius_mm - arc2.radius_mm) > 1e-9 * arc1.radius_mm) {
    throw std::invalid_argument("arc radii must be equal");
  }
  if (!(body_length_mm > 0.0)) {
    throw std::invalid_argument("body length must be positive");
  }
}

ControlInput::ControlInput(double t1, double t2) : theta1_rad(t1), theta2_rad(t2) {
  check_station(t1, "theta1");
  check_station(t2, "theta2");
}

bool RigidTransform::is_orthonormal(double tol) const {
  Mat3 err = rotation.transpose() * rotation - Mat3::Identity();
  return err.cwiseAbs().maxCoeff() <= tol && rotation.determinant() > 0.0;
}

Vec3 mass_position_body(const RobotParams& params, ArcId arc, double theta_rad) {
  check_station(theta_rad, "theta");
  return contact_position_body(params, arc, theta_rad);
}

Vec3 contact_position_body(const RobotParams& params, ArcId arc, double phi_rad) {
  check_station(phi_rad, "phi");
  const double r = params.arc(arc).radius_mm;
  const double c = std::cos(phi_rad);
  const double s = std::sin(phi_rad);
  if (arc == ArcId::Arc1) return {r * c, r * s, 0.0};
  return {0.0, -r * s, r * c};
}

Vec3 arc_tangent_body(ArcId arc, double phi_rad) {
  check_station(phi_rad, "phi");
  const double c = std::cos(phi_rad);
  const double s = std::sin(phi_rad);
  if (arc == ArcId::Arc1) return {-s, c, 0.0};
  return {0.0, -c, -s};
}

RigidTransform transform_2_to_body() {
  RigidTransform t;
  t.rotation << 0, 0, 1,
                0, -1, 0,
                1, 0, 0;
  t.translation = Vec3::Zero();
  return t;
}

Vec3 arc_centroid_body(const RobotParams& params, ArcId arc) {
  // Mean of r (cos a, sin a, 0) over a in [0, pi] is (0, 2r/pi, 0).
  const double y = 2.0 * params.arc(arc).radius_mm / kPi;
  if (arc == ArcId::Arc1) return {0.0, y, 0.0};
  return transform_2_to_body().apply(Vec3{0.0, y, 0.0});
}

Vec3 com_body(const RobotParams& params, const ControlInput& control) {
  params.validate();
  Vec3 moment = Vec3::Zero();
  for (ArcId arc : {ArcId::Arc1, ArcId::Arc2}) {
    const ArcParams& ap = params.arc(arc);
    moment += ap.arc_mass_g * arc_centroid_body(params, arc);
    moment += ap.shift_mass_g * mass_position_body(params, arc, control.theta(arc));
  }
  return moment / params.total_mass_g();
}

}  // namespace arcroll
