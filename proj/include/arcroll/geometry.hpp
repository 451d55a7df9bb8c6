// Body-frame geometry of a two-arc rolling chassis: arc point sets, shifting
// mass positions, centroids, and the rigid transform between the arc frames.
#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace arcroll {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// ============================================================================
// Identifiers and parameters
// ============================================================================

enum class ArcId { Arc1, Arc2 };

constexpr ArcId other_arc(ArcId arc) {
  return arc == ArcId::Arc1 ? ArcId::Arc2 : ArcId::Arc1;
}

const char* to_string(ArcId arc);

struct ArcParams {
  double radius_mm = 0.0;
  double arc_mass_g = 0.0;    // mass of the semicircular tube, uniform density
  double shift_mass_g = 0.0;  // internal mass that travels along the arc
};

struct RobotParams {
  ArcParams arc1;
  ArcParams arc2;
  // Physical outer diameter, used to normalize speeds to body lengths per
  // second. This is the measured chassis size, not 2 * centerline radius.
  double body_length_mm = 0.0;

  static RobotParams prototype();

  const ArcParams& arc(ArcId id) const { return id == ArcId::Arc1 ? arc1 : arc2; }
  double radius_mm() const { return arc1.radius_mm; }
  double total_mass_g() const {
    return arc1.arc_mass_g + arc2.arc_mass_g + arc1.shift_mass_g + arc2.shift_mass_g;
  }

  // Throws std::invalid_argument if any mass or length is non-positive or the
  // two arc radii differ.
  void validate() const;
};

// Control input: angular station of each shifting mass along its arc.
struct ControlInput {
  double theta1_rad = 0.0;
  double theta2_rad = 0.0;

  ControlInput() = default;
  ControlInput(double t1, double t2);

  double theta(ArcId arc) const { return arc == ArcId::Arc1 ? theta1_rad : theta2_rad; }
  double& theta(ArcId arc) { return arc == ArcId::Arc1 ? theta1_rad : theta2_rad; }
};

// Ground-contact station of each arc.
struct ContactAngles {
  double phi1_rad = 0.0;
  double phi2_rad = 0.0;

  double phi(ArcId arc) const { return arc == ArcId::Arc1 ? phi1_rad : phi2_rad; }
  double& phi(ArcId arc) { return arc == ArcId::Arc1 ? phi1_rad : phi2_rad; }
};

// ============================================================================
// Rigid transforms
// ============================================================================

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 rotate(const Vec3& v) const { return rotation * v; }

  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
  RigidTransform inverse() const {
    Mat3 rt = rotation.transpose();
    return {rt, -(rt * translation)};
  }

  bool is_orthonormal(double tol = 1e-9) const;
};

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return a.compose(b);
}

// ============================================================================
// Arc geometry in the body frame
// ============================================================================
//
// Arc 1 spans {r (cos a, sin a, 0) : a in [0, pi]} and arc 2, after mapping
// through the fixed inter-arc transform, spans {r (0, -sin a, cos a)}. The
// body frame coincides with arc 1's frame.

// Position of the shifting mass of `arc` at station theta_rad in [0, pi].
Vec3 mass_position_body(const RobotParams& params, ArcId arc, double theta_rad);

// Material point of `arc` at station phi_rad in [0, pi]; same curve as above.
Vec3 contact_position_body(const RobotParams& params, ArcId arc, double phi_rad);

// Unit tangent of the arc curve at the given station (d/dphi, normalized).
Vec3 arc_tangent_body(ArcId arc, double phi_rad);

// Fixed transform taking arc-2 local coordinates into the body frame.
RigidTransform transform_2_to_body();

// Centroid of the bare arc tube (uniform line density).
Vec3 arc_centroid_body(const RobotParams& params, ArcId arc);

// Center of mass of the full assembly (two tubes plus two shifting masses).
Vec3 com_body(const RobotParams& params, const ControlInput& control);

}  // namespace arcroll
