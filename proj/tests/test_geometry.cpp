#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "arcroll/geometry.hpp"

#include <cmath>
#include <random>

using namespace arcroll;

namespace {

const RobotParams kProto = RobotParams::prototype();

// Discrete reference used instead of the closed-form expressions under test:
// the arc as N point masses at midpoint stations.
Vec3 sampled_arc_mean(ArcId arc, int n) {
  Vec3 sum = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    const double phi = kPi * (i + 0.5) / n;
    sum += contact_position_body(kProto, arc, phi);
  }
  return sum / n;
}

Vec3 sampled_com(const ControlInput& control, int n) {
  Vec3 moment = Vec3::Zero();
  double mass = 0.0;
  for (ArcId arc : {ArcId::Arc1, ArcId::Arc2}) {
    const ArcParams& ap = kProto.arc(arc);
    for (int i = 0; i < n; ++i) {
      const double phi = kPi * (i + 0.5) / n;
      moment += (ap.arc_mass_g / n) * contact_position_body(kProto, arc, phi);
    }
    moment += ap.shift_mass_g * contact_position_body(kProto, arc, control.theta(arc));
    mass += ap.arc_mass_g + ap.shift_mass_g;
  }
  return moment / mass;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 axis;
  do {
    axis = Vec3(u(rng), u(rng), u(rng));
  } while (axis.norm() < 1e-3);
  axis.normalize();
  const double angle = kPi * u(rng);
  return Eigen::AngleAxisd(angle, axis).toRotationMatrix();
}

}  // namespace

TEST_CASE("arc point sets match the frame expressions") {
  const double r = kProto.radius_mm();
  CHECK(mass_position_body(kProto, ArcId::Arc1, 0.0).isApprox(Vec3(r, 0, 0), 1e-12));
  CHECK(mass_position_body(kProto, ArcId::Arc1, kPi).isApprox(Vec3(-r, 0, 0), 1e-12));
  CHECK(mass_position_body(kProto, ArcId::Arc1, kPi / 2).isApprox(Vec3(0, r, 0), 1e-12));
  CHECK(mass_position_body(kProto, ArcId::Arc2, 0.0).isApprox(Vec3(0, 0, r), 1e-12));
  CHECK(mass_position_body(kProto, ArcId::Arc2, kPi).isApprox(Vec3(0, 0, -r), 1e-12));
  CHECK(mass_position_body(kProto, ArcId::Arc2, kPi / 2).isApprox(Vec3(0, -r, 0), 1e-12));
}

TEST_CASE("every arc point sits on the sphere of radius r") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int i = 0; i < 1000; ++i) {
    for (ArcId arc : {ArcId::Arc1, ArcId::Arc2}) {
      CHECK(mass_position_body(kProto, arc, u(rng)).norm() ==
            doctest::Approx(kProto.radius_mm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("stations outside [0, pi] are rejected") {
  CHECK_THROWS_AS(mass_position_body(kProto, ArcId::Arc1, -0.01), std::domain_error);
  CHECK_THROWS_AS(mass_position_body(kProto, ArcId::Arc2, kPi + 0.01), std::domain_error);
  CHECK_THROWS_AS(ControlInput(0.0, 3.2), std::domain_error);
}

TEST_CASE("inter-arc transform carries arc-local points to the body frame") {
  const RigidTransform t12 = transform_2_to_body();
  Mat3 expected;
  expected << 0, 0, 1, 0, -1, 0, 1, 0, 0;
  CHECK((t12.rotation - expected).cwiseAbs().maxCoeff() == doctest::Approx(0.0));
  CHECK(t12.translation.norm() == doctest::Approx(0.0));

  // Consistency: mapping arc 1's curve through the transform reproduces the
  // arc 2 expression for random stations.
  const double tol = 1e-12 * kProto.radius_mm();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng);
    Vec3 local = mass_position_body(kProto, ArcId::Arc1, a);  // same curve shape
    Vec3 mapped = t12.apply(local);
    Vec3 direct = mass_position_body(kProto, ArcId::Arc2, a);
    CHECK((mapped - direct).norm() <= tol);
  }
}

TEST_CASE("arc centroid matches the sampled reference and frozen value") {
  Vec3 c1 = arc_centroid_body(kProto, ArcId::Arc1);
  Vec3 c2 = arc_centroid_body(kProto, ArcId::Arc2);
  Vec3 ref = sampled_arc_mean(ArcId::Arc1, 1000000);
  CHECK((c1 - ref).norm() < 1e-6 * kProto.radius_mm());
  CHECK(c1.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c1.y() == doctest::Approx(173.4788879701659).epsilon(1e-12));
  CHECK(c1.z() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c2.isApprox(Vec3(0.0, -173.4788879701659, 0.0), 1e-12));
}

TEST_CASE("center of mass: symmetric configurations cancel") {
  Vec3 com = com_body(kProto, ControlInput(kPi / 2, kPi / 2));
  CHECK(com.norm() < 1e-12 * kProto.radius_mm());
}

TEST_CASE("center of mass matches the point-mass reference") {
  ControlInput c(0.0, kPi / 2);
  Vec3 com = com_body(kProto, c);
  Vec3 ref = sampled_com(c, 100000);
  CHECK((com - ref).norm() < 1e-6 * kProto.radius_mm());
  CHECK(com.x() == doctest::Approx(63.954081632653065).epsilon(1e-12));
  CHECK(com.y() == doctest::Approx(-63.954081632653065).epsilon(1e-12));
  CHECK(com.z() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("center of mass respects the arc relabeling symmetry") {
  const RigidTransform t12 = transform_2_to_body();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, kPi);
  for (int i = 0; i < 200; ++i) {
    const double a = u(rng), b = u(rng);
    Vec3 swapped = com_body(kProto, ControlInput(b, a));
    Vec3 mapped = t12.apply(com_body(kProto, ControlInput(a, b)));
    CHECK((swapped - mapped).norm() < 1e-9 * kProto.radius_mm());
  }
}

TEST_CASE("rigid transform composition stays orthonormal") {
  std::mt19937_64 rng(42);
  RigidTransform acc = RigidTransform::identity();
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 1000000; ++i) {
    RigidTransform step{random_rotation(rng), Vec3(u(rng), u(rng), u(rng))};
    acc = acc.compose(step);
  }
  CHECK(acc.is_orthonormal(1e-9));
}

TEST_CASE("rigid transform inverse composes to identity") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 100; ++i) {
    RigidTransform t{random_rotation(rng), Vec3(1.0 * i, -2.0 * i, 3.0)};
    RigidTransform id = t.compose(t.inverse());
    CHECK((id.rotation - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(id.translation.norm() < 1e-9);
  }
}

TEST_CASE("parameter validation rejects non-physical inputs") {
  RobotParams p = kProto;
  p.arc1.radius_mm = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = kProto;
  p.arc2.radius_mm = 300.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = kProto;
  p.body_length_mm = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_NOTHROW(kProto.validate());
}
