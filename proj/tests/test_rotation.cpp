#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gesturegan/errors.hpp"
#include "gesturegan/random.hpp"
#include "gesturegan/rotation.hpp"
#include "support/oracles.hpp"

using namespace gesturegan;

namespace {

constexpr double kPi = std::numbers::pi;
const char* kOrders[] = {"XYZ", "XZY", "YXZ", "YZX", "ZXY", "ZYX"};

EulerAngles random_euler(Rng& rng, const char* order) {
  return {{rng.uniform(-180.0, 180.0), rng.uniform(-180.0, 180.0), rng.uniform(-180.0, 180.0)},
          RotationOrder::parse(order)};
}

double frob(const Mat3& a, const Mat3& b) { return (a - b).norm(); }

}  // namespace

TEST_CASE("euler matrix agrees with elementary rotation products") {
  Rng rng(11);
  for (const char* o : kOrders) {
    for (int i = 0; i < 50; ++i) {
      const EulerAngles e = random_euler(rng, o);
      CHECK(frob(euler_to_matrix(e), oracle::euler_matrix(o, e.degrees[0], e.degrees[1], e.degrees[2])) < 1e-12);
    }
  }
}

TEST_CASE("euler_to_expmap identity and single-axis cases") {
  for (const char* o : kOrders) {
    const ExpMap m = euler_to_expmap({{0, 0, 0}, RotationOrder::parse(o)});
    CHECK(m.axis_angle.norm() == 0.0);
  }
  const ExpMap x = euler_to_expmap({{90, 0, 0}, RotationOrder::parse("XYZ")});
  CHECK(x.axis_angle.x() == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK(std::abs(x.axis_angle.y()) < 1e-12);
  CHECK(std::abs(x.axis_angle.z()) < 1e-12);
}

TEST_CASE("expmap_to_euler identity and half turn") {
  const EulerAngles z = expmap_to_euler({Vec3::Zero()}, RotationOrder::parse("ZXY"));
  for (double d : z.degrees) CHECK(d == 0.0);
  const EulerAngles h = expmap_to_euler({Vec3(kPi, 0, 0)}, RotationOrder::parse("XYZ"));
  CHECK(std::abs(std::abs(h.degrees[0]) - 180.0) < 1e-9);
  CHECK(std::abs(h.degrees[1]) < 1e-9);
  CHECK(std::abs(h.degrees[2]) < 1e-9);
}

TEST_CASE("random round trips preserve the rotation matrix") {
  Rng rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const char* o = kOrders[i % 6];
    const EulerAngles e = random_euler(rng, o);
    const ExpMap m = euler_to_expmap(e);
    CHECK(m.axis_angle.norm() <= kPi + 1e-12);
    const Mat3 ref = oracle::euler_matrix(o, e.degrees[0], e.degrees[1], e.degrees[2]);
    CHECK(frob(oracle::rodrigues(m.axis_angle), ref) < 1e-9);
    const EulerAngles back = expmap_to_euler(m, e.order);
    CHECK(frob(oracle::euler_matrix(o, back.degrees[0], back.degrees[1], back.degrees[2]), ref) < 1e-9);
  }
}

TEST_CASE("gimbal lock zeroes the third angle") {
  for (const char* o : kOrders) {
    for (double mid : {90.0, -90.0}) {
      const EulerAngles e{{30.0, mid, 40.0}, RotationOrder::parse(o)};
      const EulerAngles back = matrix_to_euler(euler_to_matrix(e), e.order);
      CHECK(back.degrees[2] == 0.0);
      CHECK(frob(euler_to_matrix(back), euler_to_matrix(e)) < 1e-9);
    }
  }
}

TEST_CASE("tiny rotations survive the round trip") {
  const EulerAngles e{{1e-9, -2e-9, 3e-10}, RotationOrder::parse("ZXY")};
  const ExpMap m = euler_to_expmap(e);
  CHECK(m.axis_angle.norm() > 0.0);
  CHECK(frob(expmap_to_matrix(m), euler_to_matrix(e)) < 1e-15);
}

TEST_CASE("non-finite input is rejected") {
  CHECK_THROWS_AS(euler_to_expmap({{NAN, 0, 0}, RotationOrder::parse("XYZ")}), InvalidInputError);
  CHECK_THROWS_AS(expmap_to_euler({Vec3(INFINITY, 0, 0)}, RotationOrder::parse("XYZ")), InvalidInputError);
  CHECK_THROWS_AS(RotationOrder::parse("XXY"), InvalidInputError);
}

TEST_CASE("continuity fix on constant and single sequences") {
  const std::vector<ExpMap> one{{Vec3(0.1, 0.2, 0.3)}};
  const auto fixed_one = expmap_continuity_fix(one);
  REQUIRE(fixed_one.size() == 1);
  CHECK(fixed_one[0].axis_angle == one[0].axis_angle);
  const std::vector<ExpMap> constant(10, ExpMap{Vec3(1.0, -0.5, 0.25)});
  for (const auto& m : expmap_continuity_fix(constant)) CHECK(m.axis_angle == constant[0].axis_angle);
}

TEST_CASE("continuity fix through a 181 degree sweep") {
  // Slow rotation about a tilted axis from 0 to 181 degrees.
  const Vec3 axis = Vec3(0.3, 1.0, -0.2).normalized();
  std::vector<ExpMap> raw;
  for (int i = 0; i <= 181; ++i) {
    const double a = i * kPi / 180.0;
    raw.push_back(quaternion_to_expmap(Eigen::Quaterniond(Eigen::AngleAxisd(a, axis))));
  }
  const auto fixed = expmap_continuity_fix(raw);
  double raw_jump = 0.0, fixed_jump = 0.0;
  for (std::size_t i = 1; i < raw.size(); ++i) {
    raw_jump = std::max(raw_jump, (raw[i].axis_angle - raw[i - 1].axis_angle).norm());
    fixed_jump = std::max(fixed_jump, (fixed[i].axis_angle - fixed[i - 1].axis_angle).norm());
    CHECK(frob(expmap_to_matrix(fixed[i]), expmap_to_matrix(raw[i])) < 1e-9);
  }
  CHECK(raw_jump > 6.0);
  CHECK(fixed_jump < kPi / 180.0 + 1e-9);
  CHECK(fixed_jump < raw_jump);
  CHECK(fixed.back().axis_angle.norm() == doctest::Approx(181.0 * kPi / 180.0));
}

TEST_CASE("continuity fix keeps rotations on random walks") {
  Rng rng(5);
  std::vector<ExpMap> seq;
  Vec3 w(0.5, 2.5, -0.7);
  for (int i = 0; i < 300; ++i) {
    w += Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
    seq.push_back(quaternion_to_expmap(Eigen::Quaterniond(expmap_to_matrix({w}))));
  }
  const auto fixed = expmap_continuity_fix(seq);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    CHECK(frob(expmap_to_matrix(fixed[i]), expmap_to_matrix(seq[i])) < 1e-9);
  }
}
