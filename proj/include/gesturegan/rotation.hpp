#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesturegan/types.hpp"

namespace gesturegan {

enum class Axis { X = 0, Y = 1, Z = 2 };

// Order in which the three rotation channels are applied, first listed axis
// outermost: R = R_first(a0) * R_second(a1) * R_third(a2).
class RotationOrder {
 public:
  constexpr RotationOrder() = default;
  RotationOrder(Axis first, Axis second, Axis third);

  static RotationOrder parse(std::string_view name);  // "XYZ", "zxy", ...
  std::string name() const;

  Axis axis(int i) const { return axes_[i]; }
  // +1 for cyclic permutations of XYZ, -1 otherwise.
  int parity() const;

  friend bool operator==(const RotationOrder&, const RotationOrder&) = default;

 private:
  std::array<Axis, 3> axes_{Axis::X, Axis::Y, Axis::Z};
};

struct EulerAngles {
  std::array<double, 3> degrees{0.0, 0.0, 0.0};  // in channel order
  RotationOrder order;
};

// Axis-angle vector in radians.
struct ExpMap {
  Vec3 axis_angle = Vec3::Zero();
};

inline constexpr double kSmallAngle = 1e-8;

Mat3 axis_rotation(Axis axis, double radians);
Mat3 euler_to_matrix(const EulerAngles& e);
Mat3 expmap_to_matrix(const ExpMap& m);

Eigen::Quaterniond euler_to_quaternion(const EulerAngles& e);
// Unit quaternion to canonical exponential map (magnitude in [0, pi]).
ExpMap quaternion_to_expmap(const Eigen::Quaterniond& q);
Eigen::Quaterniond expmap_to_quaternion(const ExpMap& m);

ExpMap euler_to_expmap(const EulerAngles& e);
EulerAngles expmap_to_euler(const ExpMap& m, RotationOrder order);
EulerAngles matrix_to_euler(const Mat3& r, RotationOrder order);

// Picks, frame by frame, the equivalent axis-angle representative closest to
// the previous frame. Rotations are unchanged.
std::vector<ExpMap> expmap_continuity_fix(std::span<const ExpMap> seq);

}  // namespace gesturegan
