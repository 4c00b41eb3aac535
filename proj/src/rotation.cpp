#include "gesturegan/rotation.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "gesturegan/errors.hpp"

namespace gesturegan {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Below this cosine of the middle angle the decomposition is treated as
// gimbal-locked.
constexpr double kGimbalCos = 1e-12;

bool finite3(const double* v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

}  // namespace

RotationOrder::RotationOrder(Axis first, Axis second, Axis third)
    : axes_{first, second, third} {
  if (first == second || second == third || first == third) {
    throw InvalidInputError("rotation order must use three distinct axes");
  }
}

RotationOrder RotationOrder::parse(std::string_view name) {
  if (name.size() != 3) {
    throw InvalidInputError("rotation order must have three axes: " + std::string(name));
  }
  std::array<Axis, 3> axes{};
  for (int i = 0; i < 3; ++i) {
    switch (std::toupper(static_cast<unsigned char>(name[i]))) {
      case 'X': axes[i] = Axis::X; break;
      case 'Y': axes[i] = Axis::Y; break;
      case 'Z': axes[i] = Axis::Z; break;
      default:
        throw InvalidInputError("unknown rotation axis in order: " + std::string(name));
    }
  }
  return RotationOrder(axes[0], axes[1], axes[2]);
}

std::string RotationOrder::name() const {
  std::string out;
  for (Axis a : axes_) out.push_back("XYZ"[static_cast<int>(a)]);
  return out;
}

int RotationOrder::parity() const {
  const int i = static_cast<int>(axes_[0]);
  const int j = static_cast<int>(axes_[1]);
  return (j == (i + 1) % 3) ? 1 : -1;
}

Mat3 axis_rotation(Axis axis, double radians) {
  return Eigen::AngleAxisd(radians, Vec3::Unit(static_cast<int>(axis))).toRotationMatrix();
}

Mat3 euler_to_matrix(const EulerAngles& e) {
  Mat3 r = Mat3::Identity();
  for (int i = 0; i < 3; ++i) r = r * axis_rotation(e.order.axis(i), e.degrees[i] * kDegToRad);
  return r;
}

Eigen::Quaterniond euler_to_quaternion(const EulerAngles& e) {
  Eigen::Quaterniond q = Eigen::Quaterniond::Identity();
  for (int i = 0; i < 3; ++i) {
    q = q * Eigen::Quaterniond(Eigen::AngleAxisd(e.degrees[i] * kDegToRad,
                                                 Vec3::Unit(static_cast<int>(e.order.axis(i)))));
  }
  return q.normalized();
}

ExpMap quaternion_to_expmap(const Eigen::Quaterniond& q_in) {
  Eigen::Quaterniond q = q_in.normalized();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  const Vec3 v = q.vec();
  const double s = v.norm();
  if (s < kSmallAngle) {
    // First-order limit of 2*atan2(s, w) * v / s.
    return ExpMap{2.0 * v / q.w()};
  }
  const double angle = 2.0 * std::atan2(s, q.w());
  return ExpMap{v * (angle / s)};
}

Eigen::Quaterniond expmap_to_quaternion(const ExpMap& m) {
  const double angle = m.axis_angle.norm();
  if (angle < kSmallAngle) {
    Eigen::Quaterniond q(1.0, 0.5 * m.axis_angle.x(), 0.5 * m.axis_angle.y(),
                         0.5 * m.axis_angle.z());
    return q.normalized();
  }
  const Vec3 axis = m.axis_angle / angle;
  const double s = std::sin(0.5 * angle);
  return Eigen::Quaterniond(std::cos(0.5 * angle), s * axis.x(), s * axis.y(), s * axis.z());
}

Mat3 expmap_to_matrix(const ExpMap& m) {
  return expmap_to_quaternion(m).toRotationMatrix();
}

ExpMap euler_to_expmap(const EulerAngles& e) {
  if (!finite3(e.degrees.data())) throw InvalidInputError("non-finite Euler angles");
  return quaternion_to_expmap(euler_to_quaternion(e));
}

EulerAngles matrix_to_euler(const Mat3& r, RotationOrder order) {
  const int i = static_cast<int>(order.axis(0));
  const int j = static_cast<int>(order.axis(1));
  const int k = static_cast<int>(order.axis(2));
  const double s = order.parity();

  EulerAngles out;
  out.order = order;
  const double cos_mid = std::hypot(r(i, i), r(i, j));
  const double mid = std::atan2(s * r(i, k), cos_mid);
  double first = 0.0;
  double third = 0.0;
  if (cos_mid > kGimbalCos) {
    first = std::atan2(-s * r(j, k), r(k, k));
    third = std::atan2(-s * r(i, j), r(i, i));
  } else {
    // Gimbal lock: the third angle is redundant, fold it into the first.
    first = std::atan2(s * r(k, j), r(j, j));
  }
  out.degrees = {first * kRadToDeg, mid * kRadToDeg, third * kRadToDeg};
  return out;
}

EulerAngles expmap_to_euler(const ExpMap& m, RotationOrder order) {
  if (!m.axis_angle.allFinite()) throw InvalidInputError("non-finite exponential map");
  return matrix_to_euler(expmap_to_matrix(m), order);
}

std::vector<ExpMap> expmap_continuity_fix(std::span<const ExpMap> seq) {
  std::vector<ExpMap> out(seq.begin(), seq.end());
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  for (std::size_t t = 1; t < out.size(); ++t) {
    const Vec3& prev = out[t - 1].axis_angle;
    const Vec3 v = out[t].axis_angle;
    const double angle = v.norm();
    if (angle < kSmallAngle) continue;
    const Vec3 axis = v / angle;
    // Representatives are axis * (angle + 2*pi*n); the best n is near the
    // projection of the previous frame onto the axis.
    const double centre = std::round((axis.dot(prev) - angle) / kTwoPi);
    Vec3 best = v;
    double best_dist = (v - prev).squaredNorm();
    for (double n = centre - 1.0; n <= centre + 1.0; n += 1.0) {
      const Vec3 candidate = axis * (angle + kTwoPi * n);
      const double dist = (candidate - prev).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = candidate;
      }
    }
    out[t].axis_angle = best;
  }
  return out;
}

}  // namespace gesturegan
