#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gesturegan/rotation.hpp"
#include "gesturegan/types.hpp"

namespace gesturegan {

enum class Channel { Xposition, Yposition, Zposition, Xrotation, Yrotation, Zrotation };

std::string_view channel_name(Channel c);

struct Joint {
  std::string name;
  int parent = -1;  // -1 for the root
  Vec3 offset = Vec3::Zero();
  std::vector<Channel> channels;

  RotationOrder rotation_order() const;
  bool has_position_channels() const;
};

struct EndSite {
  int parent = 0;
  Vec3 offset = Vec3::Zero();
};

// Skeleton in topological order: every parent index is smaller than its
// child's index and joint 0 is the single root.
struct JointHierarchy {
  std::vector<Joint> joints;
  std::vector<EndSite> end_sites;

  int size() const { return static_cast<int>(joints.size()); }
  std::optional<int> find(std::string_view name) const;
  std::vector<std::vector<int>> children() const;
  void validate() const;
};

enum class Representation { Euler, ExpMap };

// Per-joint rotation triples, one row per frame. Euler rows hold degrees in
// each joint's channel order; ExpMap rows hold axis-angle radians.
struct MotionClip {
  double fps = 20.0;
  Representation representation = Representation::Euler;
  Matrix frames;            // T x 3J
  Matrix root_translation;  // T x 3 when the root has position channels

  int frame_count() const { return static_cast<int>(frames.rows()); }
  int joint_count() const { return static_cast<int>(frames.cols() / 3); }
};

struct BvhData {
  JointHierarchy hierarchy;
  MotionClip clip;
};

BvhData parse_bvh(std::string_view text);
BvhData read_bvh_file(const std::string& path);
std::string write_bvh(const JointHierarchy& h, const MotionClip& m);
void write_bvh_file(const std::string& path, const JointHierarchy& h, const MotionClip& m);

MotionClip resample_fps(const MotionClip& m, double target_fps);

struct JointSelection {
  std::vector<std::string> names;

  // Fifteen upper-body joints by their usual mocap names: four spine joints, two neck
  // joints, the head, both shoulders and three joints per arm.
  static JointSelection upper_body_default();
};

BvhData select_joints(const JointHierarchy& h, const MotionClip& m, const JointSelection& s);

// Euler <-> exponential map per joint. The ExpMap direction applies
// continuity correction along time for each joint.
MotionClip to_expmap(const JointHierarchy& h, const MotionClip& euler);
MotionClip to_euler(const JointHierarchy& h, const MotionClip& expmap);

// World-space joint positions (J x 3) for one frame. The root sits at its own
// offset; translation channels are ignored.
Matrix forward_kinematics(const JointHierarchy& h, std::span<const double> pose,
                          Representation representation = Representation::Euler);

// J x 3 local rotation matrices for one frame.
std::vector<Mat3> local_rotations(const JointHierarchy& h, std::span<const double> pose,
                                  Representation representation);

}  // namespace gesturegan
