#include <cmath>
#include <numbers>
#include <unordered_set>

#include "gesturegan/errors.hpp"
#include "gesturegan/motion.hpp"

namespace gesturegan {

MotionClip resample_fps(const MotionClip& m, double target_fps) {
  if (!(target_fps > 0.0) || !(m.fps > 0.0)) throw InvalidInputError("fps must be positive");
  const double ratio = m.fps / target_fps;
  const double step = std::round(ratio);
  // Frame times stored with limited precision give ratios like 2.99999.
  if (step < 1.0 || std::abs(ratio - step) > 1e-3) {
    throw UnsupportedRatioError("cannot decimate " + std::to_string(m.fps) + " fps to " +
                                std::to_string(target_fps) + " fps");
  }
  const int stride = static_cast<int>(step);
  const int out_frames = (m.frame_count() + stride - 1) / stride;
  MotionClip out;
  out.fps = target_fps;
  out.representation = m.representation;
  out.frames.resize(out_frames, m.frames.cols());
  if (m.root_translation.size() > 0) out.root_translation.resize(out_frames, 3);
  for (int i = 0; i < out_frames; ++i) {
    out.frames.row(i) = m.frames.row(i * stride);
    if (m.root_translation.size() > 0) out.root_translation.row(i) = m.root_translation.row(i * stride);
  }
  return out;
}

JointSelection JointSelection::upper_body_default() {
  return JointSelection{{"Spine", "Spine1", "Spine2", "Spine3", "Neck", "Neck1", "Head",
                         "RightShoulder", "RightArm", "RightForeArm", "RightHand",
                         "LeftShoulder", "LeftArm", "LeftForeArm", "LeftHand"}};
}

BvhData select_joints(const JointHierarchy& h, const MotionClip& m, const JointSelection& s) {
  h.validate();
  if (m.frames.cols() != 3 * h.size()) throw InvalidInputError("clip width does not match hierarchy");
  std::vector<char> keep(h.joints.size(), 0);
  for (const std::string& name : s.names) {
    auto idx = h.find(name);
    if (!idx) throw MissingJointError("selected joint '" + name + "' is not in the hierarchy");
    keep[*idx] = 1;
  }

  std::vector<int> new_index(h.joints.size(), -1);
  BvhData out;
  JointHierarchy& sel = out.hierarchy;
  for (int i = 0; i < h.size(); ++i) {
    if (!keep[i]) continue;
    Joint j = h.joints[i];
    // Walk up through pruned ancestors, accumulating their offsets.
    int p = h.joints[i].parent;
    while (p >= 0 && !keep[p]) {
      j.offset += h.joints[p].offset;
      p = h.joints[p].parent;
    }
    j.parent = p >= 0 ? new_index[p] : -1;
    if (j.parent < 0 && !sel.joints.empty()) {
      throw InvalidInputError("selection has more than one root (joint '" + j.name + "')");
    }
    new_index[i] = sel.size();
    sel.joints.push_back(std::move(j));
  }
  if (sel.joints.empty()) throw InvalidInputError("empty joint selection");

  std::vector<char> has_child(sel.joints.size(), 0);
  for (int i = 1; i < sel.size(); ++i) has_child[sel.joints[i].parent] = 1;
  std::vector<char> has_end(sel.joints.size(), 0);
  for (const EndSite& e : h.end_sites) {
    if (keep[e.parent]) {
      sel.end_sites.push_back({new_index[e.parent], e.offset});
      has_end[new_index[e.parent]] = 1;
    }
  }
  // Every leaf needs an End Site to be valid BVH.
  for (int i = 0; i < sel.size(); ++i) {
    if (!has_child[i] && !has_end[i]) sel.end_sites.push_back({i, Vec3::Zero()});
  }

  MotionClip& clip = out.clip;
  clip.fps = m.fps;
  clip.representation = m.representation;
  clip.frames.resize(m.frame_count(), 3 * sel.size());
  for (int i = 0; i < h.size(); ++i) {
    if (keep[i]) clip.frames.middleCols(3 * new_index[i], 3) = m.frames.middleCols(3 * i, 3);
  }
  if (keep[0]) clip.root_translation = m.root_translation;
  return out;
}

MotionClip to_expmap(const JointHierarchy& h, const MotionClip& euler) {
  if (euler.representation != Representation::Euler) throw InvalidInputError("clip is not Euler");
  if (euler.frames.cols() != 3 * h.size()) throw InvalidInputError("clip width does not match hierarchy");
  MotionClip out = euler;
  out.representation = Representation::ExpMap;
  const int T = euler.frame_count();
  std::vector<ExpMap> seq(T);
  for (int j = 0; j < h.size(); ++j) {
    const RotationOrder order = h.joints[j].rotation_order();
    for (int t = 0; t < T; ++t) {
      EulerAngles e{{euler.frames(t, 3 * j), euler.frames(t, 3 * j + 1), euler.frames(t, 3 * j + 2)}, order};
      seq[t] = euler_to_expmap(e);
    }
    const auto fixed = expmap_continuity_fix(seq);
    for (int t = 0; t < T; ++t) out.frames.block<1, 3>(t, 3 * j) = fixed[t].axis_angle.transpose();
  }
  return out;
}

MotionClip to_euler(const JointHierarchy& h, const MotionClip& expmap) {
  if (expmap.representation != Representation::ExpMap) throw InvalidInputError("clip is not ExpMap");
  if (expmap.frames.cols() != 3 * h.size()) throw InvalidInputError("clip width does not match hierarchy");
  MotionClip out = expmap;
  out.representation = Representation::Euler;
  for (int j = 0; j < h.size(); ++j) {
    const RotationOrder order = h.joints[j].rotation_order();
    for (int t = 0; t < expmap.frame_count(); ++t) {
      ExpMap m{expmap.frames.block<1, 3>(t, 3 * j).transpose()};
      const EulerAngles e = expmap_to_euler(m, order);
      for (int k = 0; k < 3; ++k) out.frames(t, 3 * j + k) = e.degrees[k];
    }
  }
  return out;
}

std::vector<Mat3> local_rotations(const JointHierarchy& h, std::span<const double> pose,
                                  Representation representation) {
  if (static_cast<int>(pose.size()) != 3 * h.size()) {
    throw InvalidInputError("pose width " + std::to_string(pose.size()) + " does not match " +
                            std::to_string(h.size()) + " joints");
  }
  std::vector<Mat3> out(h.joints.size());
  for (int j = 0; j < h.size(); ++j) {
    if (representation == Representation::Euler) {
      out[j] = euler_to_matrix({{pose[3 * j], pose[3 * j + 1], pose[3 * j + 2]}, h.joints[j].rotation_order()});
    } else {
      out[j] = expmap_to_matrix({Vec3(pose[3 * j], pose[3 * j + 1], pose[3 * j + 2])});
    }
  }
  return out;
}

Matrix forward_kinematics(const JointHierarchy& h, std::span<const double> pose,
                          Representation representation) {
  const auto local = local_rotations(h, pose, representation);
  std::vector<Mat3> world(h.joints.size());
  Matrix positions(h.size(), 3);
  for (int j = 0; j < h.size(); ++j) {
    const int p = h.joints[j].parent;
    if (p < 0) {
      world[j] = local[j];
      positions.row(j) = h.joints[j].offset.transpose();
    } else {
      world[j] = world[p] * local[j];
      positions.row(j) = positions.row(p) + (world[p] * h.joints[j].offset).transpose();
    }
  }
  return positions;
}

}  // namespace gesturegan
