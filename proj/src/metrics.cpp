#include <cmath>
#include <sstream>

#include "gesturegan/errors.hpp"
#include "gesturegan/evaluation.hpp"

namespace gesturegan {
namespace {

Matrix diff_rows(const Matrix& m, double fps) {
  return (m.bottomRows(m.rows() - 1) - m.topRows(m.rows() - 1)) * fps;
}

double mean_joint_magnitude(const Matrix& d) {
  const Eigen::Index joints = d.cols() / 3;
  double sum = 0.0;
  for (Eigen::Index t = 0; t < d.rows(); ++t) {
    for (Eigen::Index j = 0; j < joints; ++j) sum += d.block(t, 3 * j, 1, 3).norm();
  }
  return sum / static_cast<double>(d.rows() * joints);
}

}  // namespace

TrajectorySet joint_trajectories(const JointHierarchy& h, const MotionClip& clip) {
  const int J = h.size();
  TrajectorySet out(clip.frames.rows(), 3 * J);
  std::vector<double> pose(static_cast<std::size_t>(clip.frames.cols()));
  for (Eigen::Index t = 0; t < clip.frames.rows(); ++t) {
    for (Eigen::Index c = 0; c < clip.frames.cols(); ++c) pose[c] = clip.frames(t, c);
    const Matrix p = forward_kinematics(h, pose, clip.representation);
    for (int j = 0; j < J; ++j) out.block(t, 3 * j, 1, 3) = p.row(j);
  }
  return out;
}

MotionStatistics motion_statistics(const TrajectorySet& tr, double fps) {
  if (tr.rows() < 4) throw TooShortError("motion statistics need at least 4 frames");
  if (tr.cols() == 0 || tr.cols() % 3 != 0) throw InvalidInputError("trajectory width must be a multiple of 3");
  if (!tr.allFinite()) throw InvalidInputError("trajectory contains non-finite values");
  const Matrix vel = diff_rows(tr, fps);
  const Matrix acc = diff_rows(vel, fps);
  const Matrix jerk = diff_rows(acc, fps);
  return {mean_joint_magnitude(acc), mean_joint_magnitude(jerk)};
}

double rmse(const TrajectorySet& gen, const TrajectorySet& ref) {
  if (gen.rows() != ref.rows() || gen.cols() != ref.cols()) {
    throw InvalidInputError("rmse needs trajectories of equal shape");
  }
  if (gen.size() == 0) throw InvalidInputError("rmse of empty trajectories");
  return std::sqrt((gen - ref).squaredNorm() / static_cast<double>(gen.size()));
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd r;
  if (values.empty()) return r;
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(var / static_cast<double>(values.size()));
  return r;
}

MetricsReport evaluate_pairs(std::span<const TrajectoryPair> pairs, const std::string& variant) {
  if (pairs.empty()) throw InvalidInputError("nothing to evaluate");
  std::vector<double> acc, jerk, err;
  for (const auto& p : pairs) {
    const MotionStatistics s = motion_statistics(p.generated);
    acc.push_back(s.acceleration);
    jerk.push_back(s.jerk);
    err.push_back(rmse(p.generated, p.reference));
  }
  MetricsReport r;
  r.variant = variant;
  r.acceleration = mean_std(acc);
  r.jerk = mean_std(jerk);
  r.rmse = mean_std(err);
  r.samples = static_cast<int>(pairs.size());
  return r;
}

MetricsReport evaluate_model(const GestureModel& model, const JointHierarchy& skeleton,
                             std::span<const Utterance> test, int n_samples, std::uint64_t seed,
                             const std::string& variant) {
  if (test.empty()) throw InvalidInputError("test split is empty");
  if (n_samples < 1) throw InvalidInputError("n_samples must be positive");
  const ModelDims& d = model.dims;
  // Generation starts from the training-set mean pose.
  const Vector initial = model.stats.pose_mean;
  std::vector<TrajectoryPair> pairs;
  std::vector<TrajectorySet> references(test.size());
  for (int i = 0; i < n_samples; ++i) {
    const std::size_t u = static_cast<std::size_t>(i) % test.size();
    const Utterance& utt = test[u];
    if (references[u].size() == 0) {
      MotionClip ref;
      ref.fps = kFeatureFps;
      ref.representation = Representation::ExpMap;
      ref.frames = utt.poses;
      ref.root_translation = Matrix::Zero(utt.poses.rows(), 3);
      references[u] = joint_trajectories(skeleton, ref);
    }
    Rng rng(mix_seed(seed, 0x5000000 + static_cast<std::uint64_t>(i)));
    Vector noise(d.noise_dim);
    for (int k = 0; k < d.noise_dim; ++k) noise[k] = rng.normal();
    const MotionClip clip = generate_sequence(model, speech_features(utt, d), noise, initial);
    pairs.push_back({joint_trajectories(skeleton, clip), references[u]});
  }
  return evaluate_pairs(pairs, variant);
}

std::string metrics_csv_header() { return "variant,acc_mean,acc_std,jerk_mean,jerk_std,rmse_mean,rmse_std"; }

std::string metrics_csv_row(const MetricsReport& r) {
  std::ostringstream os;
  os.precision(9);
  os << r.variant << ',' << r.acceleration.mean << ',' << r.acceleration.std << ',' << r.jerk.mean << ','
     << r.jerk.std << ',' << r.rmse.mean << ',' << r.rmse.std;
  return os.str();
}

}  // namespace gesturegan
