#include <algorithm>

#include "gesturegan/errors.hpp"
#include "gesturegan/model.hpp"

namespace gesturegan {

Standardizer Standardizer::identity(int feature_dim, int pose_dim) {
  return {Vector::Zero(feature_dim), Vector::Ones(feature_dim), Vector::Zero(pose_dim), Vector::Ones(pose_dim)};
}

Matrix Standardizer::features(const Matrix& raw) const {
  if (raw.cols() != feature_mean.size()) {
    throw ShapeError("feature width " + std::to_string(raw.cols()) + " does not match statistics of width " +
                     std::to_string(feature_mean.size()));
  }
  return (raw.rowwise() - feature_mean.transpose()).array().rowwise() / feature_std.transpose().array();
}

Matrix Standardizer::poses(const Matrix& raw) const {
  if (raw.cols() != pose_mean.size()) throw ShapeError("pose width does not match statistics");
  return (raw.rowwise() - pose_mean.transpose()).array().rowwise() / pose_std.transpose().array();
}

Matrix Standardizer::unstandardize_poses(const Matrix& z) const {
  if (z.cols() != pose_mean.size()) throw ShapeError("pose width does not match statistics");
  Matrix out = z.array().rowwise() * pose_std.transpose().array();
  out.rowwise() += pose_mean.transpose();
  return out;
}

GestureModel init_params(std::uint64_t seed, const ModelDims& dims) {
  GestureModel m;
  m.dims = dims;
  m.generator = Generator(dims);
  m.discriminator = Discriminator(dims);
  Rng g_rng(mix_seed(seed, 1));
  Rng d_rng(mix_seed(seed, 2));
  m.generator.init(g_rng);
  m.discriminator.init(d_rng);
  m.stats = Standardizer::identity(dims.speech_dim(), dims.pose_dim);
  return m;
}

GenerationContext::GenerationContext(const Vector& initial_pose, int count) {
  if (count < 1) throw InvalidInputError("context needs at least one pose");
  poses_.assign(count, initial_pose);
}

void GenerationContext::push(const Vector& pose) {
  poses_.pop_front();
  poses_.push_back(pose);
}

Vector GenerationContext::as_vector() const {
  const Eigen::Index d = poses_.front().size();
  Vector out(d * static_cast<Eigen::Index>(poses_.size()));
  for (std::size_t i = 0; i < poses_.size(); ++i) out.segment(static_cast<Eigen::Index>(i) * d, d) = poses_[i];
  return out;
}

Matrix window_rows(const Matrix& inputs, int t, int window) {
  const int T = static_cast<int>(inputs.rows());
  const int half = window / 2;
  Matrix out(window, inputs.cols());
  for (int i = 0; i < window; ++i) out.row(i) = inputs.row(std::clamp(t - half + i, 0, T - 1));
  return out;
}

Vector generator_step(const Generator& g, const Matrix& window, const GenerationContext& ctx) {
  if (window.rows() != g.dims.window || window.cols() != g.dims.input_dim()) {
    throw InvalidInputError("window must be " + std::to_string(g.dims.window) + " x " +
                            std::to_string(g.dims.input_dim()));
  }
  const Vector c = ctx.as_vector();
  if (c.size() != g.dims.context_dim()) throw InvalidInputError("context width mismatch");
  std::vector<Matrix> steps(g.dims.window);
  for (int i = 0; i < g.dims.window; ++i) steps[i] = window.row(i);
  const Matrix out = g.forward(steps, c.transpose(), nullptr, nullptr);
  return out.row(0).transpose();
}

Matrix generate_standardized(const Generator& g, const Matrix& inputs, const Vector& initial_pose) {
  if (inputs.rows() < 1) throw InvalidInputError("generation needs at least one frame");
  if (inputs.cols() != g.dims.input_dim()) {
    throw InvalidInputError("generator input must be " + std::to_string(g.dims.input_dim()) + " wide, got " +
                            std::to_string(inputs.cols()));
  }
  if (initial_pose.size() != g.dims.pose_dim) throw InvalidInputError("initial pose width mismatch");
  GenerationContext ctx(initial_pose, g.dims.prev_poses);
  Matrix out(inputs.rows(), g.dims.pose_dim);
  for (Eigen::Index t = 0; t < inputs.rows(); ++t) {
    const Vector pose = generator_step(g, window_rows(inputs, static_cast<int>(t), g.dims.window), ctx);
    out.row(t) = pose.transpose();
    ctx.push(pose);
  }
  return out;
}

MotionClip generate_sequence(const GestureModel& model, const Matrix& speech_features, const Vector& noise,
                             const Vector& initial_pose) {
  const ModelDims& d = model.dims;
  if (noise.size() != d.noise_dim) throw InvalidInputError("noise must have " + std::to_string(d.noise_dim) + " values");
  const Matrix speech = model.stats.features(speech_features);
  Matrix inputs(speech.rows(), d.input_dim());
  inputs.leftCols(d.speech_dim()) = speech;
  inputs.rightCols(d.noise_dim) = noise.transpose().replicate(speech.rows(), 1);
  const Vector init_z = model.stats.poses(initial_pose.transpose()).row(0).transpose();
  MotionClip clip;
  clip.fps = kFeatureFps;
  clip.representation = Representation::ExpMap;
  clip.frames = model.stats.unstandardize_poses(generate_standardized(model.generator, inputs, init_z));
  return clip;
}

}  // namespace gesturegan
