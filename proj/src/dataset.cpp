#include <algorithm>
#include <cmath>

#include "gesturegan/errors.hpp"
#include "gesturegan/training.hpp"

namespace gesturegan {

DatasetSplit split_dataset(std::vector<UtteranceRecord> records, std::uint64_t seed) {
  double total = 0.0;
  for (const auto& r : records) {
    if (!(r.duration >= 0.0)) throw InvalidInputError("utterance '" + r.name + "' has a negative duration");
    total += r.duration;
  }
  if (!(total > 0.0)) throw InvalidInputError("dataset has zero total duration");

  // Sort first so the result depends only on the record set and the seed.
  std::sort(records.begin(), records.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  Rng rng(mix_seed(seed, 0x5911));
  rng.shuffle(records.begin(), records.end());

  const double train_target = kTrainFraction * total;
  const double val_target = kValidationFraction * total;
  const double tol = 1e-9 * total;
  DatasetSplit split;
  double train_dur = 0.0;
  double val_dur = 0.0;
  for (auto& r : records) {
    if (train_dur + tol < train_target) {
      train_dur += r.duration;
      split.train.push_back(std::move(r));
    } else if (val_dur + tol < val_target) {
      val_dur += r.duration;
      split.validation.push_back(std::move(r));
    } else {
      split.test.push_back(std::move(r));
    }
  }
  if (split.validation.empty()) split.warnings.push_back("validation split is empty");
  if (split.test.empty()) split.warnings.push_back("test split is empty");
  return split;
}

Matrix speech_features(const Utterance& u, const ModelDims& dims) {
  const Eigen::Index T = u.poses.rows();
  if ((dims.use_text && u.text.rows() != T) || (dims.use_audio && u.audio.rows() != T)) {
    throw AlignmentError("utterance '" + u.name + "' has mismatched frame counts");
  }
  if (dims.use_text && u.text.cols() != dims.text_dim) {
    throw ShapeError("utterance '" + u.name + "' text width " + std::to_string(u.text.cols()) + " != " +
                     std::to_string(dims.text_dim));
  }
  if (dims.use_audio && u.audio.cols() != dims.audio_dim) {
    throw ShapeError("utterance '" + u.name + "' audio width " + std::to_string(u.audio.cols()) + " != " +
                     std::to_string(dims.audio_dim));
  }
  Matrix out(T, dims.speech_dim());
  if (dims.use_text) out.leftCols(dims.text_dim) = u.text;
  if (dims.use_audio) out.rightCols(dims.audio_dim) = u.audio;
  return out;
}

Standardizer compute_statistics(std::span<const Utterance> utterances, const ModelDims& dims) {
  const int fd = dims.speech_dim();
  Vector f_sum = Vector::Zero(fd), f_sq = Vector::Zero(fd);
  Vector p_sum = Vector::Zero(dims.pose_dim), p_sq = Vector::Zero(dims.pose_dim);
  double n = 0.0;
  for (const Utterance& u : utterances) {
    const Matrix s = speech_features(u, dims);
    if (u.poses.cols() != dims.pose_dim) throw ShapeError("utterance '" + u.name + "' pose width mismatch");
    f_sum += s.colwise().sum().transpose();
    f_sq += s.array().square().colwise().sum().matrix().transpose();
    p_sum += u.poses.colwise().sum().transpose();
    p_sq += u.poses.array().square().colwise().sum().matrix().transpose();
    n += static_cast<double>(u.poses.rows());
  }
  if (n < 1.0) throw InvalidInputError("no frames to compute statistics from");
  auto stddev = [n](const Vector& sum, const Vector& sq) {
    Vector var = (sq / n).array() - (sum / n).array().square();
    Vector sd = var.cwiseMax(0.0).cwiseSqrt();
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
      if (sd[i] < 1e-8) sd[i] = 1.0;
    }
    return sd;
  };
  Standardizer st{f_sum / n, stddev(f_sum, f_sq), p_sum / n, stddev(p_sum, p_sq)};
  round_to_storage(st.feature_mean);
  round_to_storage(st.feature_std);
  round_to_storage(st.pose_mean);
  round_to_storage(st.pose_std);
  return st;
}

TrainingData prepare_training_data(std::span<const Utterance> utterances, const GestureModel& model) {
  TrainingData out;
  for (const Utterance& u : utterances) {
    out.speech.push_back(model.stats.features(speech_features(u, model.dims)));
    out.poses.push_back(model.stats.poses(u.poses));
  }
  return out;
}

std::vector<Chunk> make_chunks(const TrainingData& data, int chunk, int stride) {
  std::vector<Chunk> out;
  for (std::size_t u = 0; u < data.poses.size(); ++u) {
    const int T = static_cast<int>(data.poses[u].rows());
    for (int s = 0; s + chunk <= T; s += stride) out.push_back({static_cast<int>(u), s});
  }
  return out;
}

Batch build_batch(const TrainingData& data, std::span<const Chunk> chunks, const ModelDims& dims, Rng& noise_rng) {
  const int B = static_cast<int>(chunks.size());
  const int L = dims.chunk;
  const int half = dims.window / 2;
  const Eigen::Index N = static_cast<Eigen::Index>(B) * L;
  const int sd = dims.speech_dim();

  Batch batch;
  batch.size = B;
  batch.window.assign(dims.window, Matrix(N, dims.input_dim()));
  batch.context = Matrix::Zero(N, dims.context_dim());
  batch.target.resize(N, dims.pose_dim);
  batch.real.batch = B;
  if (dims.use_text) batch.real.text.resize(N, dims.text_dim);
  if (dims.use_audio) batch.real.audio.resize(N, dims.audio_dim);

  Vector noise(dims.noise_dim);
  for (int b = 0; b < B; ++b) {
    const Chunk& c = chunks[b];
    const Matrix& speech = data.speech[c.utterance];
    const Matrix& poses = data.poses[c.utterance];
    const int T = static_cast<int>(poses.rows());
    if (c.start < 0 || c.start + L > T) throw ChunkSizeError("chunk exceeds its utterance");
    for (int i = 0; i < dims.noise_dim; ++i) noise[i] = noise_rng.normal();
    for (int k = 0; k < L; ++k) {
      const Eigen::Index row = static_cast<Eigen::Index>(b) * L + k;
      const int t = c.start + k;
      for (int i = 0; i < dims.window; ++i) {
        const int src = std::clamp(t - half + i, 0, T - 1);
        batch.window[i].block(row, 0, 1, sd) = speech.row(src);
        batch.window[i].block(row, sd, 1, dims.noise_dim) = noise.transpose();
      }
      for (int p = 0; p < dims.prev_poses; ++p) {
        const int src = t - dims.prev_poses + p;
        if (src >= 0) batch.context.block(row, p * dims.pose_dim, 1, dims.pose_dim) = poses.row(src);
      }
      batch.target.row(row) = poses.row(t);
      if (dims.use_text) batch.real.text.row(row) = speech.row(t).head(dims.text_dim);
      if (dims.use_audio) batch.real.audio.row(row) = speech.row(t).segment(dims.active_text_dim(), dims.audio_dim);
    }
  }
  batch.real.gestures = batch.target;
  return batch;
}

}  // namespace gesturegan
