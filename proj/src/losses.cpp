#include <sstream>

#include "gesturegan/errors.hpp"
#include "gesturegan/training.hpp"

namespace gesturegan {
namespace {

int resolve_length(const Matrix& gen, int sequence_length) {
  const int rows = static_cast<int>(gen.rows());
  const int len = sequence_length > 0 ? sequence_length : rows;
  if (rows == 0 || rows % len != 0) {
    throw InvalidInputError("generated rows are not a whole number of sequences");
  }
  return len;
}

void check_shapes(const Matrix& gen, const Matrix& ref) {
  if (gen.rows() != ref.rows() || gen.cols() != ref.cols()) {
    throw InvalidInputError("generated and reference gestures differ in shape");
  }
}

// Speed difference e_t = (g_t - g_{t-1}) - (r_t - r_{t-1}) for each sequence.
Matrix speed_error(const Matrix& gen, const Matrix& ref, int len) {
  const Matrix d = gen - ref;
  const int seqs = static_cast<int>(gen.rows()) / len;
  Matrix e(static_cast<Eigen::Index>(seqs) * (len - 1), gen.cols());
  for (int s = 0; s < seqs; ++s) {
    for (int t = 1; t < len; ++t) e.row(s * (len - 1) + t - 1) = d.row(s * len + t) - d.row(s * len + t - 1);
  }
  return e;
}

}  // namespace

std::string_view adversarial_mode_name(AdversarialMode m) {
  return m == AdversarialMode::Sigmoid ? "sigmoid" : "clipped-critic";
}

AdversarialMode parse_adversarial_mode(std::string_view name) {
  if (name == "sigmoid") return AdversarialMode::Sigmoid;
  if (name == "clipped-critic") return AdversarialMode::ClippedCritic;
  throw ConfigError("unknown adversarial mode '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (alpha < 0 || beta < 0 || lambda < 0) throw ConfigError("loss weights must be non-negative");
  if (learning_rate < 0) throw ConfigError("learning rate must be non-negative");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (chunk_stride < 1) throw ConfigError("chunk stride must be positive");
  if (no_text && no_audio) throw ConfigError("no_text and no_audio together leave no speech input");
  if (clip_value <= 0) throw ConfigError("clip value must be positive");
}

ModelDims model_dims(const TrainConfig& cfg, int pose_dim, int text_dim) {
  ModelDims d;
  d.text_dim = text_dim;
  d.audio_dim = audio_feature_width(cfg.audio_features);
  d.noise_dim = cfg.noise_dim;
  d.pose_dim = pose_dim;
  d.window = cfg.window;
  d.prev_poses = cfg.prev_poses;
  d.dropout = cfg.dropout;
  d.chunk = cfg.chunk;
  d.use_text = !cfg.no_text;
  d.use_audio = !cfg.no_audio;
  d.use_gru = !cfg.no_gru;
  d.use_film = !cfg.no_film;
  d.sigmoid_critic = cfg.adversarial == AdversarialMode::Sigmoid;
  d.validate();
  return d;
}

std::string config_echo(const TrainConfig& c) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << c.alpha << "\nbeta=" << c.beta << "\nlambda=" << c.lambda
     << "\nlearning_rate=" << c.learning_rate << "\nadam_beta1=" << c.adam_beta1
     << "\nadam_beta2=" << c.adam_beta2 << "\nbatch_size=" << c.batch_size << "\nepochs=" << c.epochs
     << "\nchunk=" << c.chunk << "\nchunk_stride=" << c.chunk_stride << "\nwindow=" << c.window
     << "\nprev_poses=" << c.prev_poses << "\nnoise_dim=" << c.noise_dim << "\ndropout=" << c.dropout
     << "\nseed=" << c.seed << "\nno_text=" << c.no_text << "\nno_audio=" << c.no_audio
     << "\nno_gru=" << c.no_gru << "\nno_film=" << c.no_film
     << "\naudio_features=" << audio_feature_name(c.audio_features)
     << "\nadversarial=" << adversarial_mode_name(c.adversarial) << "\nclip_value=" << c.clip_value << "\n";
  return os.str();
}

GeneratorLoss generator_loss(const Matrix& gen, const Matrix& ref, const Vector& d_scores, const TrainConfig& cfg,
                             int sequence_length) {
  check_shapes(gen, ref);
  const int len = resolve_length(gen, sequence_length);
  GeneratorLoss l;
  l.mse = (gen - ref).squaredNorm() / static_cast<double>(gen.size());
  if (len > 1) {
    const Matrix e = speed_error(gen, ref, len);
    l.continuity = e.squaredNorm() / static_cast<double>(e.size());
  }
  if (d_scores.size() == 0) throw InvalidInputError("adversarial term needs at least one score");
  l.adversarial = -d_scores.mean();
  l.total = cfg.alpha * l.mse + cfg.beta * l.continuity + cfg.lambda * l.adversarial;
  return l;
}

Matrix generator_reconstruction_grad(const Matrix& gen, const Matrix& ref, const TrainConfig& cfg,
                                     int sequence_length) {
  check_shapes(gen, ref);
  const int len = resolve_length(gen, sequence_length);
  Matrix g = (2.0 * cfg.alpha / static_cast<double>(gen.size())) * (gen - ref);
  if (len > 1) {
    const Matrix e = speed_error(gen, ref, len);
    const double scale = 2.0 * cfg.beta / static_cast<double>(e.size());
    const int seqs = static_cast<int>(gen.rows()) / len;
    for (int s = 0; s < seqs; ++s) {
      for (int t = 1; t < len; ++t) {
        const auto err = e.row(s * (len - 1) + t - 1);
        g.row(s * len + t) += scale * err;
        g.row(s * len + t - 1) -= scale * err;
      }
    }
  }
  return g;
}

double discriminator_loss(const Vector& d_fake, const Vector& d_real) {
  if (d_fake.size() == 0 || d_real.size() == 0) throw InvalidInputError("discriminator loss needs non-empty batches");
  return d_fake.mean() - d_real.mean();
}

}  // namespace gesturegan
