#include <cmath>
#include <fstream>
#include <sstream>

#include "gesturegan/checkpoint.hpp"
#include "gesturegan/errors.hpp"
#include "gesturegan/training.hpp"

namespace gesturegan {
namespace {

void require_finite(double v, const char* what, std::int64_t step) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string(what) + " became non-finite at step " + std::to_string(step));
  }
}

}  // namespace

TrainState make_train_state(const TrainConfig& cfg, std::span<const Utterance> train_set, int text_dim) {
  cfg.validate();
  if (train_set.empty()) throw InvalidInputError("training set is empty");
  const int pose_dim = static_cast<int>(train_set.front().poses.cols());
  TrainState state;
  state.config = cfg;
  state.model = init_params(cfg.seed, model_dims(cfg, pose_dim, text_dim));
  state.model.stats = compute_statistics(train_set, state.model.dims);
  return state;
}

StepReport train_step(TrainState& state, const TrainingData& data, std::span<const Chunk> chunks) {
  if (chunks.empty()) throw InvalidInputError("empty batch");
  GestureModel& m = state.model;
  const TrainConfig& cfg = state.config;
  Rng rng(mix_seed(cfg.seed, 0x7000000 + static_cast<std::uint64_t>(state.step)));
  Batch batch = build_batch(data, chunks, m.dims, rng);
  const int B = batch.size;

  GeneratorCache g_cache;
  const Matrix fake = m.generator.forward(batch.window, batch.context, &rng, &g_cache);
  DiscriminatorInput fake_in = batch.real;
  fake_in.gestures = fake;

  // Discriminator: minimise mean D(fake) - mean D(real).
  StepReport report;
  m.discriminator.zero_grad();
  DiscriminatorCache fake_cache, real_cache;
  const Vector d_fake = m.discriminator.forward(fake_in, &fake_cache);
  const Vector d_real = m.discriminator.forward(batch.real, &real_cache);
  report.discriminator = discriminator_loss(d_fake, d_real);
  require_finite(report.discriminator, "discriminator loss", state.step);
  report.min_score = std::min(d_fake.minCoeff(), d_real.minCoeff());
  report.max_score = std::max(d_fake.maxCoeff(), d_real.maxCoeff());
  m.discriminator.backward(fake_cache, Vector::Constant(B, 1.0 / B));
  m.discriminator.backward(real_cache, Vector::Constant(B, -1.0 / B));
  adam_update(m.discriminator.parameters(), state.discriminator_opt, cfg.adam());
  if (cfg.adversarial == AdversarialMode::ClippedCritic) m.discriminator.clamp_weights(cfg.clip_value);

  // Generator against the updated discriminator.
  DiscriminatorCache adv_cache;
  const Vector d_adv = m.discriminator.forward(fake_in, &adv_cache);
  report.min_score = std::min(report.min_score, d_adv.minCoeff());
  report.max_score = std::max(report.max_score, d_adv.maxCoeff());
  report.generator = generator_loss(fake, batch.target, d_adv, cfg, m.dims.chunk);
  require_finite(report.generator.total, "generator loss", state.step);
  Matrix d_fake_out = generator_reconstruction_grad(fake, batch.target, cfg, m.dims.chunk);
  if (cfg.lambda != 0.0) {
    d_fake_out += m.discriminator.backward(adv_cache, Vector::Constant(B, -cfg.lambda / B));
  }
  m.discriminator.zero_grad();
  m.generator.zero_grad();
  m.generator.backward(g_cache, d_fake_out);
  adam_update(m.generator.parameters(), state.generator_opt, cfg.adam());
  m.generator.zero_grad();

  ++state.step;
  return report;
}

EpochReport train_epoch(TrainState& state, const TrainingData& data) {
  const TrainConfig& cfg = state.config;
  std::vector<Chunk> chunks = make_chunks(data, state.model.dims.chunk, cfg.chunk_stride);
  if (chunks.empty()) throw InvalidInputError("no utterance is long enough for a training chunk");
  Rng order(mix_seed(cfg.seed, 0x3000000 + static_cast<std::uint64_t>(state.epoch)));
  order.shuffle(chunks.begin(), chunks.end());

  EpochReport r;
  r.epoch = state.epoch;
  for (std::size_t first = 0; first < chunks.size(); first += cfg.batch_size) {
    const std::size_t n = std::min<std::size_t>(cfg.batch_size, chunks.size() - first);
    const StepReport s = train_step(state, data, std::span<const Chunk>(chunks).subspan(first, n));
    ++r.steps;
    r.generator += s.generator.total;
    r.mse += s.generator.mse;
    r.continuity += s.generator.continuity;
    r.adversarial += s.generator.adversarial;
    r.discriminator += s.discriminator;
    r.min_score = std::min(r.min_score, s.min_score);
    r.max_score = std::max(r.max_score, s.max_score);
  }
  const double n = static_cast<double>(r.steps);
  r.generator /= n;
  r.mse /= n;
  r.continuity /= n;
  r.adversarial /= n;
  r.discriminator /= n;
  ++state.epoch;
  return r;
}

double validation_mse(const GestureModel& model, const TrainingData& data, std::uint64_t seed) {
  const ModelDims& d = model.dims;
  double sum = 0.0;
  double count = 0.0;
  for (std::size_t u = 0; u < data.poses.size(); ++u) {
    Rng rng(mix_seed(seed, 0x9000000 + u));
    Vector noise(d.noise_dim);
    for (int i = 0; i < d.noise_dim; ++i) noise[i] = rng.normal();
    Matrix inputs(data.speech[u].rows(), d.input_dim());
    inputs.leftCols(d.speech_dim()) = data.speech[u];
    inputs.rightCols(d.noise_dim) = noise.transpose().replicate(inputs.rows(), 1);
    const Matrix gen = generate_standardized(model.generator, inputs, Vector::Zero(d.pose_dim));
    sum += (gen - data.poses[u]).squaredNorm();
    count += static_cast<double>(gen.size());
  }
  if (count == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sum / count;
}

std::string epoch_csv_header() { return "epoch,L_G,L_mse,L_cont,L_adv,L_D,val_mse"; }

std::string epoch_csv_row(const EpochReport& r) {
  std::ostringstream os;
  os.precision(9);
  os << r.epoch << ',' << r.generator << ',' << r.mse << ',' << r.continuity << ',' << r.adversarial << ','
     << r.discriminator << ',';
  if (std::isfinite(r.validation_mse)) os << r.validation_mse;
  return os.str();
}

std::vector<EpochReport> train(TrainState& state, const TrainingData& train_data, const TrainingData* validation,
                               const TrainOptions& options) {
  std::ofstream log;
  if (!options.log_csv.empty()) {
    log.open(options.log_csv);
    if (!log) throw InvalidInputError("cannot write training log: " + options.log_csv);
    log << epoch_csv_header() << "\n";
  }
  std::vector<EpochReport> reports;
  double best = std::numeric_limits<double>::infinity();
  for (int e = 0; e < state.config.epochs; ++e) {
    EpochReport r = train_epoch(state, train_data);
    if (validation && !validation->poses.empty()) {
      r.validation_mse = validation_mse(state.model, *validation, state.config.seed);
      if (r.validation_mse < best) {
        best = r.validation_mse;
        if (!options.best_path.empty()) save_checkpoint(state, options.best_path);
      }
    }
    if (log) log << epoch_csv_row(r) << "\n" << std::flush;
    if (options.on_epoch) options.on_epoch(r);
    reports.push_back(r);
  }
  if (!options.checkpoint_path.empty()) save_checkpoint(state, options.checkpoint_path);
  return reports;
}

}  // namespace gesturegan
