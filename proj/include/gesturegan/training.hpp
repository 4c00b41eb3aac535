#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gesturegan/model.hpp"

namespace gesturegan {

enum class AdversarialMode { Sigmoid, ClippedCritic };

std::string_view adversarial_mode_name(AdversarialMode m);
AdversarialMode parse_adversarial_mode(std::string_view name);

struct TrainConfig {
  // Loss weights: L_G = alpha * mse + beta * continuity + lambda * adversarial.
  double alpha = 1.0;
  double beta = 0.6;
  double lambda = 0.3;

  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int batch_size = 64;
  int epochs = 100;

  int chunk = 40;
  int chunk_stride = 20;
  int window = 15;
  int prev_poses = 3;
  int noise_dim = kNoiseDim;
  double dropout = 0.2;
  std::uint64_t seed = 0;

  bool no_text = false;
  bool no_audio = false;
  bool no_gru = false;
  bool no_film = false;
  AudioFeatureKind audio_features = AudioFeatureKind::Mfcc;

  AdversarialMode adversarial = AdversarialMode::Sigmoid;
  double clip_value = 0.01;

  void validate() const;
  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, 1e-8}; }
};

ModelDims model_dims(const TrainConfig& cfg, int pose_dim = 45, int text_dim = kTextDim);

// Key=value echo of every field, one per line.
std::string config_echo(const TrainConfig& cfg);

struct GeneratorLoss {
  double total = 0.0;
  double mse = 0.0;
  double continuity = 0.0;
  double adversarial = 0.0;
};

// gen and ref stack sequences of sequence_length frames (0: one sequence).
// Speeds are first differences within each sequence.
GeneratorLoss generator_loss(const Matrix& gen, const Matrix& ref, const Vector& d_scores, const TrainConfig& cfg,
                             int sequence_length = 0);
// d(alpha * mse + beta * continuity)/d(gen).
Matrix generator_reconstruction_grad(const Matrix& gen, const Matrix& ref, const TrainConfig& cfg,
                                     int sequence_length = 0);
// mean(d_fake) - mean(d_real).
double discriminator_loss(const Vector& d_fake, const Vector& d_real);

struct UtteranceRecord {
  std::string name;
  double duration = 0.0;  // seconds
  std::string motion_path;
  std::string audio_path;
  std::string transcript_path;
};

struct DatasetSplit {
  std::vector<UtteranceRecord> train;
  std::vector<UtteranceRecord> validation;
  std::vector<UtteranceRecord> test;
  std::vector<std::string> warnings;
};

inline constexpr double kTrainFraction = 0.84;
inline constexpr double kValidationFraction = 0.074;

DatasetSplit split_dataset(std::vector<UtteranceRecord> records, std::uint64_t seed);

// Raw per-utterance features at 20 FPS with equal frame counts.
struct Utterance {
  std::string name;
  Matrix text;   // T x 768
  Matrix audio;  // T x audio width (of the configured audio kind)
  Matrix poses;  // T x 45, ExpMap radians
  int frames() const { return static_cast<int>(poses.rows()); }
};

// Model-ready speech features ([text | audio] per the ablation flags).
Matrix speech_features(const Utterance& u, const ModelDims& dims);

Standardizer compute_statistics(std::span<const Utterance> utterances, const ModelDims& dims);

// Standardized utterances ready for batching.
struct TrainingData {
  std::vector<Matrix> speech;  // T x speech_dim
  std::vector<Matrix> poses;   // T x pose_dim
};

TrainingData prepare_training_data(std::span<const Utterance> utterances, const GestureModel& model);

struct Chunk {
  int utterance = 0;
  int start = 0;
};

std::vector<Chunk> make_chunks(const TrainingData& data, int chunk, int stride);

// Generator and discriminator inputs for a batch of chunks. Context rows are
// teacher-forced ground-truth poses; frames before the utterance start use
// the standardized initial (mean) pose, i.e. zero.
struct Batch {
  int size = 0;
  std::vector<Matrix> window;  // window x (size * chunk) x input_dim
  Matrix context;
  Matrix target;
  DiscriminatorInput real;
};

Batch build_batch(const TrainingData& data, std::span<const Chunk> chunks, const ModelDims& dims, Rng& noise_rng);

struct StepReport {
  GeneratorLoss generator;
  double discriminator = 0.0;
  double min_score = 1.0;
  double max_score = 0.0;
};

struct TrainState {
  TrainConfig config;
  GestureModel model;
  AdamState generator_opt;
  AdamState discriminator_opt;
  std::int64_t epoch = 0;
  std::int64_t step = 0;
  // Free-form strings carried through checkpoints (skeleton, provenance).
  std::map<std::string, std::string> metadata;
};

TrainState make_train_state(const TrainConfig& cfg, std::span<const Utterance> train_set, int text_dim = kTextDim);

// One discriminator update (L_D) followed by one generator update (L_G).
StepReport train_step(TrainState& state, const TrainingData& data, std::span<const Chunk> chunks);

struct EpochReport {
  std::int64_t epoch = 0;
  std::int64_t steps = 0;
  double generator = 0.0;
  double mse = 0.0;
  double continuity = 0.0;
  double adversarial = 0.0;
  double discriminator = 0.0;
  double validation_mse = std::numeric_limits<double>::quiet_NaN();
  double min_score = 1.0;
  double max_score = 0.0;
};

EpochReport train_epoch(TrainState& state, const TrainingData& data);

// Mean squared error of autoregressively generated validation poses (standardized space).
double validation_mse(const GestureModel& model, const TrainingData& data, std::uint64_t seed);

struct TrainOptions {
  std::string log_csv;           // empty: no log
  std::string checkpoint_path;   // final state
  std::string best_path;         // best validation state
  std::function<void(const EpochReport&)> on_epoch;
};

// Runs config.epochs epochs, optionally validating and checkpointing.
std::vector<EpochReport> train(TrainState& state, const TrainingData& train_data, const TrainingData* validation,
                               const TrainOptions& options);

std::string epoch_csv_header();
std::string epoch_csv_row(const EpochReport& r);

}  // namespace gesturegan
