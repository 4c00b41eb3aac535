#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <vector>

#include "gesturegan/features.hpp"
#include "gesturegan/motion.hpp"
#include "gesturegan/nn.hpp"

namespace gesturegan {

// Layer widths of both networks. Defaults are the full-size model; tests
// shrink the widths to run finite-difference checks.
struct ModelDims {
  int text_dim = kTextDim;
  int audio_dim = kMfccDim;
  int noise_dim = kNoiseDim;
  int pose_dim = 45;

  int window = 15;      // speech frames seen per generated pose (centred)
  int prev_poses = 3;   // generated poses fed back through FiLM
  int gru_hidden = 128;
  int gru_layers = 2;
  double dropout = 0.2;
  int reduce_dim = 512;
  int hidden_dim = 256;

  int stream_hidden = 32;
  int stream_out = 64;
  std::array<int, 6> conv_channels{192, 256, 256, 512, 512, 1024};
  int fc1 = 512;
  int fc2 = 256;
  int chunk = 40;

  bool use_text = true;
  bool use_audio = true;
  bool use_gru = true;
  bool use_film = true;
  bool sigmoid_critic = true;  // false: unbounded critic for weight clipping
  double leaky_slope = 0.2;

  int active_text_dim() const { return use_text ? text_dim : 0; }
  int active_audio_dim() const { return use_audio ? audio_dim : 0; }
  int speech_dim() const { return active_text_dim() + active_audio_dim(); }
  int input_dim() const { return speech_dim() + noise_dim; }
  int context_dim() const { return prev_poses * pose_dim; }
  int flat_dim() const { return window * 2 * gru_hidden; }
  int stream_count() const { return 1 + (use_text ? 1 : 0) + (use_audio ? 1 : 0); }
  void validate() const;
};

// Kernel and stride of the six discriminator convolutions.
inline constexpr std::array<std::array<int, 2>, 6> kConvGeometry{{{3, 1}, {4, 2}, {3, 1}, {4, 2}, {3, 1}, {4, 2}}};

// Temporal lengths through the convolution stack, input first.
std::vector<int> conv_temporal_lengths(int chunk);

struct GeneratorCache {
  std::vector<Matrix> window;
  std::vector<BiGru::Cache> gru;
  std::vector<std::vector<Matrix>> gru_outputs;
  std::vector<Matrix> dropout_masks;
  Matrix flat;
  Matrix reduced;  // tanh output, pre-FiLM
  Matrix context;
  Matrix gamma;
  Matrix beta;
  Matrix modulated;
  Matrix hidden;
  Matrix output;
};

// Windowed bi-GRU generator with FiLM conditioning on previous poses:
//   window -> 2 x BiGru -> flatten -> Linear+tanh -> FiLM(context)
//   -> Linear -> Linear+tanh -> pose
// FiLM computes gamma = 1 + W_g c + b_g and beta = W_b c + b_b.
struct Generator {
  ModelDims dims;
  std::vector<BiGru> gru;
  Linear flat_projection;  // replaces the GRU when dims.use_gru is false
  Linear reduce;
  Linear film_gamma;
  Linear film_beta;
  Linear hidden;
  Linear output;

  Generator() = default;
  explicit Generator(const ModelDims& d);
  void init(Rng& rng);

  // window: dims.window matrices of B x input_dim; context: B x context_dim.
  // Dropout applies only when dropout_rng is non-null.
  Matrix forward(const std::vector<Matrix>& window, const Matrix& context, Rng* dropout_rng,
                 GeneratorCache* cache) const;
  // Accumulates parameter gradients for dL/d(output).
  void backward(const GeneratorCache& cache, const Matrix& d_output);

  void visit(const ParameterVisitor& f);
  void visit(const ConstParameterVisitor& f) const;
  std::vector<Parameter*> parameters();
  void zero_grad();
};

// Rows are stacked chunks: batch * chunk rows per stream.
struct DiscriminatorInput {
  Matrix gestures;
  Matrix audio;
  Matrix text;
  int batch = 0;
};

struct DiscriminatorCache {
  DiscriminatorInput input;
  Matrix text_h, audio_h, pose_h;  // pre-activation of the first stream linears
  Matrix text_a, audio_a, pose_a;  // after LeakyReLU
  std::vector<std::vector<Matrix>> conv_cols;   // [batch][layer]
  std::vector<std::vector<Matrix>> conv_pre;    // conv outputs before activation
  std::vector<std::vector<LayerNorm::Cache>> norm;
  std::vector<int> lengths;
  Matrix pooled;  // batch x final channels
  Matrix fc1_pre, fc1_act, fc2_pre, fc2_act, logits;
  Vector scores;
};

// Three per-frame input streams, a 1D-convolution stack over time and a
// fully connected head ending in a sigmoid (or a raw critic score).
struct Discriminator {
  ModelDims dims;
  Linear text_in, text_out;
  Linear audio_in, audio_out;
  Linear pose_in, pose_out;
  std::array<Conv1d, 6> convs;
  std::array<LayerNorm, 5> norms;
  Linear fc1, fc2, fc3;

  Discriminator() = default;
  explicit Discriminator(const ModelDims& d);
  void init(Rng& rng);

  Vector forward(const DiscriminatorInput& in, DiscriminatorCache* cache) const;
  // Accumulates parameter gradients and returns dL/d(gestures).
  Matrix backward(const DiscriminatorCache& cache, const Vector& d_scores);

  void visit(const ParameterVisitor& f);
  void visit(const ConstParameterVisitor& f) const;
  std::vector<Parameter*> parameters();
  void zero_grad();
  void clamp_weights(double c);
};

// Per-dimension training-set statistics of speech features and poses.
struct Standardizer {
  Vector feature_mean, feature_std;
  Vector pose_mean, pose_std;

  static Standardizer identity(int feature_dim, int pose_dim);
  Matrix features(const Matrix& raw) const;
  Matrix poses(const Matrix& raw) const;
  Matrix unstandardize_poses(const Matrix& z) const;
};

struct GestureModel {
  ModelDims dims;
  Generator generator;
  Discriminator discriminator;
  Standardizer stats;
};

// Deterministic in seed: uniform(+-sqrt(1/fan_in)) weights, zero biases.
GestureModel init_params(std::uint64_t seed, const ModelDims& dims);

// The most recent generated poses, oldest first.
class GenerationContext {
 public:
  GenerationContext(const Vector& initial_pose, int count);
  void push(const Vector& pose);
  Vector as_vector() const;
  int size() const { return static_cast<int>(poses_.size()); }

 private:
  std::deque<Vector> poses_;
};

// One pose from a window of dims.window x input_dim rows (standardized).
Vector generator_step(const Generator& g, const Matrix& window, const GenerationContext& ctx);

// Input window rows for frame t: t - w/2 ... t + w/2 clamped to [0, T).
Matrix window_rows(const Matrix& inputs, int t, int window);

// Autoregressive generation in standardized space; inputs are T x input_dim.
Matrix generate_standardized(const Generator& g, const Matrix& inputs, const Vector& initial_pose);

// speech_features: T x speech_dim raw features, initial_pose raw. Returns an
// ExpMap clip at 20 FPS.
MotionClip generate_sequence(const GestureModel& model, const Matrix& speech_features, const Vector& noise,
                             const Vector& initial_pose);

// Single-chunk convenience wrapper: gestures chunk x pose_dim etc.
double discriminator_forward(const Discriminator& d, const Matrix& gestures, const Matrix& audio,
                             const Matrix& text);

}  // namespace gesturegan
