#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "gesturegan/types.hpp"

namespace gesturegan {

inline constexpr double kFeatureFps = 20.0;
inline constexpr int kMfccDim = 26;
inline constexpr int kProsodicDim = 4;
inline constexpr int kTextDim = 768;
inline constexpr int kNoiseDim = 20;

enum class FeatureKind { Mfcc, Mel, Prosodic, MfccProsodic, MelProsodic, Text, Combined, Pose };

// Audio-feature variants compared in the audio ablation.
enum class AudioFeatureKind { Mfcc, Mel, Prosodic, MfccProsodic, MelProsodic };

int audio_feature_width(AudioFeatureKind kind);
std::string_view audio_feature_name(AudioFeatureKind kind);  // "mfcc", "mel+prosodic", ...
AudioFeatureKind parse_audio_feature_kind(std::string_view name);
FeatureKind to_feature_kind(AudioFeatureKind kind);

// Frame-aligned features at 20 FPS, one row per frame.
struct FeatureSequence {
  double fps = kFeatureFps;
  FeatureKind kind = FeatureKind::Combined;
  Matrix frames;

  int frame_count() const { return static_cast<int>(frames.rows()); }
  int width() const { return static_cast<int>(frames.cols()); }
  void validate() const;
};

// GGF1 cache: "GGF1", u32 frames, u32 width, row-major little-endian f32.
void write_ggf1(std::ostream& out, const Matrix& rows);
Matrix read_ggf1(std::istream& in);
void write_ggf1_file(const std::string& path, const Matrix& rows);
Matrix read_ggf1_file(const std::string& path);

// Per-frame [text | audio | noise]; the same noise vector on every frame.
FeatureSequence build_model_input(const FeatureSequence& audio, const FeatureSequence& text,
                                  const Vector& noise);

}  // namespace gesturegan
