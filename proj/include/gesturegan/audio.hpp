#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gesturegan/features.hpp"

namespace gesturegan {

struct AudioTrack {
  std::vector<double> samples;  // mono, in [-1, 1]
  double sample_rate = 44100.0;

  double duration() const { return samples.size() / sample_rate; }
};

AudioTrack read_wav(std::span<const std::uint8_t> bytes);
AudioTrack read_wav_file(const std::string& path);
// 16-bit PCM mono.
std::vector<std::uint8_t> encode_wav(const AudioTrack& track);
void write_wav_file(const std::string& path, const AudioTrack& track);

// Parameters of the spectral front end. Defaults give 50 ms Hann frames with
// a 50 ms hop on a 16 kHz copy of the signal: one frame per 20 FPS step.
struct SpectralConfig {
  double analysis_rate = 16000.0;
  double pre_emphasis = 0.97;
  int fft_size = 1024;
  int mel_bands = 26;
  double mel_low_hz = 0.0;
  double mel_high_hz = 8000.0;
  double log_floor = 1e-10;

  int frame_length() const { return static_cast<int>(analysis_rate / kFeatureFps); }
};

// Band-limited (windowed-sinc) resampling.
std::vector<double> resample_audio(std::span<const double> samples, double from_rate, double to_rate);

// Triangular filters on the HTK mel scale, mel_bands x (fft_size/2 + 1).
Matrix mel_filterbank(const SpectralConfig& cfg);
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Frame count at 20 FPS for an analysis-rate signal of n samples.
int feature_frame_count(std::size_t analysis_samples, const SpectralConfig& cfg = {});

// Log mel energies, frames x mel_bands.
Matrix log_mel_energies(std::span<const double> analysis_signal, const SpectralConfig& cfg = {});
// DCT-II (orthonormal) of each row.
Matrix dct2_rows(const Matrix& rows);
// [log F0 (0 when unvoiced), voicing flag, log RMS energy, energy delta].
Matrix prosodic_features(std::span<const double> analysis_signal, const SpectralConfig& cfg = {});

FeatureSequence audio_features(const AudioTrack& track, AudioFeatureKind kind,
                               const SpectralConfig& cfg = {});

}  // namespace gesturegan
