#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "gesturegan/audio.hpp"
#include "gesturegan/errors.hpp"

namespace gesturegan {
namespace {

constexpr double kPi = std::numbers::pi;

// Pitch search range and voicing decision of the autocorrelation tracker.
constexpr double kMinF0 = 60.0;
constexpr double kMaxF0 = 400.0;
constexpr double kVoicingThreshold = 0.45;
constexpr double kSilenceRms = 1e-3;

double sinc(double x) { return std::abs(x) < 1e-12 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

std::vector<double> to_analysis_rate(const AudioTrack& track, const SpectralConfig& cfg) {
  if (track.samples.empty()) throw InvalidInputError("audio track is empty");
  if (!(track.sample_rate >= cfg.analysis_rate)) {
    throw InvalidInputError("sample rate " + std::to_string(track.sample_rate) + " Hz is below " +
                            std::to_string(cfg.analysis_rate) + " Hz");
  }
  return resample_audio(track.samples, track.sample_rate, cfg.analysis_rate);
}

std::vector<double> hann(int n) {
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / (n - 1));
  return w;
}

}  // namespace

std::vector<double> resample_audio(std::span<const double> samples, double from_rate, double to_rate) {
  if (!(from_rate > 0.0) || !(to_rate > 0.0)) throw InvalidInputError("sample rates must be positive");
  if (from_rate == to_rate) return {samples.begin(), samples.end()};
  const double ratio = to_rate / from_rate;
  const auto out_len = static_cast<std::size_t>(std::floor(samples.size() * ratio + 1e-9));
  // Cutoff a little under the lower Nyquist; Hann-tapered sinc with 16 zero
  // crossings per side.
  const double cutoff = std::min(1.0, ratio) * 0.97;
  const double half_width = 16.0 / cutoff;
  std::vector<double> out(out_len);
  const auto n_in = static_cast<long>(samples.size());
  for (std::size_t n = 0; n < out_len; ++n) {
    const double centre = n / ratio;
    const long lo = std::max<long>(0, static_cast<long>(std::ceil(centre - half_width)));
    const long hi = std::min<long>(n_in - 1, static_cast<long>(std::floor(centre + half_width)));
    double acc = 0.0;
    for (long k = lo; k <= hi; ++k) {
      const double d = centre - k;
      const double w = 0.5 * (1.0 + std::cos(kPi * d / half_width));
      acc += samples[k] * cutoff * sinc(cutoff * d) * w;
    }
    out[n] = acc;
  }
  return out;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

Matrix mel_filterbank(const SpectralConfig& cfg) {
  const int bins = cfg.fft_size / 2 + 1;
  const int m = cfg.mel_bands;
  std::vector<double> edges(m + 2);
  const double lo = hz_to_mel(cfg.mel_low_hz);
  const double hi = hz_to_mel(cfg.mel_high_hz);
  for (int i = 0; i < m + 2; ++i) edges[i] = mel_to_hz(lo + (hi - lo) * i / (m + 1));
  Matrix fb = Matrix::Zero(m, bins);
  for (int b = 0; b < m; ++b) {
    for (int k = 0; k < bins; ++k) {
      const double f = k * cfg.analysis_rate / cfg.fft_size;
      if (f > edges[b] && f < edges[b + 1]) {
        fb(b, k) = (f - edges[b]) / (edges[b + 1] - edges[b]);
      } else if (f >= edges[b + 1] && f < edges[b + 2]) {
        fb(b, k) = (edges[b + 2] - f) / (edges[b + 2] - edges[b + 1]);
      }
    }
  }
  return fb;
}

int feature_frame_count(std::size_t analysis_samples, const SpectralConfig& cfg) {
  return static_cast<int>(analysis_samples / cfg.frame_length());
}

Matrix log_mel_energies(std::span<const double> x, const SpectralConfig& cfg) {
  const int len = cfg.frame_length();
  const int frames = feature_frame_count(x.size(), cfg);
  if (frames < 1) throw TooShortError("audio shorter than one analysis window");
  if (cfg.fft_size < len) throw InvalidInputError("FFT size smaller than the analysis window");

  std::vector<double> emphasized(x.size());
  emphasized[0] = x[0];
  for (std::size_t i = 1; i < x.size(); ++i) emphasized[i] = x[i] - cfg.pre_emphasis * x[i - 1];

  const Matrix fb = mel_filterbank(cfg);
  const auto window = hann(len);
  Matrix out(frames, cfg.mel_bands);
  std::vector<double> frame(len);
  for (int f = 0; f < frames; ++f) {
    for (int i = 0; i < len; ++i) frame[i] = emphasized[static_cast<std::size_t>(f) * len + i] * window[i];
    const auto power = detail::power_spectrum(frame, cfg.fft_size);
    const Eigen::Map<const Vector> p(power.data(), static_cast<Eigen::Index>(power.size()));
    const Vector energies = fb * p;
    for (int b = 0; b < cfg.mel_bands; ++b) out(f, b) = std::log(std::max(energies[b], cfg.log_floor));
  }
  return out;
}

Matrix dct2_rows(const Matrix& rows) {
  const int m = static_cast<int>(rows.cols());
  Matrix basis(m, m);
  for (int n = 0; n < m; ++n) {
    const double scale = n == 0 ? std::sqrt(1.0 / m) : std::sqrt(2.0 / m);
    for (int k = 0; k < m; ++k) basis(n, k) = scale * std::cos(kPi * n * (k + 0.5) / m);
  }
  return rows * basis.transpose();
}

Matrix prosodic_features(std::span<const double> x, const SpectralConfig& cfg) {
  const int len = cfg.frame_length();
  const int frames = feature_frame_count(x.size(), cfg);
  if (frames < 1) throw TooShortError("audio shorter than one analysis window");
  const int min_lag = static_cast<int>(std::floor(cfg.analysis_rate / kMaxF0));
  const int max_lag = std::min(len - 1, static_cast<int>(std::ceil(cfg.analysis_rate / kMinF0)));

  Matrix out = Matrix::Zero(frames, kProsodicDim);
  for (int f = 0; f < frames; ++f) {
    const double* s = x.data() + static_cast<std::size_t>(f) * len;
    double energy = 0.0;
    for (int i = 0; i < len; ++i) energy += s[i] * s[i];
    const double rms = std::sqrt(energy / len);

    // Normalized autocorrelation per lag. Multiples of the period score as
    // high as the period itself, so take the first peak near the maximum.
    std::vector<double> r(max_lag + 2, 0.0);
    double peak = 0.0;
    if (rms > kSilenceRms) {
      for (int lag = min_lag; lag <= max_lag; ++lag) {
        double xy = 0.0;
        double xx = 0.0;
        double yy = 0.0;
        for (int i = 0; i + lag < len; ++i) {
          xy += s[i] * s[i + lag];
          xx += s[i] * s[i];
          yy += s[i + lag] * s[i + lag];
        }
        const double denom = std::sqrt(xx * yy);
        r[lag] = denom > 0.0 ? xy / denom : 0.0;
        peak = std::max(peak, r[lag]);
      }
    }
    double best_r = 0.0;
    int best_lag = 0;
    for (int lag = min_lag; lag <= max_lag && peak > 0.0; ++lag) {
      const bool local_max = r[lag] >= r[lag + 1] && (lag == min_lag || r[lag] >= r[lag - 1]);
      if (local_max && r[lag] >= 0.9 * peak) {
        best_r = r[lag];
        best_lag = lag;
        break;
      }
    }
    const bool voiced = best_lag > 0 && best_r >= kVoicingThreshold;
    out(f, 0) = voiced ? std::log(cfg.analysis_rate / best_lag) : 0.0;
    out(f, 1) = voiced ? 1.0 : 0.0;
    out(f, 2) = std::log(std::max(rms, cfg.log_floor));
    out(f, 3) = f > 0 ? out(f, 2) - out(f - 1, 2) : 0.0;
  }
  return out;
}

FeatureSequence audio_features(const AudioTrack& track, AudioFeatureKind kind, const SpectralConfig& cfg) {
  const auto x = to_analysis_rate(track, cfg);
  if (feature_frame_count(x.size(), cfg) < 1) throw TooShortError("audio shorter than one analysis window");

  FeatureSequence out;
  out.kind = to_feature_kind(kind);
  auto spectral = [&](bool cepstral) {
    Matrix mel = log_mel_energies(x, cfg);
    return cepstral ? dct2_rows(mel) : mel;
  };
  switch (kind) {
    case AudioFeatureKind::Mfcc: out.frames = spectral(true); break;
    case AudioFeatureKind::Mel: out.frames = spectral(false); break;
    case AudioFeatureKind::Prosodic: out.frames = prosodic_features(x, cfg); break;
    case AudioFeatureKind::MfccProsodic:
    case AudioFeatureKind::MelProsodic: {
      const Matrix a = spectral(kind == AudioFeatureKind::MfccProsodic);
      const Matrix b = prosodic_features(x, cfg);
      out.frames.resize(a.rows(), a.cols() + b.cols());
      out.frames << a, b;
      break;
    }
  }
  return out;
}

}  // namespace gesturegan
