#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>

#include "gesturegan/audio.hpp"
#include "gesturegan/errors.hpp"
#include "gesturegan/random.hpp"
#include "support/oracles.hpp"

using namespace gesturegan;

namespace {

constexpr double kPi = std::numbers::pi;

void put16(std::vector<std::uint8_t>& b, std::uint16_t v) {
  b.push_back(v & 0xff);
  b.push_back(v >> 8);
}
void put32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xff);
}

std::vector<std::uint8_t> wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                                    std::uint16_t bits, const std::vector<std::int16_t>& samples) {
  std::vector<std::uint8_t> data;
  for (auto s : samples) {
    if (bits == 16) put16(data, static_cast<std::uint16_t>(s));
    else data.push_back(static_cast<std::uint8_t>(s));
  }
  std::vector<std::uint8_t> b = {'R', 'I', 'F', 'F'};
  put32(b, 36 + static_cast<std::uint32_t>(data.size()));
  for (char c : std::string("WAVEfmt ")) b.push_back(c);
  put32(b, 16);
  put16(b, format);
  put16(b, channels);
  put32(b, rate);
  put32(b, rate * channels * bits / 8);
  put16(b, channels * bits / 8);
  put16(b, bits);
  for (char c : std::string("data")) b.push_back(c);
  put32(b, static_cast<std::uint32_t>(data.size()));
  b.insert(b.end(), data.begin(), data.end());
  return b;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.uniform(-1.0, 1.0);
  return x;
}

}  // namespace

TEST_CASE("silence, scaling and stereo downmix") {
  const AudioTrack silence = read_wav(wav_bytes(1, 1, 44100, 16, std::vector<std::int16_t>(44100, 0)));
  CHECK(silence.samples.size() == 44100);
  CHECK(silence.sample_rate == 44100);
  for (double s : silence.samples) CHECK(s == 0.0);

  std::vector<std::int16_t> square;
  for (int i = 0; i < 100; ++i) square.push_back(i % 2 ? 32767 : -32767);
  const AudioTrack sq = read_wav(wav_bytes(1, 1, 16000, 16, square));
  for (std::size_t i = 0; i < sq.samples.size(); ++i) CHECK(std::abs(sq.samples[i]) == 32767.0 / 32768.0);

  const AudioTrack st = read_wav(wav_bytes(1, 2, 16000, 16, {1000, 3000, -400, 400}));
  REQUIRE(st.samples.size() == 2);
  CHECK(st.samples[0] == doctest::Approx(2000.0 / 32768.0));
  CHECK(st.samples[1] == 0.0);
}

TEST_CASE("unsupported encodings are format errors") {
  CHECK_THROWS_AS(read_wav(wav_bytes(7, 1, 8000, 8, {1, 2, 3})), FormatError);  // mu-law
  CHECK_THROWS_AS(read_wav(wav_bytes(1, 1, 8000, 8, {1, 2, 3})), FormatError);  // 8-bit PCM
  std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'X'};
  CHECK_THROWS_AS(read_wav(junk), FormatError);
  auto truncated = wav_bytes(1, 1, 16000, 16, {1, 2, 3, 4});
  truncated.resize(30);
  CHECK_THROWS_AS(read_wav(truncated), FormatError);
}

TEST_CASE("wav encoding round trip") {
  AudioTrack t;
  t.sample_rate = 22050;
  for (int i = 0; i < 500; ++i) t.samples.push_back(std::sin(i * 0.05) * 0.9);
  const AudioTrack back = read_wav(encode_wav(t));
  CHECK(back.sample_rate == 22050);
  REQUIRE(back.samples.size() == t.samples.size());
  for (std::size_t i = 0; i < t.samples.size(); ++i) CHECK(std::abs(back.samples[i] - t.samples[i]) <= 1.0 / 32768);
}

TEST_CASE("resampling preserves an in-band sine") {
  const double from = 44100, to = 16000, f = 440;
  std::vector<double> x(44100);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * kPi * f * i / from);
  const auto y = resample_audio(x, from, to);
  CHECK(y.size() == 16000);
  double err = 0.0;
  for (std::size_t n = 1000; n < 15000; ++n) err = std::max(err, std::abs(y[n] - std::sin(2 * kPi * f * n / to)));
  CHECK(err < 2e-3);

  // A tone above the target Nyquist is suppressed.
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(2 * kPi * 12000.0 * i / from);
  const auto z = resample_audio(x, from, to);
  double peak = 0.0;
  for (std::size_t n = 1000; n < 15000; ++n) peak = std::max(peak, std::abs(z[n]));
  CHECK(peak < 0.01);
}

TEST_CASE("mel filterbank shape") {
  const SpectralConfig cfg;
  const Matrix fb = mel_filterbank(cfg);
  CHECK(fb.rows() == 26);
  CHECK(fb.cols() == 513);
  CHECK(fb.minCoeff() >= 0.0);
  CHECK(fb.maxCoeff() <= 1.0);
  for (int b = 0; b < 26; ++b) CHECK(fb.row(b).sum() > 0.0);
  CHECK(hz_to_mel(mel_to_hz(1234.5)) == doctest::Approx(1234.5));
  CHECK(fb.col(512).isZero());
}

TEST_CASE("frame arithmetic") {
  for (double rate : {16000.0, 22050.0, 44100.0, 48000.0}) {
    AudioTrack t;
    t.sample_rate = rate;
    t.samples = random_signal(static_cast<std::size_t>(rate), 3);
    for (auto kind : {AudioFeatureKind::Mfcc, AudioFeatureKind::Mel, AudioFeatureKind::Prosodic,
                      AudioFeatureKind::MfccProsodic, AudioFeatureKind::MelProsodic}) {
      const FeatureSequence f = audio_features(t, kind);
      CHECK(f.frame_count() == 20);
      CHECK(f.width() == audio_feature_width(kind));
      CHECK(f.frames.allFinite());
    }
  }
  AudioTrack shorty{std::vector<double>(700, 0.1), 16000};
  CHECK_THROWS_AS(audio_features(shorty, AudioFeatureKind::Mfcc), TooShortError);
  AudioTrack low{std::vector<double>(8000, 0.1), 8000};
  CHECK_THROWS_AS(audio_features(low, AudioFeatureKind::Mfcc), InvalidInputError);
}

TEST_CASE("silence gives the log-floor row everywhere") {
  AudioTrack t{std::vector<double>(44100, 0.0), 44100};
  const Matrix m = audio_features(t, AudioFeatureKind::Mfcc).frames;
  for (int f = 1; f < m.rows(); ++f) CHECK((m.row(f) - m.row(0)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(m(0, 0) == doctest::Approx(std::sqrt(26.0) * std::log(1e-10)));
  CHECK(m.row(0).tail(25).cwiseAbs().maxCoeff() < 1e-9);
  const Matrix mel = audio_features(t, AudioFeatureKind::Mel).frames;
  CHECK((mel.array() == std::log(1e-10)).all());
}

TEST_CASE("MFCCs match a direct DFT oracle") {
  for (int i = 0; i < 5; ++i) {
    const auto x = random_signal(8000, 100 + i);
    const Matrix got = audio_features(AudioTrack{x, 16000}, AudioFeatureKind::Mfcc).frames;
    const Matrix want = oracle::mfcc(x);
    REQUIRE(got.rows() == want.rows());
    for (int r = 0; r < got.rows(); ++r) {
      for (int c = 0; c < got.cols(); ++c) {
        CHECK(std::abs(got(r, c) - want(r, c)) <= 1e-6 * std::abs(want(r, c)));
      }
    }
    const Matrix mel = audio_features(AudioTrack{x, 16000}, AudioFeatureKind::Mel).frames;
    CHECK((mel - oracle::log_mel(x)).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("prosodic features track pitch and voicing") {
  std::vector<double> x(16000);
  for (std::size_t i = 0; i < 8000; ++i) x[i] = 0.5 * std::sin(2 * kPi * 200.0 * i / 16000.0);
  const Matrix p = audio_features(AudioTrack{x, 16000}, AudioFeatureKind::Prosodic).frames;
  for (int f = 0; f < 10; ++f) {
    CHECK(p(f, 1) == 1.0);
    CHECK(std::exp(p(f, 0)) == doctest::Approx(200.0).epsilon(0.02));
    CHECK(p(f, 2) == doctest::Approx(std::log(0.5 / std::sqrt(2.0))).epsilon(0.01));
  }
  for (int f = 10; f < 20; ++f) {
    CHECK(p(f, 1) == 0.0);
    CHECK(p(f, 0) == 0.0);
  }
  CHECK(p(0, 3) == 0.0);
  CHECK(p(10, 3) == doctest::Approx(p(10, 2) - p(9, 2)));
}

TEST_CASE("combined kinds concatenate columns") {
  const auto x = random_signal(16000, 9);
  const AudioTrack t{x, 16000};
  const Matrix a = audio_features(t, AudioFeatureKind::Mfcc).frames;
  const Matrix b = audio_features(t, AudioFeatureKind::Prosodic).frames;
  const Matrix c = audio_features(t, AudioFeatureKind::MfccProsodic).frames;
  CHECK(c.leftCols(26) == a);
  CHECK(c.rightCols(4) == b);
  CHECK(audio_features(t, AudioFeatureKind::MelProsodic).frames.leftCols(26) ==
        audio_features(t, AudioFeatureKind::Mel).frames);
  CHECK(audio_features(t, AudioFeatureKind::Mfcc).frames == a);
}

TEST_CASE("feature kind names") {
  CHECK(parse_audio_feature_kind("mfcc+prosodic") == AudioFeatureKind::MfccProsodic);
  CHECK(audio_feature_name(AudioFeatureKind::MelProsodic) == "mel+prosodic");
  CHECK_THROWS_AS(parse_audio_feature_kind("chroma"), ConfigError);
}

TEST_CASE("GGF1 cache format") {
  Matrix m(3, 2);
  m << 1, 2, 3.5, -4, 0.25, 1e-3;
  std::stringstream ss;
  write_ggf1(ss, m);
  const std::string bytes = ss.str();
  CHECK(bytes.substr(0, 4) == "GGF1");
  CHECK(bytes.size() == 4 + 8 + 6 * 4);
  std::uint32_t rows = 0;
  std::memcpy(&rows, bytes.data() + 4, 4);
  CHECK(rows == 3);
  float second = 0;
  std::memcpy(&second, bytes.data() + 12 + 4, 4);
  CHECK(second == 2.0f);
  std::stringstream in(bytes);
  CHECK(read_ggf1(in) == m.cast<float>().cast<double>());
  std::stringstream bad("GGF2........");
  CHECK_THROWS_AS(read_ggf1(bad), FormatError);
  std::stringstream cut(bytes.substr(0, 20));
  CHECK_THROWS_AS(read_ggf1(cut), FormatError);
}

TEST_CASE("model input assembly") {
  FeatureSequence audio{20.0, FeatureKind::Mfcc, Matrix::Constant(5, 26, 1.0)};
  FeatureSequence text{20.0, FeatureKind::Text, Matrix::Constant(5, 768, 2.0)};
  const FeatureSequence in = build_model_input(audio, text, Vector::Zero(20));
  CHECK(in.width() == 814);
  CHECK(in.frame_count() == 5);
  CHECK(in.frames.leftCols(768).isConstant(2.0));
  CHECK(in.frames.middleCols(768, 26).isConstant(1.0));
  CHECK(in.frames.rightCols(20).isZero());
  Vector noise = Vector::LinSpaced(20, -1, 1);
  const FeatureSequence n = build_model_input(audio, text, noise);
  for (int f = 0; f < 5; ++f) CHECK(n.frames.row(f).tail(20) == noise.transpose());
  FeatureSequence shorter{20.0, FeatureKind::Mfcc, Matrix::Constant(4, 26, 1.0)};
  CHECK_THROWS_AS(build_model_input(shorter, text, noise), AlignmentError);
}
