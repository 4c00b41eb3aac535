#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "gesturegan/errors.hpp"
#include "gesturegan/features.hpp"

namespace gesturegan {
namespace {

struct KindInfo {
  AudioFeatureKind kind;
  std::string_view name;
  int width;
  FeatureKind feature_kind;
};

constexpr std::array<KindInfo, 5> kKinds{{
    {AudioFeatureKind::Mfcc, "mfcc", kMfccDim, FeatureKind::Mfcc},
    {AudioFeatureKind::Mel, "mel", kMfccDim, FeatureKind::Mel},
    {AudioFeatureKind::Prosodic, "prosodic", kProsodicDim, FeatureKind::Prosodic},
    {AudioFeatureKind::MfccProsodic, "mfcc+prosodic", kMfccDim + kProsodicDim, FeatureKind::MfccProsodic},
    {AudioFeatureKind::MelProsodic, "mel+prosodic", kMfccDim + kProsodicDim, FeatureKind::MelProsodic},
}};

const KindInfo& info(AudioFeatureKind kind) {
  for (const auto& k : kKinds) {
    if (k.kind == kind) return k;
  }
  return kKinds[0];
}

void put_u32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw FormatError("truncated GGF1 stream");
  return b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

int audio_feature_width(AudioFeatureKind kind) { return info(kind).width; }
std::string_view audio_feature_name(AudioFeatureKind kind) { return info(kind).name; }
FeatureKind to_feature_kind(AudioFeatureKind kind) { return info(kind).feature_kind; }

AudioFeatureKind parse_audio_feature_kind(std::string_view name) {
  for (const auto& k : kKinds) {
    if (k.name == name) return k.kind;
  }
  throw ConfigError("unknown audio feature kind '" + std::string(name) + "'");
}

void FeatureSequence::validate() const {
  if (!frames.allFinite()) throw InvalidInputError("feature sequence has non-finite values");
}

void write_ggf1(std::ostream& out, const Matrix& rows) {
  out.write("GGF1", 4);
  put_u32(out, static_cast<std::uint32_t>(rows.rows()));
  put_u32(out, static_cast<std::uint32_t>(rows.cols()));
  std::vector<unsigned char> buf(static_cast<std::size_t>(rows.cols()) * 4);
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(rows(r, c)));
      for (int i = 0; i < 4; ++i) buf[c * 4 + i] = static_cast<unsigned char>(bits >> (8 * i));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw FormatError("failed writing GGF1 stream");
}

Matrix read_ggf1(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "GGF1", 4) != 0) throw FormatError("bad GGF1 magic");
  const std::uint32_t n = get_u32(in);
  const std::uint32_t w = get_u32(in);
  Matrix out(n, w);
  std::vector<unsigned char> buf(static_cast<std::size_t>(w) * 4);
  for (std::uint32_t r = 0; r < n; ++r) {
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()))) {
      throw FormatError("truncated GGF1 stream at row " + std::to_string(r));
    }
    for (std::uint32_t c = 0; c < w; ++c) {
      const std::uint32_t bits = buf[c * 4] | (buf[c * 4 + 1] << 8) | (buf[c * 4 + 2] << 16) |
                                 (static_cast<std::uint32_t>(buf[c * 4 + 3]) << 24);
      out(r, c) = std::bit_cast<float>(bits);
    }
  }
  return out;
}

void write_ggf1_file(const std::string& path, const Matrix& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write feature cache: " + path);
  write_ggf1(out, rows);
}

Matrix read_ggf1_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open feature cache: " + path);
  return read_ggf1(in);
}

FeatureSequence build_model_input(const FeatureSequence& audio, const FeatureSequence& text,
                                  const Vector& noise) {
  if (audio.frame_count() != text.frame_count()) {
    throw AlignmentError("audio has " + std::to_string(audio.frame_count()) + " frames but text has " +
                         std::to_string(text.frame_count()));
  }
  const int t = audio.frame_count();
  FeatureSequence out;
  out.kind = FeatureKind::Combined;
  out.frames.resize(t, text.width() + audio.width() + noise.size());
  out.frames.leftCols(text.width()) = text.frames;
  out.frames.middleCols(text.width(), audio.width()) = audio.frames;
  out.frames.rightCols(noise.size()) = noise.transpose().replicate(t, 1);
  return out;
}

}  // namespace gesturegan
