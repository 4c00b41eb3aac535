#include <cstring>
#include <fstream>
#include <iterator>

#include "gesturegan/audio.hpp"
#include "gesturegan/errors.hpp"

namespace gesturegan {
namespace {

std::uint32_t le32(const std::uint8_t* p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
std::uint16_t le16(const std::uint8_t* p) { return static_cast<std::uint16_t>(p[0] | (p[1] << 8)); }

void put32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace

AudioTrack read_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw FormatError("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size() && std::memcmp(chunk, "data", 4) != 0) {
      throw FormatError("truncated WAV chunk");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) throw FormatError("fmt chunk too small");
      const std::uint8_t* f = bytes.data() + body;
      std::uint16_t format = le16(f);
      channels = le16(f + 2);
      rate = le32(f + 4);
      bits = le16(f + 14);
      if (format == kFormatExtensible && size >= 26) format = le16(f + 24);
      if (format != kFormatPcm) throw FormatError("unsupported WAV codec " + std::to_string(format));
      if (bits != 16) throw FormatError("unsupported WAV bit depth " + std::to_string(bits));
      if (channels != 1 && channels != 2) {
        throw FormatError("unsupported WAV channel count " + std::to_string(channels));
      }
      if (rate == 0) throw FormatError("WAV sample rate is zero");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (!have_fmt) throw FormatError("data chunk before fmt chunk");
      // Some writers leave the size unset; clamp to what is present.
      const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t frames = avail / frame_bytes;
      AudioTrack track;
      track.sample_rate = rate;
      track.samples.resize(frames);
      const std::uint8_t* d = bytes.data() + body;
      for (std::size_t i = 0; i < frames; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
          acc += static_cast<std::int16_t>(le16(d + i * frame_bytes + 2 * c)) / 32768.0;
        }
        track.samples[i] = acc / channels;
      }
      if (track.samples.empty()) throw FormatError("WAV file has no samples");
      return track;
    }
    pos = body + size + (size & 1u);
  }
  throw FormatError("WAV file has no data chunk");
}

AudioTrack read_wav_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open WAV file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_wav(bytes);
}

std::vector<std::uint8_t> encode_wav(const AudioTrack& track) {
  std::vector<std::uint8_t> out;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(track.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(track.sample_rate);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + data_bytes);
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, kFormatPcm);
  put16(out, 1);
  put32(out, rate);
  put32(out, rate * 2);
  put16(out, 2);
  put16(out, 16);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, data_bytes);
  for (double s : track.samples) {
    const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
    const auto v = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put16(out, static_cast<std::uint16_t>(v));
  }
  return out;
}

void write_wav_file(const std::string& path, const AudioTrack& track) {
  const auto bytes = encode_wav(track);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write WAV file: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace gesturegan
