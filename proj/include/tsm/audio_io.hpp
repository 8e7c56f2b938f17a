#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "tsm/core_types.hpp"
#include "tsm/error.hpp"

namespace tsm {

static_assert(std::endian::native == std::endian::little, "WAV codec assumes a little-endian host");

enum class WavFormat { Pcm16, Float32 };

struct DecodedWav {
  AudioBuffer audio;
  WavFormat format;
  std::uint16_t channels;
};

namespace detail {

inline std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

inline std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t at) {
  return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
         (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

inline bool tag_is(std::span<const std::uint8_t> b, std::size_t at, std::string_view tag) {
  return std::memcmp(b.data() + at, tag.data(), 4) == 0;
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline void put_tag(std::vector<std::uint8_t>& out, std::string_view tag) { out.insert(out.end(), tag.begin(), tag.end()); }

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace detail

/// Parses a RIFF/WAVE image. Accepts 16-bit PCM and 32-bit float (plain or
/// WAVE_FORMAT_EXTENSIBLE); channels are averaged to mono. Unknown chunks are
/// skipped.
inline DecodedWav decode_wav(std::span<const std::uint8_t> bytes) {
  using namespace detail;
  if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    throw Error(ErrorCode::CorruptHeader, "missing RIFF/WAVE signature");
  }
  bool have_fmt = false;
  std::uint16_t tag = 0, channels = 0, block_align = 0, bits = 0;
  std::uint32_t rate = 0;
  std::span<const std::uint8_t> data;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t size = read_u32(bytes, pos + 4);
    const std::size_t body = pos + 8;
    if (tag_is(bytes, pos, "fmt ")) {
      if (size < 16 || body + size > bytes.size()) throw Error(ErrorCode::CorruptHeader, "truncated fmt chunk");
      tag = read_u16(bytes, body);
      channels = read_u16(bytes, body + 2);
      rate = read_u32(bytes, body + 4);
      block_align = read_u16(bytes, body + 12);
      bits = read_u16(bytes, body + 14);
      if (tag == kFormatExtensible) {
        if (size < 40) throw Error(ErrorCode::CorruptHeader, "truncated extensible fmt chunk");
        tag = read_u16(bytes, body + 24);  // first two bytes of the subformat GUID
      }
      have_fmt = true;
    } else if (tag_is(bytes, pos, "data")) {
      // a short final data chunk is tolerated: keep the whole frames present
      const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      data = bytes.subspan(body, avail);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw Error(ErrorCode::CorruptHeader, "no fmt chunk");
  if (!have_data) throw Error(ErrorCode::CorruptHeader, "no data chunk");
  if (channels == 0 || rate == 0 || rate > static_cast<std::uint32_t>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::CorruptHeader, "invalid channel count or sample rate");
  }

  WavFormat format;
  if (tag == kFormatPcm && bits == 16) {
    format = WavFormat::Pcm16;
  } else if (tag == kFormatFloat && bits == 32) {
    format = WavFormat::Float32;
  } else {
    throw Error(ErrorCode::UnsupportedFormat, "format tag " + std::to_string(tag) + " with " + std::to_string(bits) +
                                                  "-bit samples (only 16-bit PCM and 32-bit float are supported)");
  }
  const std::size_t sample_bytes = bits / 8;
  if (block_align != channels * sample_bytes) throw Error(ErrorCode::CorruptHeader, "block align mismatch");

  const std::size_t frames = data.size() / block_align;
  std::vector<double> mono(frames, 0.0);
  for (std::size_t f = 0; f < frames; ++f) {
    const auto sample = [&](std::size_t c) {
      const std::size_t at = f * block_align + c * sample_bytes;
      if (format == WavFormat::Pcm16) return static_cast<double>(static_cast<std::int16_t>(read_u16(data, at))) / 32768.0;
      return static_cast<double>(std::bit_cast<float>(read_u32(data, at)));
    };
    // start from channel 0 rather than 0.0 so a mono -0.0f survives the trip
    double acc = sample(0);
    for (std::size_t c = 1; c < channels; ++c) acc += sample(c);
    mono[f] = channels == 1 ? acc : acc / channels;
  }
  return {AudioBuffer(std::move(mono), static_cast<int>(rate)), format, channels};
}

/// Mono RIFF/WAVE image with a canonical 44-byte header. Pcm16 uses the same
/// 1/32768 scale as decode_wav, rounds half to even and saturates to
/// [-32768, 32767], so anything at or above 1.0 is stored as 32767.
inline std::vector<std::uint8_t> encode_wav(const AudioBuffer& buffer, WavFormat format) {
  using namespace detail;
  const std::uint16_t bits = format == WavFormat::Pcm16 ? 16 : 32;
  const std::uint32_t bytes_per_sample = bits / 8;
  const auto data_size = static_cast<std::uint32_t>(buffer.size() * bytes_per_sample);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, format == WavFormat::Pcm16 ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz()));
  put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate_hz()) * bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(bytes_per_sample));
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double v : buffer.samples()) {
    if (format == WavFormat::Pcm16) {
      const double q = std::clamp(std::nearbyint(std::clamp(v, -1.0, 1.0) * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  return out;
}

inline DecodedWav read_wav_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "read failed for '" + path.string() + "'");
  return decode_wav(bytes);
}

inline AudioBuffer read_wav(const std::filesystem::path& path) { return read_wav_file(path).audio; }

inline void write_wav(const std::filesystem::path& path, const AudioBuffer& buffer, WavFormat format) {
  const auto bytes = encode_wav(buffer, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Contour files
//
//   {"mode": "scale" | "duration",
//    "segments": [{"start": s, "end": s, "target": x}, ...]}

enum class ContourMode { Scale, Duration };

struct ContourSpec {
  ContourMode mode = ContourMode::Scale;
  std::vector<SegmentSpec> segments;

  friend bool operator==(const ContourSpec&, const ContourSpec&) = default;
};

inline ContourSpec parse_contour(std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::SyntaxError, e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::SyntaxError, "contour must be a JSON object");
  if (!doc.contains("mode")) throw Error(ErrorCode::MissingField, "contour has no \"mode\"");
  if (!doc.contains("segments")) throw Error(ErrorCode::MissingField, "contour has no \"segments\"");

  ContourSpec spec;
  const auto& mode = doc["mode"];
  if (mode == "scale") {
    spec.mode = ContourMode::Scale;
  } else if (mode == "duration") {
    spec.mode = ContourMode::Duration;
  } else {
    throw Error(ErrorCode::InvalidValue, "\"mode\" must be \"scale\" or \"duration\"");
  }
  const auto& segments = doc["segments"];
  if (!segments.is_array()) throw Error(ErrorCode::InvalidValue, "\"segments\" must be an array");

  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const std::string where = "segment " + std::to_string(i);
    if (!s.is_object()) throw Error(ErrorCode::InvalidValue, where + " is not an object");
    const auto number = [&](const char* key) {
      if (!s.contains(key)) throw Error(ErrorCode::MissingField, where + " has no \"" + key + "\"");
      if (!s[key].is_number()) throw Error(ErrorCode::InvalidValue, where + " field \"" + key + "\" is not a number");
      return s[key].get<double>();
    };
    SegmentSpec seg;
    seg.start_s = number("start");
    seg.end_s = number("end");
    const double target = number("target");
    if (!(seg.start_s >= 0.0)) throw Error(ErrorCode::InvalidValue, where + " starts before 0");
    if (!(seg.start_s < seg.end_s)) throw Error(ErrorCode::InvalidValue, where + " needs start < end");
    if (!(target > 0.0) || !std::isfinite(target)) throw Error(ErrorCode::InvalidValue, where + " needs a positive target");
    if (spec.mode == ContourMode::Scale) {
      seg.target = Scale{target};
    } else {
      seg.target = Duration{target};
    }
    spec.segments.push_back(seg);
  }
  return spec;
}

inline std::string serialize_contour(const ContourSpec& spec) {
  nlohmann::json doc;
  doc["mode"] = spec.mode == ContourMode::Scale ? "scale" : "duration";
  doc["segments"] = nlohmann::json::array();
  for (const auto& seg : spec.segments) {
    doc["segments"].push_back({{"start", seg.start_s}, {"end", seg.end_s}, {"target", target_value(seg.target)}});
  }
  return doc.dump();
}

inline ContourSpec read_contour_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for reading");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_contour(text);
}

}  // namespace tsm
