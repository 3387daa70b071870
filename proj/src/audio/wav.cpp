#include "trustnav/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

namespace trustnav::audio {
namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  bool has(std::size_t n) const { return pos_ + n <= bytes_.size(); }
  std::size_t pos() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8) | (bytes_[pos_ + 2] << 16) |
                      (static_cast<std::uint32_t>(bytes_[pos_ + 3]) << 24);
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] | (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::string tag() {
    need(4);
    std::string t(reinterpret_cast<const char*>(bytes_.data() + pos_), 4);
    pos_ += 4;
    return t;
  }

 private:
  void need(std::size_t n) const {
    if (!has(n)) throw DecodeError("malformed WAV: unexpected end of data");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

struct Format {
  std::uint16_t encoding = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

constexpr std::uint16_t kPcm = 1;
constexpr std::uint16_t kFloat = 3;
constexpr std::uint16_t kExtensible = 0xFFFE;

double read_sample(const std::uint8_t* p, const Format& fmt) {
  if (fmt.encoding == kFloat) {
    float f;
    std::uint32_t raw = p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
    std::memcpy(&f, &raw, sizeof f);
    return std::clamp(static_cast<double>(f), -1.0, 1.0);
  }
  switch (fmt.bits) {
    case 8:
      return (static_cast<int>(p[0]) - 128) / 128.0;
    case 16: {
      auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
      return v / 32768.0;
    }
    case 24: {
      std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;
      return v / 8388608.0;
    }
    case 32: {
      auto v = static_cast<std::int32_t>(p[0] | (p[1] << 8) | (p[2] << 16) |
                                         (static_cast<std::uint32_t>(p[3]) << 24));
      return v / 2147483648.0;
    }
  }
  throw DecodeError("unsupported bit depth " + std::to_string(fmt.bits));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

}  // namespace

AudioClip decode_audio(std::span<const std::uint8_t> bytes) {
  Reader in(bytes);
  if (!in.has(12)) throw DecodeError("malformed WAV: too short for a RIFF header");
  if (in.tag() != "RIFF") throw DecodeError("malformed WAV: missing RIFF tag");
  in.u32();
  if (in.tag() != "WAVE") throw DecodeError("malformed WAV: missing WAVE tag");

  std::optional<Format> fmt;
  std::span<const std::uint8_t> data;
  bool have_data = false;
  while (in.has(8)) {
    const std::string id = in.tag();
    const std::uint32_t size = in.u32();
    const std::size_t body = in.pos();
    if (!in.has(size)) {
      // Some writers leave the data size unpatched; accept a truncated data chunk.
      if (id != "data") throw DecodeError("malformed WAV: chunk '" + id + "' overruns file");
    }
    if (id == "fmt ") {
      if (size < 16) throw DecodeError("malformed WAV: fmt chunk too small");
      Format f;
      f.encoding = in.u16();
      f.channels = in.u16();
      f.sample_rate = in.u32();
      in.u32();  // byte rate
      in.u16();  // block align
      f.bits = in.u16();
      if (f.encoding == kExtensible && size >= 26) {
        in.u16();  // cbSize
        in.u16();  // valid bits
        in.u32();  // channel mask
        f.encoding = in.u16();  // first two bytes of the sub-format GUID
      }
      fmt = f;
    } else if (id == "data") {
      const std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      data = bytes.subspan(body, avail);
      have_data = true;
    }
    const std::size_t next = body + size + (size & 1u);
    if (next > bytes.size()) break;
    in.seek(next);
  }
  if (!fmt) throw DecodeError("malformed WAV: missing fmt chunk");
  if (!have_data) throw DecodeError("malformed WAV: missing data chunk");
  if (fmt->encoding != kPcm && fmt->encoding != kFloat)
    throw DecodeError("unsupported WAV encoding " + std::to_string(fmt->encoding) + " (linear PCM required)");
  if (fmt->encoding == kFloat && fmt->bits != 32) throw DecodeError("unsupported float bit depth");
  if (fmt->bits != 8 && fmt->bits != 16 && fmt->bits != 24 && fmt->bits != 32)
    throw DecodeError("unsupported bit depth " + std::to_string(fmt->bits));
  if (fmt->channels != 1)
    throw DecodeError("mono required (file has " + std::to_string(fmt->channels) + " channels)");
  if (fmt->sample_rate < static_cast<std::uint32_t>(kMinSampleRate))
    throw DecodeError("sample rate " + std::to_string(fmt->sample_rate) + " Hz is below 8000 Hz");

  const std::size_t width = fmt->bits / 8;
  AudioClip clip;
  clip.sample_rate = static_cast<int>(fmt->sample_rate);
  const std::size_t count = data.size() / width;
  clip.samples.reserve(count);
  for (std::size_t i = 0; i < count; ++i) clip.samples.push_back(read_sample(data.data() + i * width, *fmt));
  return clip;
}

AudioClip load_wav(const std::filesystem::path& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot open audio file " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  try {
    return decode_audio(bytes);
  } catch (const DecodeError& e) {
    throw DecodeError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_wav(const AudioClip& clip) {
  const auto data_size = static_cast<std::uint32_t>(clip.samples.size() * 2);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_size);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, kPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  put_tag(out, "data");
  put_u32(out, data_size);
  for (double s : clip.samples) {
    const double q = std::round(std::clamp(s, -1.0, 1.0) * 32767.0);
    put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  return out;
}

void save_wav(const std::filesystem::path& path, const AudioClip& clip) {
  const auto bytes = encode_wav(clip);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw InputError("cannot write audio file " + path.string());
  file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace trustnav::audio
