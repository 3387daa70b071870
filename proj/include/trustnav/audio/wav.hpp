#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "trustnav/error.hpp"

namespace trustnav::audio {

/// Mono clip with samples normalized to [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  double duration() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

inline constexpr int kMinSampleRate = 8000;

class DecodeError : public InputError {
 public:
  using InputError::InputError;
};

/// Decodes a RIFF/WAVE linear-PCM container (8/16/24/32-bit integer or
/// 32-bit float). Throws DecodeError on malformed data, multichannel input
/// ("mono required") or sample rates below 8 kHz.
AudioClip decode_audio(std::span<const std::uint8_t> bytes);

AudioClip load_wav(const std::filesystem::path& path);

/// 16-bit PCM mono. Samples outside [-1, 1] are clipped.
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);

void save_wav(const std::filesystem::path& path, const AudioClip& clip);

}  // namespace trustnav::audio
