#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "trustnav/audio/wav.hpp"

namespace trustnav::audio {

/// Framing, thresholds and hesitation rule for vocal cue extraction.
struct VocalThresholds {
  double loudness_db = 6.0;         // minimum loudness change (dB) for an event
  double pitch_semitones = 2.0;     // minimum pitch change (semitones) for an event
  double frame_ms = 25.0;
  double hop_ms = 10.0;
  double pitch_low_hz = 60.0;
  double pitch_high_hz = 400.0;
  double voicing_clarity = 0.5;     // normalized autocorrelation peak needed to call a frame voiced
  double rate_abs_limit_s = 6.0;    // segments longer than this are hesitant
  double rate_rel_limit = 3.0;      // ... or longer than this multiple of the median segment
  int median_window = 5;
  int max_unvoiced_bridge = 3;      // unvoiced frames a pitch difference may span

  /// Throws InputError when a value is out of range.
  void validate() const;
};

/// Per-frame scalar track. Loudness frames are always present; pitch frames
/// are absent when unvoiced.
struct FrameSeries {
  std::vector<double> frame_times;  // frame centers, seconds
  std::vector<std::optional<double>> values;
  double hop = 0.0;

  std::size_t size() const { return values.size(); }
};

struct ChangeEvent {
  double time = 0.0;       // seconds
  double magnitude = 0.0;  // |change| in feature units
  double change = 0.0;     // signed change; positive = louder / higher

  bool operator==(const ChangeEvent&) const = default;
};

struct TimeSpan {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
  bool operator==(const TimeSpan&) const = default;
};

struct SegmentRate {
  std::size_t index = 0;
  TimeSpan span;
  double duration = 0.0;
  bool hesitant = false;

  bool operator==(const SegmentRate&) const = default;
};

struct VocalCueReport {
  std::optional<ChangeEvent> loudness_event;
  std::optional<ChangeEvent> pitch_event;
  std::vector<SegmentRate> segment_rates;

  bool empty() const;
  bool operator==(const VocalCueReport&) const = default;
};

struct ChangeDetection {
  int median_window = 5;
  int max_gap_frames = 0;  // absent frames a difference may bridge
  int lag = 1;             // compare frame k with frame k + lag
};

/// Frame RMS in dBFS, clamped to [-100, 0].
FrameSeries loudness_track(const AudioClip& clip, const VocalThresholds& cfg);

/// Normalized cross-correlation pitch estimate with parabolic peak
/// refinement. Frames whose best peak is below the clarity threshold, or
/// whose estimate falls outside the search band, are unvoiced.
FrameSeries pitch_track(const AudioClip& clip, const VocalThresholds& cfg);

/// Converts a Hz track to semitones relative to 440 Hz, keeping absent frames.
FrameSeries to_semitones(const FrameSeries& hz);

/// Groups present frames into runs separated by gaps longer than
/// max_gap_frames, median-smooths each run, and returns the largest
/// absolute difference between smoothed values `lag` frames apart, provided
/// it reaches the threshold. Ties resolve to the earliest pair; the event
/// time is the midpoint of the pair's frame times.
std::optional<ChangeEvent> detect_max_change(const FrameSeries& series, double threshold,
                                             const ChangeDetection& options = {});

/// Running median with a window that shrinks symmetrically at the edges.
std::vector<double> median_smooth(const std::vector<double>& values, int window);

/// Durations and hesitation flags. Segments must be ordered and non-overlapping.
std::vector<SegmentRate> speech_rate(const std::vector<TimeSpan>& segments, const VocalThresholds& cfg);

VocalCueReport extract_vocal_cues(const AudioClip& clip, const std::vector<TimeSpan>& segments,
                                  const VocalThresholds& cfg);

}  // namespace trustnav::audio
