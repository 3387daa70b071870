#include "trustnav/audio/features.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace trustnav::audio {
namespace {

constexpr double kFloorDb = -100.0;

struct Framing {
  std::size_t length = 0;
  std::size_t hop = 0;
  std::size_t count = 0;
};

Framing frame_layout(const AudioClip& clip, const VocalThresholds& cfg) {
  Framing f;
  f.length = static_cast<std::size_t>(std::lround(cfg.frame_ms * clip.sample_rate / 1000.0));
  f.hop = static_cast<std::size_t>(std::lround(cfg.hop_ms * clip.sample_rate / 1000.0));
  if (f.length == 0 || f.hop == 0) throw InputError("frame and hop must span at least one sample");
  if (clip.samples.size() < f.length)
    throw DomainError("clip of " + std::to_string(clip.samples.size()) + " samples is shorter than one frame (" +
                      std::to_string(f.length) + " samples)");
  f.count = 1 + (clip.samples.size() - f.length) / f.hop;
  return f;
}

FrameSeries empty_series(const AudioClip& clip, const Framing& f) {
  FrameSeries s;
  s.hop = static_cast<double>(f.hop) / clip.sample_rate;
  s.frame_times.resize(f.count);
  s.values.resize(f.count);
  for (std::size_t i = 0; i < f.count; ++i)
    s.frame_times[i] = (static_cast<double>(i * f.hop) + f.length / 2.0) / clip.sample_rate;
  return s;
}

double median_of(std::vector<double>& window) {
  const std::size_t n = window.size();
  std::nth_element(window.begin(), window.begin() + n / 2, window.end());
  double mid = window[n / 2];
  if (n % 2 == 0) {
    const double lower = *std::max_element(window.begin(), window.begin() + n / 2);
    mid = 0.5 * (mid + lower);
  }
  return mid;
}

}  // namespace

void VocalThresholds::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw InputError(std::string("vocal threshold '") + name + "' must be positive");
  };
  positive(loudness_db, "loudness_db");
  positive(pitch_semitones, "pitch_semitones");
  positive(frame_ms, "frame_ms");
  positive(hop_ms, "hop_ms");
  positive(pitch_low_hz, "pitch_low_hz");
  positive(pitch_high_hz, "pitch_high_hz");
  positive(voicing_clarity, "voicing_clarity");
  positive(rate_abs_limit_s, "rate_abs_limit_s");
  positive(rate_rel_limit, "rate_rel_limit");
  if (pitch_low_hz >= pitch_high_hz) throw InputError("pitch band low edge must be below the high edge");
  if (median_window < 1) throw InputError("median_window must be at least 1");
  if (max_unvoiced_bridge < 0) throw InputError("max_unvoiced_bridge must be non-negative");
}

bool VocalCueReport::empty() const {
  return !loudness_event && !pitch_event &&
         std::none_of(segment_rates.begin(), segment_rates.end(), [](const SegmentRate& r) { return r.hesitant; });
}

FrameSeries loudness_track(const AudioClip& clip, const VocalThresholds& cfg) {
  const Framing f = frame_layout(clip, cfg);
  FrameSeries series = empty_series(clip, f);
  for (std::size_t i = 0; i < f.count; ++i) {
    const double* x = clip.samples.data() + i * f.hop;
    double energy = 0.0;
    for (std::size_t n = 0; n < f.length; ++n) energy += x[n] * x[n];
    const double rms = std::sqrt(energy / static_cast<double>(f.length));
    const double db = rms > 0.0 ? 20.0 * std::log10(rms) : kFloorDb;
    series.values[i] = std::clamp(db, kFloorDb, 0.0);
  }
  return series;
}

FrameSeries pitch_track(const AudioClip& clip, const VocalThresholds& cfg) {
  const Framing f = frame_layout(clip, cfg);
  FrameSeries series = empty_series(clip, f);
  const auto& x = clip.samples;
  const std::size_t n_samples = x.size();
  const double sr = clip.sample_rate;
  const auto min_lag = std::max<std::size_t>(2, static_cast<std::size_t>(std::floor(sr / cfg.pitch_high_hz)));
  const auto max_lag = static_cast<std::size_t>(std::ceil(sr / cfg.pitch_low_hz));

  // Prefix sums of squared samples give window energies in O(1).
  std::vector<double> cumulative(n_samples + 1, 0.0);
  for (std::size_t n = 0; n < n_samples; ++n) cumulative[n + 1] = cumulative[n] + x[n] * x[n];
  auto energy = [&](std::size_t start, std::size_t len) { return cumulative[start + len] - cumulative[start]; };

  std::vector<double> nccf(max_lag + 2, 0.0);
  for (std::size_t i = 0; i < f.count; ++i) {
    const std::size_t start = i * f.hop;
    const std::size_t room = n_samples - start - f.length;  // samples available beyond the frame
    const std::size_t top = std::min(max_lag + 1, room);    // last lag evaluated (one past the search for interpolation)
    if (top < min_lag + 1) continue;
    const double e0 = energy(start, f.length);
    if (e0 <= 1e-12) continue;

    const double* frame = x.data() + start;
    for (std::size_t lag = min_lag - 1; lag <= top; ++lag) {
      const double* shifted = frame + lag;
      double dot = 0.0;
      for (std::size_t n = 0; n < f.length; ++n) dot += frame[n] * shifted[n];
      const double e1 = energy(start + lag, f.length);
      nccf[lag] = e1 > 1e-12 ? dot / std::sqrt(e0 * e1) : 0.0;
    }

    const std::size_t last = std::min(max_lag, top - 1);
    double best = -1.0;
    for (std::size_t lag = min_lag; lag <= last; ++lag) best = std::max(best, nccf[lag]);
    if (best < cfg.voicing_clarity) continue;

    // Earliest local peak close to the global best avoids sub-octave picks.
    std::size_t pick = 0;
    for (std::size_t lag = min_lag; lag <= last; ++lag) {
      if (nccf[lag] >= 0.9 * best && nccf[lag] >= nccf[lag - 1] && nccf[lag] >= nccf[lag + 1]) {
        pick = lag;
        break;
      }
    }
    if (pick == 0) continue;
    const double a = nccf[pick - 1], b = nccf[pick], c = nccf[pick + 1];
    const double denom = a - 2.0 * b + c;
    double offset = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
    offset = std::clamp(offset, -0.5, 0.5);
    const double hz = sr / (static_cast<double>(pick) + offset);
    if (hz < cfg.pitch_low_hz || hz > cfg.pitch_high_hz) continue;
    series.values[i] = hz;
  }
  return series;
}

FrameSeries to_semitones(const FrameSeries& hz) {
  FrameSeries out = hz;
  for (auto& v : out.values)
    if (v) v = 12.0 * std::log2(*v / 440.0);
  return out;
}

std::vector<double> median_smooth(const std::vector<double>& values, int window) {
  const std::size_t n = values.size();
  const std::size_t half = window > 1 ? static_cast<std::size_t>(window / 2) : 0;
  std::vector<double> out(n);
  std::vector<double> scratch;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    scratch.assign(values.begin() + static_cast<std::ptrdiff_t>(i - h),
                   values.begin() + static_cast<std::ptrdiff_t>(i + h + 1));
    out[i] = median_of(scratch);
  }
  return out;
}

std::optional<ChangeEvent> detect_max_change(const FrameSeries& series, double threshold,
                                             const ChangeDetection& options) {
  if (options.lag < 1) throw InputError("change detection lag must be at least one frame");
  const auto lag = static_cast<std::size_t>(options.lag);
  std::optional<ChangeEvent> best;
  std::vector<double> run_values;
  std::vector<double> run_times;

  auto flush = [&]() {
    if (run_values.size() > lag) {
      const auto smoothed = median_smooth(run_values, options.median_window);
      for (std::size_t k = 0; k + lag < smoothed.size(); ++k) {
        const double change = smoothed[k + lag] - smoothed[k];
        const double magnitude = std::abs(change);
        if (magnitude >= threshold && (!best || magnitude > best->magnitude)) {
          best = ChangeEvent{0.5 * (run_times[k] + run_times[k + lag]), magnitude, change};
        }
      }
    }
    run_values.clear();
    run_times.clear();
  };

  std::optional<std::size_t> last_present;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (!series.values[i]) continue;
    if (last_present && i - *last_present - 1 > static_cast<std::size_t>(options.max_gap_frames)) flush();
    run_values.push_back(*series.values[i]);
    run_times.push_back(series.frame_times[i]);
    last_present = i;
  }
  flush();
  return best;
}

std::vector<SegmentRate> speech_rate(const std::vector<TimeSpan>& segments, const VocalThresholds& cfg) {
  std::vector<SegmentRate> rates;
  if (segments.empty()) return rates;
  std::vector<double> durations;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    if (!(s.end > s.start)) throw DomainError("segment " + std::to_string(i) + " has non-positive duration");
    if (i > 0 && s.start < segments[i - 1].end - 1e-9)
      throw DomainError("segments " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap or are unordered");
    durations.push_back(s.duration());
  }
  std::vector<double> sorted = durations;
  const double median = median_of(sorted);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double d = durations[i];
    const bool hesitant = d > cfg.rate_abs_limit_s || d > cfg.rate_rel_limit * median;
    rates.push_back(SegmentRate{i, segments[i], d, hesitant});
  }
  return rates;
}

VocalCueReport extract_vocal_cues(const AudioClip& clip, const std::vector<TimeSpan>& segments,
                                  const VocalThresholds& cfg) {
  cfg.validate();
  const double duration = clip.duration();
  const double slack = cfg.hop_ms / 1000.0;
  for (const auto& s : segments) {
    if (s.start < -1e-9 || s.end > duration + slack)
      throw DomainError("segment [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                        "] lies outside the clip (" + std::to_string(duration) + " s)");
  }

  VocalCueReport report;
  // Overlapping windows smear a step across several frames; comparing
  // frames that share no samples measures its full height.
  const int lag = static_cast<int>(std::ceil(cfg.frame_ms / cfg.hop_ms - 1e-9)) + 1;
  const ChangeDetection loud{cfg.median_window, 0, lag};
  report.loudness_event = detect_max_change(loudness_track(clip, cfg), cfg.loudness_db, loud);
  const ChangeDetection pitch{cfg.median_window, cfg.max_unvoiced_bridge, lag};
  report.pitch_event = detect_max_change(to_semitones(pitch_track(clip, cfg)), cfg.pitch_semitones, pitch);
  for (auto* ev : {&report.loudness_event, &report.pitch_event})
    if (*ev) (*ev)->time = std::clamp((*ev)->time, 0.0, duration);
  report.segment_rates = speech_rate(segments, cfg);
  return report;
}

}  // namespace trustnav::audio
