#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support/synth.hpp"
#include "trustnav/audio/features.hpp"
#include "trustnav/audio/wav.hpp"

using namespace trustnav::audio;
using namespace testsupport;

namespace {

std::vector<double> present(const FrameSeries& s) {
  std::vector<double> out;
  for (const auto& v : s.values)
    if (v) out.push_back(*v);
  return out;
}

FrameSeries hand_series(const std::vector<double>& values, double hop = 0.01) {
  FrameSeries s;
  s.hop = hop;
  for (std::size_t i = 0; i < values.size(); ++i) {
    s.frame_times.push_back(0.0125 + hop * static_cast<double>(i));
    s.values.push_back(values[i]);
  }
  return s;
}

// Brute-force median of a shrinking symmetric window.
double median_at(const std::vector<double>& v, std::size_t i, int window) {
  const auto half = static_cast<std::size_t>(window / 2);
  const std::size_t r = std::min({half, i, v.size() - 1 - i});
  std::vector<double> w(v.begin() + static_cast<long>(i - r), v.begin() + static_cast<long>(i + r + 1));
  std::sort(w.begin(), w.end());
  return w.size() % 2 ? w[w.size() / 2] : 0.5 * (w[w.size() / 2 - 1] + w[w.size() / 2]);
}

}  // namespace

TEST_CASE("full-scale sine sits at -3.01 dBFS") {
  const auto track = loudness_track(sine(440.0, 1.0), {});
  REQUIRE(track.size() > 90);
  for (const auto& v : track.values) CHECK(std::abs(*v + 3.0103) <= 0.1);
}

TEST_CASE("silence clamps to the loudness floor and has no voiced frames") {
  const auto clip = silence(1.0);
  for (const auto& v : loudness_track(clip, {}).values) CHECK(*v == -100.0);
  CHECK(present(pitch_track(clip, {})).empty());
  const auto report = extract_vocal_cues(clip, {{0.0, 1.0}}, {});
  CHECK_FALSE(report.loudness_event);
  CHECK_FALSE(report.pitch_event);
  CHECK_FALSE(report.segment_rates.at(0).hesitant);
}

TEST_CASE("amplitude step 0.1 -> 0.9 gives a 19.08 dB step") {
  const auto clip = shaped(4.0, [](double) { return 220.0; }, [](double t) { return t < 2.0 ? 0.1 : 0.9; });
  const auto track = loudness_track(clip, {});
  const double expected = 20.0 * std::log10(0.9 / 0.1);
  // Frames fully on either side of the boundary.
  double before = 0.0, after = 0.0;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (std::abs(track.frame_times[i] - 1.9) < 1e-9 || (track.frame_times[i] < 1.95 && track.frame_times[i] > 1.89))
      before = *track.values[i];
    if (track.frame_times[i] > 2.05 && track.frame_times[i] < 2.06) after = *track.values[i];
  }
  CHECK(after - before == doctest::Approx(expected).epsilon(0.005));

  const auto report = extract_vocal_cues(clip, {{0.0, 4.0}}, {});
  REQUIRE(report.loudness_event);
  CHECK(std::abs(report.loudness_event->time - 2.0) <= 0.010 + 1e-9);
  CHECK(report.loudness_event->change > 0.0);
}

TEST_CASE("220 Hz sine is tracked within 2 Hz") {
  const auto track = pitch_track(sine(220.0, 1.0, 0.5), {});
  const auto voiced = present(track);
  CHECK(voiced.size() >= track.size() - 2);
  for (double f : voiced) CHECK(std::abs(f - 220.0) <= 2.0);
}

TEST_CASE("linear glide 200 -> 300 Hz is monotone and follows the instantaneous frequency") {
  const double T = 2.0;
  const auto clip = shaped(T, [&](double t) { return glide_freq(200.0, 300.0, T, t); }, [](double) { return 0.5; });
  const auto track = pitch_track(clip, {});
  std::optional<double> prev;
  std::size_t voiced = 0;
  for (std::size_t i = 0; i < track.size(); ++i) {
    if (!track.values[i]) continue;
    ++voiced;
    const double f = *track.values[i];
    CHECK(std::abs(f - glide_freq(200.0, 300.0, T, track.frame_times[i])) <= 5.0);
    if (prev) CHECK(f >= *prev);
    prev = f;
  }
  CHECK(voiced > track.size() * 9 / 10);
}

TEST_CASE("pitch is reported only inside the search band") {
  CHECK(present(pitch_track(sine(40.0, 1.0, 0.5), {})).empty());
}

TEST_CASE("detect_max_change on hand-built series") {
  CHECK_FALSE(detect_max_change(hand_series(std::vector<double>(300, 3.0)), 6.0));

  std::vector<double> jump(400, 0.0);
  for (std::size_t i = 0; i < jump.size(); ++i)
    if (0.0125 + 0.01 * static_cast<double>(i) > 2.0) jump[i] = 8.0;
  const auto ev = detect_max_change(hand_series(jump), 6.0);
  REQUIRE(ev);
  CHECK(ev->time == doctest::Approx(2.0).epsilon(0.005));
  CHECK(ev->magnitude == doctest::Approx(8.0));

  for (auto& v : jump) v = v > 0 ? 4.0 : 0.0;
  CHECK_FALSE(detect_max_change(hand_series(jump), 6.0));
}

TEST_CASE("detect_max_change ties resolve to the earliest pair") {
  std::vector<double> v(100, 0.0);
  for (std::size_t i = 30; i < 60; ++i) v[i] = 10.0;  // up at 30, down at 60: equal magnitudes
  const auto ev = detect_max_change(hand_series(v), 6.0);
  REQUIRE(ev);
  CHECK(ev->change > 0.0);
  CHECK(ev->time < 0.4);
}

TEST_CASE("speech_rate hesitation rule") {
  VocalThresholds cfg;
  auto spans = [](std::vector<double> durs) {
    std::vector<TimeSpan> out;
    double t = 0.0;
    for (double d : durs) {
      out.push_back({t, t + d});
      t += d;
    }
    return out;
  };
  auto flags = [&](std::vector<double> durs) {
    std::vector<bool> f;
    for (const auto& r : speech_rate(spans(durs), cfg)) f.push_back(r.hesitant);
    return f;
  };
  CHECK(flags({1, 1, 7}) == std::vector<bool>{false, false, true});
  CHECK(flags({1, 1, 1}) == std::vector<bool>{false, false, false});
  CHECK(flags({1, 1, 3.5}) == std::vector<bool>{false, false, true});
  CHECK(speech_rate({}, cfg).empty());
  CHECK_THROWS_AS(speech_rate({{0.0, 2.0}, {1.0, 3.0}}, cfg), trustnav::DomainError);
}

TEST_CASE("glide crossing 4 semitones within one hop raises a pitch event") {
  // 2 s at 200 Hz, then a 10 ms glide up 4 semitones, then hold.
  const double f0 = 200.0, f1 = 200.0 * std::pow(2.0, 4.0 / 12.0);
  auto freq = [&](double t) { return t < 2.0 ? f0 : (t < 2.01 ? f0 + (f1 - f0) * (t - 2.0) / 0.01 : f1); };
  const auto clip = shaped(4.0, freq, [](double) { return 0.5; });
  const auto report = extract_vocal_cues(clip, {{0.0, 4.0}}, {});
  REQUIRE(report.pitch_event);
  CHECK(std::abs(report.pitch_event->time - 2.0) <= 0.03);
  CHECK(report.pitch_event->change > 0.0);
  CHECK_FALSE(report.loudness_event);
}

TEST_CASE("steps just above threshold are recovered from audio") {
  // 7 dB loudness step, then a 2.5 semitone pitch step.
  const double g = std::pow(10.0, 7.0 / 20.0), r = std::pow(2.0, 2.5 / 12.0);
  const auto loud = shaped(3.0, [](double) { return 180.0; }, [&](double t) { return t < 1.503 ? 0.1 : 0.1 * g; });
  auto rep = extract_vocal_cues(loud, {{0.0, 3.0}}, {});
  REQUIRE(rep.loudness_event);
  CHECK(std::abs(rep.loudness_event->time - 1.503) <= 0.02);
  CHECK(rep.loudness_event->magnitude == doctest::Approx(7.0).epsilon(0.03));

  const auto pitch = shaped(3.0, [&](double t) { return t < 1.207 ? 150.0 : 150.0 * r; }, [](double) { return 0.3; });
  rep = extract_vocal_cues(pitch, {{0.0, 3.0}}, {});
  REQUIRE(rep.pitch_event);
  CHECK(std::abs(rep.pitch_event->time - 1.207) <= 0.02);
  CHECK_FALSE(rep.loudness_event);
}

TEST_CASE("property: gain shifts loudness by 20 log10 g and leaves pitch unchanged") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> hz(90.0, 350.0), amp(0.05, 0.4);
  for (int trial = 0; trial < 6; ++trial) {
    const double f = hz(rng), a = amp(rng);
    const auto base = sine(f, 0.5, a);
    for (double g : {0.1, 0.5, std::pow(2.0, -0.5), 2.0}) {
      auto scaled = base;
      for (auto& s : scaled.samples) s *= g;
      const auto l0 = loudness_track(base, {}), l1 = loudness_track(scaled, {});
      for (std::size_t i = 0; i < l0.size(); ++i) CHECK(std::abs(*l1.values[i] - *l0.values[i] - 20.0 * std::log10(g)) <= 0.01);
      const auto p0 = pitch_track(base, {}), p1 = pitch_track(scaled, {});
      for (std::size_t i = 0; i < p0.size(); ++i) {
        REQUIRE(p0.values[i].has_value() == p1.values[i].has_value());
        if (p0.values[i]) CHECK(std::abs(*p0.values[i] - *p1.values[i]) < 1e-6);
      }
    }
  }
}

TEST_CASE("property: detect_max_change magnitude equals the brute-force maximum") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> len(1, 10000);
  std::normal_distribution<double> noise(0.0, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = trial < 5 ? static_cast<std::size_t>(trial + 1) : len(rng);
    std::vector<double> v(n);
    double level = 0.0;
    for (auto& x : v) {
      if (rng() % 50 == 0) level += noise(rng) * 4.0;
      x = level + noise(rng);
    }
    std::vector<double> smooth(n);
    for (std::size_t i = 0; i < n; ++i) smooth[i] = median_at(v, i, 5);
    CHECK(median_smooth(v, 5) == smooth);

    for (int lag : {1, 4}) {
      double best = 0.0;
      for (std::size_t i = 0; i + lag < n; ++i) best = std::max(best, std::abs(smooth[i + lag] - smooth[i]));
      const auto ev = detect_max_change(hand_series(v), 0.0, {5, 0, lag});
      if (n <= static_cast<std::size_t>(lag)) {
        CHECK_FALSE(ev);
        continue;
      }
      REQUIRE(ev);
      CHECK(ev->magnitude == best);
    }
  }
}

TEST_CASE("property: reports are deterministic and event times lie inside the clip") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 8; ++trial) {
    const double T = 0.3 + 2.0 * u(rng);
    const double step_at = T * u(rng), f0 = 100.0 + 200.0 * u(rng);
    const auto clip = shaped(T, [&](double t) { return t < step_at ? f0 : f0 * 1.4; },
                             [&](double t) { return t < step_at ? 0.05 : 0.8; });
    const std::vector<TimeSpan> segs{{0.0, T / 2}, {T / 2, T}};
    const auto a = extract_vocal_cues(clip, segs, {});
    const auto b = extract_vocal_cues(clip, segs, {});
    CHECK(a == b);
    for (const auto& ev : {a.loudness_event, a.pitch_event})
      if (ev) {
        CHECK(ev->time >= 0.0);
        CHECK(ev->time <= clip.duration());
      }
  }
}

TEST_CASE("segments outside the clip are rejected") {
  CHECK_THROWS_AS(extract_vocal_cues(silence(1.0), {{0.0, 2.0}}, {}), trustnav::DomainError);
}

TEST_CASE("wav round trip and decode errors") {
  auto clip = sine(330.0, 0.2, 0.7, 8000);
  const auto bytes = encode_wav(clip);
  const auto back = decode_audio(bytes);
  CHECK(back.sample_rate == 8000);
  REQUIRE(back.samples.size() == clip.samples.size());
  for (std::size_t i = 0; i < clip.samples.size(); ++i) CHECK(std::abs(back.samples[i] - clip.samples[i]) < 1.0 / 16384);

  auto stereo = bytes;
  stereo[22] = 2;  // channel count
  CHECK_THROWS_WITH_AS(decode_audio(stereo), doctest::Contains("mono required"), DecodeError);

  auto slow = bytes;
  const std::uint32_t rate = 4000;
  for (int i = 0; i < 4; ++i) slow[24 + i] = static_cast<std::uint8_t>(rate >> (8 * i));
  CHECK_THROWS_AS(decode_audio(slow), DecodeError);

  std::vector<std::uint8_t> junk(bytes.begin(), bytes.begin() + 20);
  CHECK_THROWS_AS(decode_audio(junk), DecodeError);
  CHECK_THROWS_AS(load_wav("/nonexistent/clip.wav"), trustnav::InputError);
}

TEST_CASE("thresholds are validated") {
  VocalThresholds cfg;
  cfg.hop_ms = 0;
  CHECK_THROWS_AS(cfg.validate(), trustnav::InputError);
  cfg = {};
  cfg.pitch_low_hz = 500;  // band inverted
  CHECK_THROWS_AS(cfg.validate(), trustnav::InputError);
}
