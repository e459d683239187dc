#pragma once

#include <string>
#include <vector>

#include "dyad/corpus.hpp"
#include "dyad/rng.hpp"

namespace dyad {

// Positive shift window: "half a second or less", with a floor so the
// positive is never the anchor itself.
constexpr double kMinShiftSec = 0.1;
constexpr double kMaxShiftSec = 0.5;
constexpr double kDefaultSegmentSec = 2.0;

// Session with audio held in memory; the unit the samplers operate on.
struct LoadedSession {
  SessionManifest manifest;
  std::vector<double> audio;
};

inline LoadedSession load_audio(const SessionManifest& m) {
  LoadedSession s;
  s.manifest = m;
  int rate = 0;
  s.audio = read_wav(m.audio_path, &rate);
  if (rate != m.sample_rate)
    throw ValidationError("session " + m.session_id + ": wav rate " + std::to_string(rate) +
                          " != manifest rate " + std::to_string(m.sample_rate));
  return s;
}

inline std::vector<LoadedSession> load_audio(const std::vector<SessionManifest>& ms) {
  std::vector<LoadedSession> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(load_audio(m));
  return out;
}

struct SegmentPair {
  AudioSegment anchor;
  AudioSegment positive;
  double shift = 0.0;  // signed seconds, positive start - anchor start
};

struct SegmentPairBatch {
  std::vector<SegmentPair> pairs;
  int size() const { return int(pairs.size()); }
};

// Draw order is fixed: shift magnitude, then sign. If the drawn sign
// pushes the positive window outside the session, the other sign is used.
inline SegmentPair sample_pair(const LoadedSession& session, double anchor_start,
                               double segment_duration, Rng& rng) {
  const double dur = session.manifest.duration;
  if (!(anchor_start >= 0.0) || !(anchor_start + segment_duration <= dur + 1e-9))
    throw RangeError("sample_pair: anchor window outside session " +
                     session.manifest.session_id);
  const bool left_ok = anchor_start - kMaxShiftSec >= -1e-9;
  const bool right_ok = anchor_start + segment_duration + kMaxShiftSec <= dur + 1e-9;
  if (!left_ok && !right_ok)
    throw RangeError("sample_pair: session " + session.manifest.session_id +
                     " too short for anchor at " + std::to_string(anchor_start) +
                     " plus max shift " + std::to_string(kMaxShiftSec) + " s");

  const double magnitude = rng.uniform(kMinShiftSec, kMaxShiftSec);
  double shift = rng.bernoulli(0.5) ? magnitude : -magnitude;
  double pos_start = anchor_start + shift;
  if (pos_start < 0.0 || pos_start + segment_duration > dur) {
    shift = -shift;
    pos_start = anchor_start + shift;
  }

  SegmentPair pair;
  pair.anchor = slice_segment(session.manifest, session.audio, anchor_start, segment_duration);
  pair.positive = slice_segment(session.manifest, session.audio, pos_start, segment_duration);
  pair.shift = shift;
  return pair;
}

// A session is feasible when any anchor start in [0, D - seg] leaves room
// for a max shift on at least one side.
inline bool pair_feasible(const SessionManifest& m, double segment_duration) {
  return m.duration >= segment_duration + 2.0 * kMaxShiftSec;
}

// B anchors drawn from sessions with probability proportional to session
// duration; anchor starts uniform over the valid range.
inline SegmentPairBatch build_batch(const std::vector<LoadedSession>& sessions, int batch_size,
                                    double segment_duration, Rng& rng) {
  if (batch_size < 1) throw ValidationError("build_batch: batch size must be >= 1");
  std::vector<const LoadedSession*> feasible;
  std::vector<double> cumulative;
  double total = 0.0;
  for (const auto& s : sessions) {
    if (pair_feasible(s.manifest, segment_duration)) {
      feasible.push_back(&s);
      total += s.manifest.duration;
      cumulative.push_back(total);
    }
  }
  if (feasible.empty())
    throw ValidationError("build_batch: no session long enough for " +
                          std::to_string(segment_duration) + " s segments plus max shift");

  SegmentPairBatch batch;
  batch.pairs.reserve(size_t(batch_size));
  for (int b = 0; b < batch_size; ++b) {
    const double r = rng.uniform(0.0, total);
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
    const size_t idx = std::min(size_t(it - cumulative.begin()), feasible.size() - 1);
    const LoadedSession& s = *feasible[idx];
    const double anchor_start = rng.uniform(0.0, s.manifest.duration - segment_duration);
    batch.pairs.push_back(sample_pair(s, anchor_start, segment_duration, rng));
  }
  return batch;
}

}  // namespace dyad
