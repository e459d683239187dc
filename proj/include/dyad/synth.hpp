#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "dyad/corpus.hpp"
#include "dyad/rng.hpp"
#include "dyad/wav.hpp"

namespace dyad {

// Deterministic two-speaker corpus. Each session alternates "child" and
// "adult" utterances separated by silence. The speakers are harmonic
// stacks with disjoint per-session fundamental ranges (child 250-400 Hz,
// adult 85-180 Hz), per-session harmonic weights (timbre), per-utterance
// amplitude modulation and additive white noise at 20 dB SNR.
struct SynthParams {
  int n_harmonics = 6;
  double f0_child_lo = 250.0, f0_child_hi = 400.0;
  double f0_adult_lo = 85.0, f0_adult_hi = 180.0;
  double child_fraction_lo = 0.30, child_fraction_hi = 0.60;
  double utt_pair_lo = 1.2, utt_pair_hi = 3.5;   // child+adult seconds per turn pair
  double utt_min = 0.30, utt_max = 4.0;
  double gap_lo = 0.25, gap_hi = 0.90;
  double snr_db = 20.0;
  int age_lo = 43, age_hi = 158;
  double p_male = 244.0 / (244.0 + 84.0);
};

namespace detail {

inline void render_utterance(std::vector<double>& audio, const Utterance& u,
                             double f0, const std::vector<double>& harmonics,
                             int sample_rate, const SynthParams& p, Rng& rng) {
  const auto n0 = size_t(samples_for(u.start, sample_rate));
  const auto n1 = size_t(samples_for(u.end, sample_rate));
  const double level = rng.uniform(0.35, 0.80);
  const double am_depth = rng.uniform(0.30, 0.85);
  const double am_rate = rng.uniform(2.0, 8.0);
  const double am_phase = rng.uniform(0.0, 2.0 * M_PI);
  std::vector<double> phases(harmonics.size());
  for (auto& ph : phases) ph = rng.uniform(0.0, 2.0 * M_PI);

  std::vector<double> tone(n1 - n0);
  double peak = 0.0;
  for (size_t i = 0; i < tone.size(); ++i) {
    const double t = double(i) / sample_rate;
    double x = 0.0;
    for (size_t h = 0; h < harmonics.size(); ++h)
      x += harmonics[h] * std::sin(2.0 * M_PI * f0 * double(h + 1) * t + phases[h]);
    tone[i] = x;
    peak = std::max(peak, std::abs(x));
  }
  if (peak <= 0.0) peak = 1.0;
  const double gain = level / peak;

  double sumsq = 0.0;
  for (size_t i = 0; i < tone.size(); ++i) {
    const double t = double(i) / sample_rate;
    const double am = 1.0 - am_depth * (0.5 + 0.5 * std::sin(2.0 * M_PI * am_rate * t + am_phase));
    tone[i] *= gain * am;
    sumsq += tone[i] * tone[i];
  }
  const double rms = std::sqrt(sumsq / std::max<size_t>(1, tone.size()));
  const double noise_sd = rms * std::pow(10.0, -p.snr_db / 20.0);
  for (size_t i = 0; i < tone.size(); ++i)
    audio[n0 + i] = std::clamp(tone[i] + noise_sd * rng.normal(), -1.0, 1.0);
}

}  // namespace detail

inline std::vector<SessionManifest> synth_corpus(const std::string& out_dir, int n_sessions,
                                                 double session_duration, std::uint64_t seed,
                                                 const SynthParams& params = {}) {
  if (n_sessions < 1)
    throw ValidationError("synth: n_sessions must be >= 1");
  if (session_duration < 10.0)
    throw ValidationError("synth: session_duration must be >= 10 s");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (!std::filesystem::is_directory(out_dir))
    throw IoError("synth: cannot create output directory " + out_dir);

  Rng root(seed);
  std::vector<SessionManifest> sessions;
  for (int si = 0; si < n_sessions; ++si) {
    Rng rng = root.fork(std::uint64_t(si) + 1);
    char name[32];
    std::snprintf(name, sizeof name, "s%04d", si + 1);

    SessionManifest m;
    m.session_id = name;
    m.audio_path = (std::filesystem::path(out_dir) / (std::string(name) + ".wav")).string();
    m.sample_rate = kSampleRate;
    m.duration = session_duration;
    m.demographics.age_months = rng.int_range(params.age_lo, params.age_hi);
    m.demographics.gender = rng.bernoulli(params.p_male) ? Gender::male : Gender::female;

    const double f0_child = rng.uniform(params.f0_child_lo, params.f0_child_hi);
    const double f0_adult = rng.uniform(params.f0_adult_lo, params.f0_adult_hi);
    auto draw_timbre = [&] {
      std::vector<double> w(size_t(params.n_harmonics));
      for (size_t h = 0; h < w.size(); ++h)
        w[h] = rng.uniform(0.2, 1.0) / std::sqrt(double(h + 1));
      return w;
    };
    const auto timbre_child = draw_timbre();
    const auto timbre_adult = draw_timbre();

    // child-speaking fraction = child utterance time / total utterance time
    const double fraction = rng.uniform(params.child_fraction_lo, params.child_fraction_hi);
    double t = rng.uniform(0.2, 0.8);
    bool child_turn = rng.bernoulli(0.5);
    while (true) {
      const double pair_len = rng.uniform(params.utt_pair_lo, params.utt_pair_hi);
      const double jitter = rng.uniform(0.85, 1.20);
      const double share = child_turn ? fraction : (1.0 - fraction);
      const double dur = std::clamp(pair_len * share * jitter, params.utt_min, params.utt_max);
      if (t + dur > session_duration - 0.2) break;
      m.utterances.push_back({t, t + dur, child_turn ? Speaker::child : Speaker::adult});
      t += dur + rng.uniform(params.gap_lo, params.gap_hi);
      child_turn = !child_turn;
    }

    std::vector<double> audio(size_t(samples_for(session_duration, kSampleRate)), 0.0);
    for (const auto& u : m.utterances)
      detail::render_utterance(audio, u,
                               u.speaker == Speaker::child ? f0_child : f0_adult,
                               u.speaker == Speaker::child ? timbre_child : timbre_adult,
                               kSampleRate, params, rng);
    write_wav(m.audio_path, audio, kSampleRate);
    sessions.push_back(std::move(m));
  }
  save_manifest((std::filesystem::path(out_dir) / "manifest.json").string(), sessions);
  return sessions;
}

}  // namespace dyad
