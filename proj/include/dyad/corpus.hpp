#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dyad/common.hpp"
#include "dyad/rng.hpp"
#include "dyad/wav.hpp"

namespace dyad {

constexpr int kSampleRate = 16000;
constexpr double kMinUtteranceSec = 0.05;

enum class Speaker { child, adult };

inline const char* to_string(Speaker s) { return s == Speaker::child ? "child" : "adult"; }

enum class Gender { male, female };

inline const char* to_string(Gender g) { return g == Gender::male ? "male" : "female"; }

struct Utterance {
  double start = 0.0;
  double end = 0.0;
  Speaker speaker = Speaker::child;
};

struct Demographics {
  std::optional<int> age_months;
  std::optional<Gender> gender;
};

struct SessionManifest {
  std::string session_id;
  std::string audio_path;  // resolved against the manifest's directory on load
  int sample_rate = kSampleRate;
  double duration = 0.0;
  std::vector<Utterance> utterances;
  Demographics demographics;
};

struct AudioSegment {
  std::vector<double> samples;
  int sample_rate = kSampleRate;
  std::string source_session;
  double start = 0.0;
};

struct SplitAssignment {
  std::vector<std::string> train, val, test;
};

namespace detail {

inline void validate_session(const SessionManifest& s) {
  if (s.session_id.empty())
    throw ValidationError("manifest: empty session_id");
  if (s.sample_rate != kSampleRate)
    throw UnsupportedRateError("session " + s.session_id + ": sample_rate " +
                               std::to_string(s.sample_rate) + " unsupported (expect 16000)");
  if (!(s.duration > 0.0) || !std::isfinite(s.duration))
    throw ValidationError("session " + s.session_id + ": invalid duration");
  for (size_t i = 0; i < s.utterances.size(); ++i) {
    const auto& u = s.utterances[i];
    if (!(u.start >= 0.0) || !(u.end <= s.duration) || !(u.start < u.end))
      throw ValidationError("session " + s.session_id + ": utterance " + std::to_string(i) +
                            ": requires 0 <= start < end <= duration");
    if (u.end - u.start < kMinUtteranceSec)
      throw ValidationError("session " + s.session_id + ": utterance " + std::to_string(i) +
                            ": shorter than " + std::to_string(kMinUtteranceSec) + " s");
  }
  if (s.demographics.age_months && *s.demographics.age_months <= 0)
    throw ValidationError("session " + s.session_id + ": age_months must be > 0");
}

inline Speaker parse_speaker(const std::string& v, const std::string& ctx) {
  if (v == "child") return Speaker::child;
  if (v == "adult") return Speaker::adult;
  throw FormatError(ctx + ": unknown speaker \"" + v + "\"");
}

}  // namespace detail

inline std::vector<SessionManifest> load_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("manifest: cannot open " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(f);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("manifest " + path + ": " + e.what());
  }
  const auto base = std::filesystem::path(path).parent_path();
  std::vector<SessionManifest> out;
  try {
    for (const auto& js : doc.at("sessions")) {
      SessionManifest s;
      s.session_id = js.at("session_id").get<std::string>();
      s.audio_path = js.at("audio_path").get<std::string>();
      if (std::filesystem::path(s.audio_path).is_relative())
        s.audio_path = (base / s.audio_path).string();
      s.sample_rate = js.at("sample_rate").get<int>();
      s.duration = js.at("duration").get<double>();
      if (js.contains("demographics") && !js["demographics"].is_null()) {
        const auto& d = js["demographics"];
        if (d.contains("age_months") && !d["age_months"].is_null())
          s.demographics.age_months = d["age_months"].get<int>();
        if (d.contains("gender") && !d["gender"].is_null()) {
          const auto g = d["gender"].get<std::string>();
          if (g != "male" && g != "female")
            throw FormatError("session " + s.session_id + ": unknown gender \"" + g + "\"");
          s.demographics.gender = (g == "male") ? Gender::male : Gender::female;
        }
      }
      for (const auto& ju : js.value("utterances", nlohmann::json::array())) {
        Utterance u;
        u.start = ju.at("start").get<double>();
        u.end = ju.at("end").get<double>();
        u.speaker = detail::parse_speaker(ju.at("speaker").get<std::string>(),
                                          "session " + s.session_id);
        s.utterances.push_back(u);
      }
      std::stable_sort(s.utterances.begin(), s.utterances.end(),
                       [](const Utterance& a, const Utterance& b) { return a.start < b.start; });
      detail::validate_session(s);
      out.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("manifest " + path + ": " + e.what());
  }
  std::sort(out.begin(), out.end(), [](const SessionManifest& a, const SessionManifest& b) {
    return a.session_id < b.session_id;
  });
  return out;
}

// Audio paths are written relative to the manifest's directory when possible.
inline void save_manifest(const std::string& path, const std::vector<SessionManifest>& sessions) {
  const auto base = std::filesystem::path(path).parent_path();
  nlohmann::ordered_json doc;
  doc["sessions"] = nlohmann::ordered_json::array();
  for (const auto& s : sessions) {
    nlohmann::ordered_json js;
    js["session_id"] = s.session_id;
    std::filesystem::path ap(s.audio_path);
    js["audio_path"] = (!base.empty() && ap.parent_path() == base)
                           ? ap.filename().string() : s.audio_path;
    js["sample_rate"] = s.sample_rate;
    js["duration"] = s.duration;
    js["demographics"]["age_months"] =
        s.demographics.age_months ? nlohmann::ordered_json(*s.demographics.age_months)
                                  : nlohmann::ordered_json(nullptr);
    js["demographics"]["gender"] =
        s.demographics.gender ? nlohmann::ordered_json(to_string(*s.demographics.gender))
                              : nlohmann::ordered_json(nullptr);
    js["utterances"] = nlohmann::ordered_json::array();
    for (const auto& u : s.utterances)
      js["utterances"].push_back({{"start", u.start}, {"end", u.end},
                                  {"speaker", to_string(u.speaker)}});
    doc["sessions"].push_back(std::move(js));
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("manifest: cannot write " + path);
  f << doc.dump(2) << "\n";
}

inline std::int64_t samples_for(double seconds, int rate) {
  return std::llround(seconds * rate);
}

inline AudioSegment slice_segment(const SessionManifest& session, double start, double duration) {
  if (!(start >= 0.0) || !(start + duration <= session.duration + 1e-9))
    throw RangeError("slice: window [" + std::to_string(start) + ", +" +
                     std::to_string(duration) + ") outside session " + session.session_id +
                     " of " + std::to_string(session.duration) + " s");
  const auto offset = samples_for(start, session.sample_rate);
  const auto count = samples_for(duration, session.sample_rate);
  AudioSegment seg;
  seg.samples = read_wav_window(session.audio_path, std::uint64_t(offset), std::uint64_t(count));
  seg.sample_rate = session.sample_rate;
  seg.source_session = session.session_id;
  seg.start = start;
  return seg;
}

// In-memory variant used by the training loops; same arithmetic as the
// file-based slice.
inline AudioSegment slice_segment(const SessionManifest& session,
                                  const std::vector<double>& audio,
                                  double start, double duration) {
  if (!(start >= 0.0) || !(start + duration <= session.duration + 1e-9))
    throw RangeError("slice: window [" + std::to_string(start) + ", +" +
                     std::to_string(duration) + ") outside session " + session.session_id);
  const auto offset = std::uint64_t(samples_for(start, session.sample_rate));
  const auto count = std::uint64_t(samples_for(duration, session.sample_rate));
  if (offset + count > audio.size())
    throw IoError("slice: audio of " + session.session_id + " shorter than manifest duration");
  AudioSegment seg;
  seg.samples.assign(audio.begin() + std::ptrdiff_t(offset),
                     audio.begin() + std::ptrdiff_t(offset + count));
  seg.sample_rate = session.sample_rate;
  seg.source_session = session.session_id;
  seg.start = start;
  return seg;
}

inline SplitAssignment split_sessions(const std::vector<SessionManifest>& manifests,
                                      std::array<double, 3> ratios, std::uint64_t seed) {
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
    throw ValidationError("split: ratios must sum to 1");
  const size_t n = manifests.size();
  if (n < 3) throw ValidationError("split: need at least 3 sessions, got " + std::to_string(n));

  std::vector<std::string> ids(n);
  for (size_t i = 0; i < n; ++i) ids[i] = manifests[i].session_id;
  Rng rng(seed);
  for (size_t i = n - 1; i > 0; --i)  // Fisher-Yates
    std::swap(ids[i], ids[rng.integer(i + 1)]);

  // floor/floor/remainder; epsilon guards against 0.70*N landing just
  // below an integer in floating point
  const size_t n_train = size_t(std::floor(ratios[0] * double(n) + 1e-9));
  const size_t n_val = size_t(std::floor(ratios[1] * double(n) + 1e-9));
  SplitAssignment out;
  out.train.assign(ids.begin(), ids.begin() + std::ptrdiff_t(n_train));
  out.val.assign(ids.begin() + std::ptrdiff_t(n_train), ids.begin() + std::ptrdiff_t(n_train + n_val));
  out.test.assign(ids.begin() + std::ptrdiff_t(n_train + n_val), ids.end());
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.val.begin(), out.val.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

inline bool split_contains(const std::vector<std::string>& ids, const std::string& id) {
  return std::binary_search(ids.begin(), ids.end(), id);
}

}  // namespace dyad
