#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "dyad/common.hpp"

namespace dyad {

// RIFF WAV, 16-bit PCM, mono. Samples are exchanged as doubles in [-1, 1].

namespace wavdetail {

inline void put_u32(std::string& s, std::uint32_t v) {
  s.push_back(char(v & 0xff)); s.push_back(char((v >> 8) & 0xff));
  s.push_back(char((v >> 16) & 0xff)); s.push_back(char((v >> 24) & 0xff));
}
inline void put_u16(std::string& s, std::uint16_t v) {
  s.push_back(char(v & 0xff)); s.push_back(char((v >> 8) & 0xff));
}
inline std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}
inline std::uint16_t get_u16(const unsigned char* p) {
  return std::uint16_t(p[0] | p[1] << 8);
}

struct WavLayout {
  int sample_rate = 0;
  std::uint64_t n_frames = 0;
  std::uint64_t data_offset = 0;  // byte offset of PCM payload
};

inline WavLayout parse_header(std::ifstream& f, const std::string& path) {
  unsigned char hdr[12];
  if (!f.read(reinterpret_cast<char*>(hdr), 12))
    throw IoError("wav: cannot read header: " + path);
  if (std::memcmp(hdr, "RIFF", 4) != 0 || std::memcmp(hdr + 8, "WAVE", 4) != 0)
    throw FormatError("wav: not a RIFF/WAVE file: " + path);

  WavLayout out;
  int bits = 0, channels = 0;
  std::uint64_t pos = 12;
  bool have_fmt = false, have_data = false;
  while (!(have_fmt && have_data)) {
    unsigned char ch[8];
    f.seekg(std::streamoff(pos));
    if (!f.read(reinterpret_cast<char*>(ch), 8)) break;
    const std::uint32_t size = get_u32(ch + 4);
    if (std::memcmp(ch, "fmt ", 4) == 0) {
      unsigned char fmt[16];
      if (size < 16 || !f.read(reinterpret_cast<char*>(fmt), 16))
        throw FormatError("wav: bad fmt chunk: " + path);
      if (get_u16(fmt) != 1)
        throw FormatError("wav: not integer PCM: " + path);
      channels = get_u16(fmt + 2);
      out.sample_rate = int(get_u32(fmt + 4));
      bits = get_u16(fmt + 14);
      have_fmt = true;
    } else if (std::memcmp(ch, "data", 4) == 0) {
      out.data_offset = pos + 8;
      out.n_frames = size;  // fixed up below once fmt is known
      have_data = true;
    }
    pos += 8 + size + (size & 1);
  }
  if (!have_fmt || !have_data)
    throw FormatError("wav: missing fmt or data chunk: " + path);
  if (bits != 16 || channels != 1)
    throw FormatError("wav: expected 16-bit mono PCM: " + path);
  out.n_frames /= 2;
  return out;
}

}  // namespace wavdetail

inline void write_wav(const std::string& path, const std::vector<double>& samples,
                      int sample_rate) {
  using namespace wavdetail;
  const std::uint32_t data_bytes = std::uint32_t(samples.size() * 2);
  std::string buf;
  buf.reserve(44 + data_bytes);
  buf += "RIFF"; put_u32(buf, 36 + data_bytes); buf += "WAVE";
  buf += "fmt "; put_u32(buf, 16);
  put_u16(buf, 1); put_u16(buf, 1);                       // PCM, mono
  put_u32(buf, std::uint32_t(sample_rate));
  put_u32(buf, std::uint32_t(sample_rate * 2));           // byte rate
  put_u16(buf, 2); put_u16(buf, 16);                      // block align, bits
  buf += "data"; put_u32(buf, data_bytes);
  for (double x : samples) {
    long v = std::lround(std::clamp(x, -1.0, 1.0) * 32767.0);
    put_u16(buf, std::uint16_t(std::int16_t(v)));
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !f.write(buf.data(), std::streamsize(buf.size())))
    throw IoError("wav: cannot write: " + path);
}

struct WavInfo {
  int sample_rate;
  std::uint64_t n_frames;
};

inline WavInfo wav_info(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("wav: cannot open: " + path);
  const auto lay = wavdetail::parse_header(f, path);
  return {lay.sample_rate, lay.n_frames};
}

// Reads `count` frames starting at `offset`; throws if the file is shorter.
inline std::vector<double> read_wav_window(const std::string& path,
                                           std::uint64_t offset, std::uint64_t count) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("wav: cannot open: " + path);
  const auto lay = wavdetail::parse_header(f, path);
  if (offset + count > lay.n_frames)
    throw IoError("wav: window [" + std::to_string(offset) + ", +" +
                  std::to_string(count) + ") past end of " + path);
  std::vector<std::int16_t> raw(count);
  f.seekg(std::streamoff(lay.data_offset + offset * 2));
  if (!f.read(reinterpret_cast<char*>(raw.data()), std::streamsize(count * 2)))
    throw IoError("wav: short read: " + path);
  std::vector<double> out(count);
  for (std::uint64_t i = 0; i < count; ++i) out[i] = raw[i] / 32768.0;
  return out;
}

inline std::vector<double> read_wav(const std::string& path, int* sample_rate = nullptr) {
  const auto info = wav_info(path);
  if (sample_rate) *sample_rate = info.sample_rate;
  return read_wav_window(path, 0, info.n_frames);
}

}  // namespace dyad
