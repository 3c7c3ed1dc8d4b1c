#pragma once

// Minimal format-0 SMF writer for test fixtures only.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "melodikit/melody.hpp"

namespace melodikit::testing {

inline void push_u32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back(v & 0xff);
}

inline void push_u16(std::vector<std::uint8_t> &out, std::uint32_t v) {
  out.push_back((v >> 8) & 0xff);
  out.push_back(v & 0xff);
}

inline void push_varint(std::vector<std::uint8_t> &out, std::uint32_t v) {
  std::uint8_t stack[5];
  int n = 0;
  stack[n++] = v & 0x7f;
  while ((v >>= 7)) stack[n++] = (v & 0x7f) | 0x80;
  while (n) out.push_back(stack[--n]);
}

inline std::vector<std::uint8_t> build_midi(const std::vector<NoteEvent> &notes, int tpqn) {
  struct Msg {
    std::int64_t time;
    bool on;
    int pitch;
  };
  std::vector<Msg> msgs;
  for (const auto &n : notes) {
    msgs.push_back({n.onset, true, n.pitch});
    msgs.push_back({n.onset + n.duration, false, n.pitch});
  }
  std::stable_sort(msgs.begin(), msgs.end(), [](const Msg &a, const Msg &b) {
    if (a.time != b.time) return a.time < b.time;
    return a.on < b.on; // offs first at equal times
  });

  std::vector<std::uint8_t> track;
  std::int64_t prev = 0;
  for (const auto &m : msgs) {
    push_varint(track, static_cast<std::uint32_t>(m.time - prev));
    prev = m.time;
    track.push_back(m.on ? 0x90 : 0x80);
    track.push_back(static_cast<std::uint8_t>(m.pitch));
    track.push_back(m.on ? 0x60 : 0x00);
  }
  push_varint(track, 0);
  track.push_back(0xff);
  track.push_back(0x2f);
  track.push_back(0x00);

  std::vector<std::uint8_t> out = {'M', 'T', 'h', 'd'};
  push_u32(out, 6);
  push_u16(out, 0); // format 0
  push_u16(out, 1); // one track
  push_u16(out, static_cast<std::uint32_t>(tpqn));
  out.insert(out.end(), {'M', 'T', 'r', 'k'});
  push_u32(out, static_cast<std::uint32_t>(track.size()));
  out.insert(out.end(), track.begin(), track.end());
  return out;
}

} // namespace melodikit::testing
