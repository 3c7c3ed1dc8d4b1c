#include "melodikit/melody.hpp"

#include <algorithm>
#include <cmath>

#include "melodikit/errors.hpp"

namespace melodikit {

std::string symbol_name(Symbol s) {
  static const char *names[] = {"C", "C#", "D", "D#", "E", "F",
                                "F#", "G", "G#", "A", "A#", "B"};
  if (is_pitch_symbol(s)) {
    int octave = 4 + s / 12;
    return std::string(names[s % 12]) + std::to_string(octave);
  }
  if (s == kSilence) return "rest";
  if (s == kContinuation) return "cont";
  return "sym" + std::to_string(static_cast<int>(s));
}

bool is_decodable(const SymbolSequence &seq) {
  if (seq.empty()) return false;
  if (seq.steps.front() == kContinuation) return false;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq.steps[i] == kContinuation && seq.steps[i - 1] == kSilence) return false;
  }
  return true;
}

int fold_pitch(int midi_pitch) {
  if (midi_pitch < 0 || midi_pitch > 127) {
    throw ValidationError("pitch out of MIDI range: " + std::to_string(midi_pitch));
  }
  int p = midi_pitch;
  while (p < kLowestPitch) p += 12;
  while (p > kHighestPitch) p -= 12;
  return p - kLowestPitch;
}

std::vector<NoteEvent> enforce_monophony(std::vector<NoteEvent> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const NoteEvent &a, const NoteEvent &b) { return a.onset < b.onset; });
  std::vector<NoteEvent> out;
  out.reserve(events.size());
  for (const auto &e : events) {
    if (!out.empty()) {
      NoteEvent &prev = out.back();
      if (prev.onset + prev.duration > e.onset) {
        prev.duration = e.onset - prev.onset;
        if (prev.duration <= 0) out.pop_back();
      }
    }
    out.push_back(e);
  }
  return out;
}

SymbolSequence quantize(const std::vector<NoteEvent> &events, double ticks_per_eighth,
                        const std::string &id) {
  if (ticks_per_eighth <= 0) throw ValidationError("ticks_per_eighth must be positive");
  if (events.empty()) throw ValidationError("empty melody: no note events");

  auto to_step = [ticks_per_eighth](std::int64_t ticks) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(ticks) / ticks_per_eighth + 0.5));
  };

  SymbolSequence seq;
  seq.id = id;
  std::int64_t cursor = 0; // next free grid step
  for (const auto &e : events) {
    if (e.duration <= 0) throw ValidationError("note with nonpositive duration");
    std::int64_t on = to_step(e.onset);
    std::int64_t off = to_step(e.onset + e.duration);
    if (on < cursor) on = cursor; // sub-grid collision with the previous note
    if (off <= on) off = on + 1;  // degenerate notes round up to one step
    while (cursor < on) {
      seq.steps.push_back(kSilence);
      ++cursor;
    }
    seq.steps.push_back(static_cast<Symbol>(fold_pitch(e.pitch)));
    ++cursor;
    while (cursor < off) {
      seq.steps.push_back(kContinuation);
      ++cursor;
    }
  }
  return seq;
}

std::vector<NoteEvent> decode(const SymbolSequence &seq) {
  std::vector<NoteEvent> events;
  bool note_open = false;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    Symbol s = seq.steps[t];
    if (s == kContinuation) {
      if (!note_open) {
        throw ParseError("continuation symbol at step " + std::to_string(t) +
                         " does not follow a sounding note");
      }
      events.back().duration += 1;
    } else if (s == kSilence) {
      note_open = false;
    } else if (is_pitch_symbol(s)) {
      events.push_back(NoteEvent{symbol_to_pitch(s), static_cast<std::int64_t>(t), 1});
      note_open = true;
    } else {
      throw ParseError("invalid symbol index " + std::to_string(static_cast<int>(s)));
    }
  }
  return events;
}

} // namespace melodikit
