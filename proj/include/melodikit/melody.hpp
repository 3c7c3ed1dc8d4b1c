#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "melodikit/symbols.hpp"

namespace melodikit {

// One note of a melody, in integer ticks of some time base.
struct NoteEvent {
  int pitch = 0;        // MIDI note number, 0..127
  std::int64_t onset = 0;    // ticks, >= 0
  std::int64_t duration = 0; // ticks, > 0

  friend bool operator==(const NoteEvent &, const NoteEvent &) = default;
};

// Fold a MIDI pitch into the two-octave range C4..B5 by whole-octave
// transposition; returns the symbol index 0..23. Pitch class is preserved.
int fold_pitch(int midi_pitch);

// Make an event list monophonic: sort by onset and truncate any note at the
// next note's onset. Notes squeezed to zero duration are dropped.
std::vector<NoteEvent> enforce_monophony(std::vector<NoteEvent> events);

// Snap a monophonic event list to the eighth-note grid. Each note covers
// [round(onset/tpe), round(offset/tpe)) steps (round half up, at least one
// step); the first covered step carries the folded pitch, the rest carry
// continuation, and uncovered steps carry silence.
SymbolSequence quantize(const std::vector<NoteEvent> &events, double ticks_per_eighth,
                        const std::string &id = "");

// Inverse of quantize on its image, in eighth-note ticks (ticks_per_eighth
// = 1). A pitch symbol opens a note, continuations extend it, silence closes
// it. Trailing silence produces no event, so round-trip identity holds for
// sequences that end on a sounding step. Throws ParseError on a leading
// continuation or a continuation after silence.
std::vector<NoteEvent> decode(const SymbolSequence &seq);

} // namespace melodikit
