#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "melodikit/melody.hpp"

namespace melodikit {

struct ParsedMidi {
  std::vector<NoteEvent> events; // monophonic, sorted by onset
  int ticks_per_quarter = 480;
};

// Minimal Standard MIDI File reader, format 0 or 1. The track with the most
// note events is taken as the melody; overlapping notes are truncated at the
// next onset. Tempo and other meta events are ignored. Throws ParseError on
// malformed input and ValidationError when the file contains no notes.
ParsedMidi parse_midi(std::span<const std::uint8_t> bytes);

} // namespace melodikit
