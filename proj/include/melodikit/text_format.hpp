#pragma once

#include <string>
#include <vector>

#include "melodikit/melody.hpp"

namespace melodikit {

// Plain-text melody format: one "pitch onset duration" triple per line in
// eighth-note units, with '#' starting a comment. Exists so tests and small
// fixtures never need binary MIDI.
std::vector<NoteEvent> parse_text(const std::string &text);

// Render events (in eighth-note ticks) back to the text format.
std::string format_text(const std::vector<NoteEvent> &events);

} // namespace melodikit
