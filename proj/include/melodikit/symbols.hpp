#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace melodikit {

// One time-step of the melody representation: 24 chromatic pitches spanning
// C4..B5, plus silence and continuation. Continuation marks that the previous
// pitch is still sounding at this step.
using Symbol = std::uint8_t;

inline constexpr int kPitchClasses = 24;
inline constexpr Symbol kSilence = 24;
inline constexpr Symbol kContinuation = 25;
inline constexpr int kAlphabetSize = 26;

inline constexpr int kLowestPitch = 60; // C4
inline constexpr int kHighestPitch = 83; // B5

inline bool is_pitch_symbol(Symbol s) { return s < kPitchClasses; }

// Symbol index -> MIDI pitch (valid for pitch symbols only).
inline int symbol_to_pitch(Symbol s) { return kLowestPitch + static_cast<int>(s); }

std::string symbol_name(Symbol s);

// A melody on the eighth-note grid, one symbol per step.
struct SymbolSequence {
  std::string id;
  std::vector<Symbol> steps;

  std::size_t size() const { return steps.size(); }
  bool empty() const { return steps.empty(); }
};

// True iff the sequence could have come out of quantize(): nonempty, no
// leading continuation, and continuation only after a pitch or another
// continuation. Model samples may violate this; quantized corpora never do.
bool is_decodable(const SymbolSequence &seq);

struct Corpus {
  std::vector<SymbolSequence> sequences;
  int alphabet_size = kAlphabetSize;

  std::size_t total_steps() const {
    std::size_t n = 0;
    for (const auto &s : sequences) n += s.size();
    return n;
  }
};

} // namespace melodikit
