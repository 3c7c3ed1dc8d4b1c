#include "support/reel_gen.hpp"

#include <algorithm>
#include <array>

#include "melodikit/rng.hpp"

namespace melodikit::testing {

namespace {

// G major scale across C4..B5.
constexpr std::array<int, 14> kScale = {60, 62, 64, 66, 67, 69, 71, 72, 74, 76, 78, 79, 81, 83};
constexpr int kGradeLow = 0; // C4
constexpr int kGradeG4 = 4;  // G4 = 67
constexpr int kMotifLen = 4; // half a bar

// Half-bar motifs as scale-degree offsets from a base degree.
constexpr std::array<std::array<int, kMotifLen>, 8> kMotifs = {{
    {0, 1, 2, 3},   // run up
    {3, 2, 1, 0},   // run down
    {0, 2, 4, 2},   // arpeggio
    {4, 2, 0, 2},   // arpeggio down
    {0, 0, 4, 4},   // repeated notes
    {0, 2, 1, 3},   // zigzag
    {5, 4, 2, 0},   // descent
    {0, 4, 0, 4},   // octave-ish leaps
}};

// Genre-level motif transitions: strongly favour the next motif in the
// cycle, with self-repeats and a jump; this is what gives the corpus its
// shared n-gram statistics.
int next_motif(int current, Rng &rng) {
  const double u = rng.u01();
  if (u < 0.45) return (current + 1) % 8;
  if (u < 0.65) return current;
  if (u < 0.85) return (current + 3) % 8;
  return static_cast<int>(rng.uniform_int(8));
}

int clamp_base(int base) {
  return std::clamp(base, 0, static_cast<int>(kScale.size()) - 1 - 5);
}

struct MotifSlot {
  int motif = 0;
  int base = kGradeG4;
  int rhythm = 0; // 0: four eighths; 1: e,e,quarter; 2: quarter,e,e
};

std::vector<MotifSlot> make_phrase(int slots, int &motif, int &base, Rng &rng) {
  std::vector<MotifSlot> phrase;
  for (int s = 0; s < slots; ++s) {
    MotifSlot slot;
    slot.motif = motif;
    slot.base = base;
    const double u = rng.u01();
    slot.rhythm = u < 0.6 ? 0 : (u < 0.8 ? 1 : 2);
    phrase.push_back(slot);
    motif = next_motif(motif, rng);
    const int steps[5] = {-2, -1, 0, 1, 2};
    base = clamp_base(base + steps[rng.uniform_int(5)]);
  }
  return phrase;
}

void vary_phrase(std::vector<MotifSlot> &phrase, Rng &rng) {
  for (auto &slot : phrase) {
    if (rng.u01() < 0.3) {
      slot.base = clamp_base(slot.base + (rng.u01() < 0.5 ? -1 : 1));
    }
    if (rng.u01() < 0.2) {
      slot.rhythm = static_cast<int>(rng.uniform_int(3));
    }
  }
}

void emit_slot(const MotifSlot &slot, std::vector<NoteEvent> &notes, std::int64_t &clock) {
  const auto &degrees = kMotifs[slot.motif];
  auto pitch_at = [&](int d) {
    const int grade = std::clamp(slot.base + degrees[d], kGradeLow,
                                 static_cast<int>(kScale.size()) - 1);
    return kScale[grade];
  };
  switch (slot.rhythm) {
    case 1: // eighth, eighth, quarter
      notes.push_back({pitch_at(0), clock, 1});
      notes.push_back({pitch_at(1), clock + 1, 1});
      notes.push_back({pitch_at(2), clock + 2, 2});
      break;
    case 2: // quarter, eighth, eighth
      notes.push_back({pitch_at(0), clock, 2});
      notes.push_back({pitch_at(2), clock + 2, 1});
      notes.push_back({pitch_at(3), clock + 3, 1});
      break;
    default:
      for (int d = 0; d < kMotifLen; ++d) notes.push_back({pitch_at(d), clock + d, 1});
      break;
  }
  clock += kMotifLen;
}

} // namespace

std::vector<NoteEvent> generate_reel_events(std::uint64_t seed) {
  Rng rng(seed);
  int motif = static_cast<int>(rng.uniform_int(8));
  int base = clamp_base(kGradeG4 + static_cast<int>(rng.uniform_int(5)) - 2);

  // AA'BB': two 2-bar phrases, each repeated with variation.
  auto a = make_phrase(4, motif, base, rng);
  auto b = make_phrase(4, motif, base, rng);
  auto a2 = a;
  vary_phrase(a2, rng);
  auto b2 = b;
  vary_phrase(b2, rng);

  std::vector<NoteEvent> notes;
  std::int64_t clock = 0;
  for (const auto *phrase : {&a, &a2, &b, &b2}) {
    for (const auto &slot : *phrase) emit_slot(slot, notes, clock);
  }
  // Reels cadence home: end on a held G.
  NoteEvent &last = notes.back();
  last.pitch = last.pitch >= 72 ? 79 : 67;
  last.duration = 2;
  return notes;
}

Corpus generate_reel_corpus(int n_tunes, std::uint64_t seed) {
  Rng root(seed);
  Corpus corpus;
  for (int i = 0; i < n_tunes; ++i) {
    auto events = generate_reel_events(root.substream(i).bits());
    SymbolSequence seq = quantize(events, 1.0, "reel_" + std::to_string(i));
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

} // namespace melodikit::testing
