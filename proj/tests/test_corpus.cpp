#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "melodikit/corpus_io.hpp"
#include "melodikit/errors.hpp"
#include "melodikit/melody.hpp"
#include "melodikit/midi.hpp"
#include "melodikit/rng.hpp"
#include "melodikit/text_format.hpp"
#include "support/midi_builder.hpp"

using namespace melodikit;
namespace fs = std::filesystem;

namespace {

// Random sequence shaped like a quantizer output: leading silence allowed,
// then note/gap runs, always ending on a sounding step.
SymbolSequence random_valid_sequence(Rng &rng) {
  SymbolSequence seq;
  const int runs = 1 + static_cast<int>(rng.uniform_int(8));
  if (rng.u01() < 0.3) {
    const int gap = 1 + static_cast<int>(rng.uniform_int(3));
    for (int i = 0; i < gap; ++i) seq.steps.push_back(kSilence);
  }
  for (int r = 0; r < runs; ++r) {
    seq.steps.push_back(static_cast<Symbol>(rng.uniform_int(kPitchClasses)));
    const int sustain = static_cast<int>(rng.uniform_int(4));
    for (int i = 0; i < sustain; ++i) seq.steps.push_back(kContinuation);
    if (r + 1 < runs && rng.u01() < 0.4) {
      const int gap = 1 + static_cast<int>(rng.uniform_int(3));
      for (int i = 0; i < gap; ++i) seq.steps.push_back(kSilence);
    }
  }
  return seq;
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("melodikit_test_" + std::to_string(Rng(::time(nullptr)).bits()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_file(const fs::path &p, const std::string &content) {
  std::ofstream out(p);
  out << content;
}

void write_file(const fs::path &p, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char *>(bytes.data()), bytes.size());
}

} // namespace

TEST_CASE("fold_pitch maps the two octaves directly and folds outside") {
  CHECK(fold_pitch(60) == 0);  // C4
  CHECK(fold_pitch(83) == 23); // B5
  CHECK(fold_pitch(48) == 0);  // C3 raised an octave
  CHECK(fold_pitch(96) == 12); // C7 lowered to C5
  CHECK_THROWS_AS(fold_pitch(200), ValidationError);

  Rng rng(7);
  for (int i = 0; i < 500; ++i) {
    const int pitch = static_cast<int>(rng.uniform_int(128));
    const int folded = fold_pitch(pitch);
    CHECK(folded >= 0);
    CHECK(folded < 24);
    CHECK((symbol_to_pitch(static_cast<Symbol>(folded)) - pitch) % 12 == 0);
  }
}

TEST_CASE("parse_text reads pitch/onset/duration lines") {
  auto events = parse_text("67 0 2");
  REQUIRE(events.size() == 1);
  CHECK(events[0] == NoteEvent{67, 0, 2});

  events = parse_text("69 2 1\n67 0 2\n# trailing comment\n");
  REQUIRE(events.size() == 2);
  CHECK(events[0].pitch == 67); // sorted by onset
  CHECK(events[1].pitch == 69);

  CHECK_THROWS_AS(parse_text("67 0 0"), ParseError);
  CHECK_THROWS_WITH_AS(parse_text("67 zero 1"), doctest::Contains("line 1"), ParseError);
  CHECK_THROWS_AS(parse_text("67 0"), ParseError);
  CHECK(parse_text("# only comments\n\n").empty());
}

TEST_CASE("quantize follows the figure: quarter = pitch + continuation") {
  // G4 quarter note spans two steps.
  auto seq = quantize({{67, 0, 2}}, 1.0);
  CHECK(seq.steps == std::vector<Symbol>{7, kContinuation});

  // G4 eighth note is a single symbol.
  seq = quantize({{67, 0, 1}}, 1.0);
  CHECK(seq.steps == std::vector<Symbol>{7});

  // A one-step gap becomes silence.
  seq = quantize({{67, 0, 1}, {69, 2, 1}}, 1.0);
  CHECK(seq.steps == std::vector<Symbol>{7, kSilence, 9});
}

TEST_CASE("quantize rounds to the grid with a one-step minimum") {
  // 480 ticks at 240 per eighth = 2 steps.
  auto seq = quantize({{60, 0, 480}}, 240.0);
  CHECK(seq.steps == std::vector<Symbol>{0, kContinuation});

  // Degenerate sliver still gets one step.
  seq = quantize({{60, 0, 10}}, 240.0);
  CHECK(seq.steps == std::vector<Symbol>{0});

  // Length equals the rounded last offset.
  seq = quantize({{60, 100, 480}}, 240.0); // onset ~0.42 -> 0, offset ~2.42 -> 2
  CHECK(seq.size() == 2);

  CHECK_THROWS_AS(quantize({}, 1.0), ValidationError);
}

TEST_CASE("decode inverts quantize and rejects bad continuations") {
  auto events = decode(SymbolSequence{"", {7, kContinuation}});
  REQUIRE(events.size() == 1);
  CHECK(events[0] == NoteEvent{67, 0, 2});

  CHECK(decode(SymbolSequence{"", {kSilence}}).empty());
  CHECK_THROWS_AS(decode(SymbolSequence{"", {kContinuation, 7}}), ParseError);
  CHECK_THROWS_AS(decode(SymbolSequence{"", {7, kSilence, kContinuation}}), ParseError);
}

TEST_CASE("decode then quantize is the identity on valid sequences") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    SymbolSequence seq = random_valid_sequence(rng);
    auto events = decode(seq);
    SymbolSequence back = quantize(events, 1.0);
    CHECK(back.steps == seq.steps);
  }
}

TEST_CASE("parse_midi reads a one-note file") {
  auto bytes = testing::build_midi({{67, 0, 480}}, 480);
  ParsedMidi midi = parse_midi(bytes);
  CHECK(midi.ticks_per_quarter == 480);
  REQUIRE(midi.events.size() == 1);
  CHECK(midi.events[0] == NoteEvent{67, 0, 480});
}

TEST_CASE("parse_midi truncates overlapping notes") {
  auto bytes = testing::build_midi({{60, 0, 480}, {64, 240, 480}}, 480);
  ParsedMidi midi = parse_midi(bytes);
  REQUIRE(midi.events.size() == 2);
  CHECK(midi.events[0].duration == 240); // first truncated at the second onset
  CHECK(midi.events[1].duration == 480);
}

TEST_CASE("parse_midi rejects malformed input") {
  std::vector<std::uint8_t> junk = {'R', 'I', 'F', 'F', 0, 0, 0, 0};
  CHECK_THROWS_AS(parse_midi(junk), ParseError);

  // A valid file with no notes is an empty-melody error.
  auto bytes = testing::build_midi({{60, 0, 10}}, 480);
  // Strip the note messages: rebuild with an empty track instead.
  std::vector<std::uint8_t> header(bytes.begin(), bytes.begin() + 14);
  std::vector<std::uint8_t> empty = header;
  empty.insert(empty.end(), {'M', 'T', 'r', 'k', 0, 0, 0, 4, 0x00, 0xff, 0x2f, 0x00});
  CHECK_THROWS_AS(parse_midi(empty), ValidationError);
}

TEST_CASE("load_corpus mixes text and MIDI and orders by path") {
  TempDir dir;
  write_file(dir.path / "b_tune.txt", "67 0 2\n69 2 1\n");
  write_file(dir.path / "a_tune.mid", testing::build_midi({{60, 0, 960}}, 480));

  Corpus corpus = load_corpus({{(dir.path / "b_tune.txt").string(), {}},
                               {(dir.path / "a_tune.mid").string(), {}}});
  REQUIRE(corpus.sequences.size() == 2);
  CHECK(corpus.sequences[0].id == "a_tune"); // sorted by path
  CHECK(corpus.sequences[0].steps == std::vector<Symbol>{0, kContinuation, kContinuation,
                                                         kContinuation});
  CHECK(corpus.sequences[1].steps == std::vector<Symbol>{7, kContinuation, 9});

  CHECK(load_corpus({}).sequences.empty());
}

TEST_CASE("load_corpus aggregates per-file failures") {
  TempDir dir;
  write_file(dir.path / "good.txt", "67 0 2\n");
  write_file(dir.path / "bad.txt", "67 oops 2\n");
  try {
    load_corpus({{(dir.path / "good.txt").string(), {}}, {(dir.path / "bad.txt").string(), {}}});
    FAIL("expected ValidationError");
  } catch (const ValidationError &e) {
    CHECK(std::string(e.what()).find("bad.txt") != std::string::npos);
  }
}

TEST_CASE("manifest entries override ticks-per-eighth") {
  TempDir dir;
  write_file(dir.path / "halved.txt", "67 0 4\n");
  write_file(dir.path / "manifest.json",
             R"([{"path": "halved.txt", "ticks_per_eighth": 2}])");
  auto inputs = read_manifest((dir.path / "manifest.json").string());
  REQUIRE(inputs.size() == 1);
  Corpus corpus = load_corpus(std::move(inputs));
  CHECK(corpus.sequences[0].steps == std::vector<Symbol>{7, kContinuation});
}

TEST_CASE("corpus file round trip") {
  TempDir dir;
  Corpus corpus;
  corpus.sequences.push_back(SymbolSequence{"x", {7, kContinuation, kSilence, 9}});
  corpus.sequences.push_back(SymbolSequence{"y", {0}});
  const std::string path = (dir.path / "corpus.json").string();
  save_corpus(corpus, path);
  Corpus loaded = load_corpus_file(path);
  REQUIRE(loaded.sequences.size() == 2);
  CHECK(loaded.alphabet_size == kAlphabetSize);
  CHECK(loaded.sequences[0].id == "x");
  CHECK(loaded.sequences[0].steps == corpus.sequences[0].steps);

  IngestStats stats = corpus_stats(loaded);
  CHECK(stats.tunes == 2);
  CHECK(stats.total_steps == 5);
  CHECK(stats.symbol_histogram[7] == 1);
  CHECK(stats.symbol_histogram[kContinuation] == 1);
}
