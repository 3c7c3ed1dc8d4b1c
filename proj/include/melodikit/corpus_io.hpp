#pragma once

#include <optional>
#include <string>
#include <vector>

#include "melodikit/symbols.hpp"

namespace melodikit {

struct CorpusInput {
  std::string path;
  // Grid resolution override in ticks. MIDI files default to
  // ticks_per_quarter / 2 from their header; text files default to 1.
  std::optional<double> ticks_per_eighth;
};

// Summary printed by the ingest command.
struct IngestStats {
  std::size_t tunes = 0;
  std::size_t total_steps = 0;
  std::vector<std::size_t> symbol_histogram; // alphabet-sized
};

// Parse and quantize one melody file. MIDI is detected by the MThd magic,
// anything else is read as the text format.
SymbolSequence load_melody_file(const CorpusInput &input);

// Load many files into a corpus, ordered by path. If any file fails, throws
// a ValidationError whose message lists every failing file.
Corpus load_corpus(std::vector<CorpusInput> inputs);

// Corpus manifest: a JSON array whose entries are either a path string or
// {"path": ..., "ticks_per_eighth": ...}. Relative paths resolve against the
// manifest's directory.
std::vector<CorpusInput> read_manifest(const std::string &manifest_path);

IngestStats corpus_stats(const Corpus &corpus);

// Canonical corpus file: JSON with schema version, alphabet size, and one
// symbol-index array per tune. Models and evaluation only ever touch this
// format; MIDI stays at the ingest boundary.
void save_corpus(const Corpus &corpus, const std::string &path);
Corpus load_corpus_file(const std::string &path);

} // namespace melodikit
