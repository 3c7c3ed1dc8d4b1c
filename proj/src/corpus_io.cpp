#include "melodikit/corpus_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "melodikit/errors.hpp"
#include "melodikit/melody.hpp"
#include "melodikit/midi.hpp"
#include "melodikit/text_format.hpp"

namespace melodikit {

namespace {

using nlohmann::json;

std::vector<std::uint8_t> read_bytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in),
                                   std::istreambuf_iterator<char>());
}

json load_json(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception &e) {
    throw ParseError(path + ": invalid JSON: " + e.what());
  }
  return j;
}

void write_json(const json &j, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

} // namespace

SymbolSequence load_melody_file(const CorpusInput &input) {
  std::vector<std::uint8_t> bytes = read_bytes(input.path);
  std::string id = std::filesystem::path(input.path).stem().string();

  const bool is_midi = bytes.size() >= 4 && bytes[0] == 'M' && bytes[1] == 'T' &&
                       bytes[2] == 'h' && bytes[3] == 'd';
  if (is_midi) {
    ParsedMidi midi = parse_midi(bytes);
    double tpe = input.ticks_per_eighth.value_or(midi.ticks_per_quarter / 2.0);
    return quantize(midi.events, tpe, id);
  }
  std::string text(bytes.begin(), bytes.end());
  auto events = parse_text(text);
  if (events.empty()) throw ValidationError("empty melody: no note events");
  return quantize(events, input.ticks_per_eighth.value_or(1.0), id);
}

Corpus load_corpus(std::vector<CorpusInput> inputs) {
  std::sort(inputs.begin(), inputs.end(),
            [](const CorpusInput &a, const CorpusInput &b) { return a.path < b.path; });
  Corpus corpus;
  std::string failures;
  for (const auto &input : inputs) {
    try {
      corpus.sequences.push_back(load_melody_file(input));
    } catch (const std::exception &e) {
      failures += "  " + input.path + ": " + e.what() + "\n";
    }
  }
  if (!failures.empty()) {
    throw ValidationError("failed to load " + std::to_string(std::count(failures.begin(), failures.end(), '\n')) +
                          " file(s):\n" + failures);
  }
  return corpus;
}

std::vector<CorpusInput> read_manifest(const std::string &manifest_path) {
  json j = load_json(manifest_path);
  if (!j.is_array()) throw ParseError(manifest_path + ": manifest must be a JSON array");
  auto base = std::filesystem::path(manifest_path).parent_path();

  std::vector<CorpusInput> inputs;
  for (const auto &entry : j) {
    CorpusInput input;
    if (entry.is_string()) {
      input.path = entry.get<std::string>();
    } else if (entry.is_object()) {
      if (!entry.contains("path")) throw ParseError(manifest_path + ": manifest entry missing 'path'");
      input.path = entry.at("path").get<std::string>();
      if (entry.contains("ticks_per_eighth")) {
        input.ticks_per_eighth = entry.at("ticks_per_eighth").get<double>();
      }
    } else {
      throw ParseError(manifest_path + ": manifest entries must be strings or objects");
    }
    if (std::filesystem::path(input.path).is_relative()) {
      input.path = (base / input.path).string();
    }
    inputs.push_back(std::move(input));
  }
  return inputs;
}

IngestStats corpus_stats(const Corpus &corpus) {
  IngestStats stats;
  stats.tunes = corpus.sequences.size();
  stats.symbol_histogram.assign(corpus.alphabet_size, 0);
  for (const auto &seq : corpus.sequences) {
    stats.total_steps += seq.size();
    for (Symbol s : seq.steps) {
      if (s < stats.symbol_histogram.size()) ++stats.symbol_histogram[s];
    }
  }
  return stats;
}

void save_corpus(const Corpus &corpus, const std::string &path) {
  json seqs = json::array();
  for (const auto &seq : corpus.sequences) {
    json steps = json::array();
    for (Symbol s : seq.steps) steps.push_back(static_cast<int>(s));
    seqs.push_back({{"id", seq.id}, {"steps", std::move(steps)}});
  }
  json j = {{"schema", 1}, {"kind", "corpus"}, {"alphabet", corpus.alphabet_size},
            {"sequences", std::move(seqs)}};
  write_json(j, path);
}

Corpus load_corpus_file(const std::string &path) {
  json j = load_json(path);
  if (!j.is_object() || j.value("kind", "") != "corpus") {
    throw ParseError(path + ": not a corpus file");
  }
  if (j.value("schema", 0) != 1) throw ParseError(path + ": unsupported corpus schema");
  Corpus corpus;
  corpus.alphabet_size = j.at("alphabet").get<int>();
  if (corpus.alphabet_size < 1) throw ParseError(path + ": invalid alphabet size");
  for (const auto &entry : j.at("sequences")) {
    SymbolSequence seq;
    seq.id = entry.value("id", "");
    for (const auto &v : entry.at("steps")) {
      int s = v.get<int>();
      if (s < 0 || s >= corpus.alphabet_size) {
        throw ParseError(path + ": symbol index out of range in tune '" + seq.id + "'");
      }
      seq.steps.push_back(static_cast<Symbol>(s));
    }
    if (seq.empty()) throw ParseError(path + ": empty sequence '" + seq.id + "'");
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

} // namespace melodikit
