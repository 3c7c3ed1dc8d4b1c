#include "melodikit/midi.hpp"

#include <array>
#include <map>
#include <string>

#include "melodikit/errors.hpp"

namespace melodikit {

namespace {

class ByteReader {
public:
  ByteReader(std::span<const std::uint8_t> bytes, std::size_t pos, std::size_t end)
      : bytes_(bytes), pos_(pos), end_(end) {}

  bool done() const { return pos_ >= end_; }
  std::size_t pos() const { return pos_; }

  std::uint8_t u8() {
    if (pos_ >= end_) throw ParseError("unexpected end of MIDI data");
    return bytes_[pos_++];
  }

  std::uint8_t peek() const {
    if (pos_ >= end_) throw ParseError("unexpected end of MIDI data");
    return bytes_[pos_];
  }

  std::uint32_t u16() {
    std::uint32_t hi = u8();
    return (hi << 8) | u8();
  }

  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | u8();
    return v;
  }

  // Variable-length quantity, up to 4 bytes.
  std::uint32_t varint() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7f);
      if (!(b & 0x80)) return v;
    }
    throw ParseError("variable-length quantity longer than 4 bytes");
  }

  void skip(std::size_t n) {
    if (end_ - pos_ < n) throw ParseError("unexpected end of MIDI data");
    pos_ += n;
  }

private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_;
  std::size_t end_;
};

struct TrackNotes {
  std::vector<NoteEvent> notes;
};

// Note events of one MTrk chunk. Running status is honored; note-on with
// velocity zero closes the note like a note-off.
TrackNotes parse_track(ByteReader r) {
  TrackNotes out;
  std::map<int, std::int64_t> open; // pitch -> onset
  std::int64_t now = 0;
  std::uint8_t status = 0;

  auto close_note = [&](int pitch, std::int64_t at) {
    auto it = open.find(pitch);
    if (it == open.end()) return; // stray note-off
    std::int64_t dur = at - it->second;
    if (dur > 0) out.notes.push_back(NoteEvent{pitch, it->second, dur});
    open.erase(it);
  };

  while (!r.done()) {
    now += r.varint();
    std::uint8_t b = r.peek();
    if (b & 0x80) {
      status = r.u8();
    } else if (status == 0) {
      throw ParseError("MIDI data byte with no running status");
    }

    if (status == 0xff) { // meta event
      std::uint8_t type = r.u8();
      std::uint32_t len = r.varint();
      r.skip(len);
      if (type == 0x2f) break; // end of track
      continue;
    }
    if (status == 0xf0 || status == 0xf7) { // sysex
      std::uint32_t len = r.varint();
      r.skip(len);
      continue;
    }

    const std::uint8_t kind = status & 0xf0;
    switch (kind) {
      case 0x80: { // note off
        int pitch = r.u8() & 0x7f;
        r.u8(); // velocity
        close_note(pitch, now);
        break;
      }
      case 0x90: { // note on
        int pitch = r.u8() & 0x7f;
        int vel = r.u8() & 0x7f;
        if (vel == 0) {
          close_note(pitch, now);
        } else {
          if (open.count(pitch)) close_note(pitch, now); // retrigger
          open[pitch] = now;
        }
        break;
      }
      case 0xa0:
      case 0xb0:
      case 0xe0:
        r.skip(2);
        break;
      case 0xc0:
      case 0xd0:
        r.skip(1);
        break;
      default:
        throw ParseError("unknown MIDI status byte " + std::to_string(status));
    }
  }
  // Close anything left hanging at the last event time.
  for (auto &[pitch, onset] : std::map<int, std::int64_t>(open)) close_note(pitch, now);
  return out;
}

} // namespace

ParsedMidi parse_midi(std::span<const std::uint8_t> bytes) {
  ByteReader header(bytes, 0, bytes.size());
  std::array<std::uint8_t, 4> magic{};
  for (auto &m : magic) m = header.u8();
  if (!(magic[0] == 'M' && magic[1] == 'T' && magic[2] == 'h' && magic[3] == 'd')) {
    throw ParseError("not a Standard MIDI File (missing MThd)");
  }
  std::uint32_t hlen = header.u32();
  if (hlen < 6) throw ParseError("MThd chunk too short");
  std::uint32_t format = header.u16();
  std::uint32_t ntrks = header.u16();
  std::uint32_t division = header.u16();
  header.skip(hlen - 6);
  if (format > 1) throw ParseError("unsupported MIDI format " + std::to_string(format));
  if (division & 0x8000) throw ParseError("SMPTE time division not supported");
  if (division == 0) throw ParseError("zero ticks-per-quarter division");

  std::vector<TrackNotes> tracks;
  std::size_t pos = header.pos();
  for (std::uint32_t i = 0; i < ntrks && pos < bytes.size(); ++i) {
    ByteReader chunk(bytes, pos, bytes.size());
    std::array<std::uint8_t, 4> tag{};
    for (auto &t : tag) t = chunk.u8();
    std::uint32_t len = chunk.u32();
    std::size_t body = chunk.pos();
    if (body + len > bytes.size()) throw ParseError("track chunk extends past end of file");
    if (tag[0] == 'M' && tag[1] == 'T' && tag[2] == 'r' && tag[3] == 'k') {
      tracks.push_back(parse_track(ByteReader(bytes, body, body + len)));
    }
    pos = body + len;
  }

  const TrackNotes *best = nullptr;
  for (const auto &t : tracks) {
    if (!best || t.notes.size() > best->notes.size()) best = &t;
  }
  if (!best || best->notes.empty()) throw ValidationError("empty melody: MIDI file has no notes");

  ParsedMidi out;
  out.ticks_per_quarter = static_cast<int>(division);
  out.events = enforce_monophony(best->notes);
  if (out.events.empty()) throw ValidationError("empty melody: all notes degenerate");
  return out;
}

} // namespace melodikit
