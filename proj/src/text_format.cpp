#include "melodikit/text_format.hpp"

#include <charconv>
#include <sstream>

#include "melodikit/errors.hpp"

namespace melodikit {

namespace {

long long parse_int(std::string_view field, int line_no, const char *what) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what +
                     " is not an integer: '" + std::string(field) + "'");
  }
  return v;
}

} // namespace

std::vector<NoteEvent> parse_text(const std::string &text) {
  std::vector<NoteEvent> events;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string pitch_s, onset_s, dur_s, extra;
    if (!(fields >> pitch_s)) continue; // blank or comment-only line
    if (!(fields >> onset_s >> dur_s)) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected 'pitch onset duration'");
    }
    if (fields >> extra) {
      throw ParseError("line " + std::to_string(line_no) + ": trailing field '" + extra + "'");
    }
    long long pitch = parse_int(pitch_s, line_no, "pitch");
    long long onset = parse_int(onset_s, line_no, "onset");
    long long dur = parse_int(dur_s, line_no, "duration");
    if (pitch < 0 || pitch > 127) {
      throw ParseError("line " + std::to_string(line_no) + ": pitch out of range 0..127");
    }
    if (onset < 0) {
      throw ParseError("line " + std::to_string(line_no) + ": negative onset");
    }
    if (dur <= 0) {
      throw ParseError("line " + std::to_string(line_no) + ": duration must be positive");
    }
    events.push_back(NoteEvent{static_cast<int>(pitch), onset, dur});
  }
  return enforce_monophony(std::move(events));
}

std::string format_text(const std::vector<NoteEvent> &events) {
  std::string out = "# pitch onset duration (eighth-note units)\n";
  for (const auto &e : events) {
    out += std::to_string(e.pitch) + " " + std::to_string(e.onset) + " " +
           std::to_string(e.duration) + "\n";
  }
  return out;
}

} // namespace melodikit
