// Standard MIDI File (format 0/1) reader. Only what melody extraction needs is
// decoded: note on/off, track names, time and key signatures.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {
namespace {

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes, std::size_t base = 0)
      : bytes_(bytes), base_(base) {}

  bool done() const { return pos_ >= bytes_.size(); }
  std::size_t offset() const { return base_ + pos_; }

  std::uint8_t u8() {
    if (pos_ >= bytes_.size()) throw ParseError("unexpected end of data", offset());
    return bytes_[pos_++];
  }
  std::uint8_t peek() const {
    if (pos_ >= bytes_.size()) throw ParseError("unexpected end of data", offset());
    return bytes_[pos_];
  }
  std::uint32_t be(int width) {
    std::uint32_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | u8();
    return v;
  }
  std::uint32_t varlen() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      std::uint8_t b = u8();
      v = (v << 7) | (b & 0x7F);
      if ((b & 0x80) == 0) return v;
    }
    throw ParseError("variable-length quantity longer than 4 bytes", offset());
  }
  std::span<const std::uint8_t> take(std::size_t n) {
    if (bytes_.size() - pos_ < n) throw ParseError("chunk exceeds available data", offset());
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

struct Track {
  std::string name;
  std::vector<RawNote> notes;
};

struct MidiFile {
  int ppq = 480;
  std::vector<Track> tracks;
  std::optional<Key> key;
};

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

Key key_from_signature(int sharps, bool minor) {
  int major_tonic = ((sharps * 7) % 12 + 12) % 12;
  if (!minor) return {major_tonic, Mode::kMajor};
  return {(major_tonic + 9) % 12, Mode::kMinor};
}

Track read_track(ByteReader& in, MidiFile& file) {
  Track track;
  std::int64_t now = 0;
  std::uint8_t running = 0;
  // Pending note-ons per (channel, pitch), stacked for re-triggers.
  std::map<std::pair<int, int>, std::vector<std::int64_t>> open;

  auto close_note = [&](int channel, int pitch) {
    auto it = open.find({channel, pitch});
    if (it == open.end() || it->second.empty()) return;
    track.notes.push_back({it->second.front(), now, pitch});
    it->second.erase(it->second.begin());
  };

  while (!in.done()) {
    now += in.varlen();
    std::uint8_t status = in.peek();
    if (status & 0x80) {
      in.u8();
    } else {
      if (running == 0) throw ParseError("data byte without running status", in.offset());
      status = running;
    }

    if (status == 0xFF) {
      std::uint8_t type = in.u8();
      std::uint32_t len = in.varlen();
      std::size_t meta_at = in.offset();
      auto data = in.take(len);
      if (type == 0x03 && track.name.empty()) {
        track.name.assign(data.begin(), data.end());
      } else if (type == 0x58) {
        if (len < 2) throw ParseError("short time signature event", meta_at);
        int numerator = data[0];
        int denominator = 1 << data[1];
        if (numerator != 4 || denominator != 4) {
          throw RejectionError("time signature " + std::to_string(numerator) + "/" +
                               std::to_string(denominator) + " rejected: only 4/4 is supported");
        }
      } else if (type == 0x59) {
        if (len < 2) throw ParseError("short key signature event", meta_at);
        if (!file.key) file.key = key_from_signature(static_cast<std::int8_t>(data[0]), data[1] != 0);
      } else if (type == 0x2F) {
        break;
      }
      continue;
    }
    if (status == 0xF0 || status == 0xF7) {
      in.take(in.varlen());
      continue;
    }
    if (status >= 0xF0) throw ParseError("unsupported system message in track", in.offset());

    running = status;
    int kind = status & 0xF0;
    int channel = status & 0x0F;
    if (kind == 0xC0 || kind == 0xD0) {
      in.u8();
      continue;
    }
    int a = in.u8();
    int b = in.u8();
    if (a > 127 || b > 127) throw ParseError("data byte out of range", in.offset() - 1);
    if (kind == 0x90 && b > 0) {
      // A re-strike of a sounding pitch ends the earlier note.
      close_note(channel, a);
      open[{channel, a}].push_back(now);
    } else if (kind == 0x80 || kind == 0x90) {
      close_note(channel, a);
    }
  }
  for (auto& [key, starts] : open) {
    for (std::int64_t start : starts) track.notes.push_back({start, now, key.second});
  }
  return track;
}

MidiFile read_file(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  auto magic = in.take(4);
  if (std::string(magic.begin(), magic.end()) != "MThd") throw ParseError("missing MThd header", 0);
  std::uint32_t header_len = in.be(4);
  if (header_len < 6) throw ParseError("MThd chunk too short", 4);
  std::size_t header_at = in.offset();
  auto header = in.take(header_len);
  ByteReader h(header, header_at);
  int format = static_cast<int>(h.be(2));
  int ntracks = static_cast<int>(h.be(2));
  int division = static_cast<int>(h.be(2));
  if (format > 1) throw RejectionError("SMF format " + std::to_string(format) + " is not supported");
  if (division & 0x8000) throw RejectionError("SMPTE time division is not supported");
  if (division == 0) throw ParseError("zero ticks per quarter note", header_at + 4);

  MidiFile file;
  file.ppq = division;
  for (int t = 0; t < ntracks; ++t) {
    std::size_t chunk_at = in.offset();
    auto id = in.take(4);
    std::uint32_t len = in.be(4);
    std::size_t body_at = in.offset();
    auto body = in.take(len);
    if (std::string(id.begin(), id.end()) != "MTrk") {
      if (t == 0 && file.tracks.empty()) throw ParseError("expected MTrk chunk", chunk_at);
      --t;  // alien chunk, skip
      continue;
    }
    ByteReader track_in(body, body_at);
    file.tracks.push_back(read_track(track_in, file));
  }
  return file;
}

const Track& pick_melody(const MidiFile& file, const MidiOptions& options) {
  const std::string hint = upper(options.track_hint);
  if (!hint.empty()) {
    for (const Track& t : file.tracks) {
      if (!t.notes.empty() && upper(t.name).find(hint) != std::string::npos) return t;
    }
  }
  auto mean_pitch = [](const Track& t) {
    double sum = 0;
    for (const RawNote& n : t.notes) sum += n.pitch;
    return sum / static_cast<double>(t.notes.size());
  };
  const Track* best = nullptr;
  for (int threshold : {options.min_fallback_notes, 1}) {
    for (const Track& t : file.tracks) {
      if (static_cast<int>(t.notes.size()) < threshold) continue;
      if (best == nullptr || mean_pitch(t) > mean_pitch(*best)) best = &t;
    }
    if (best != nullptr) return *best;
  }
  throw RejectionError("no candidate melody track");
}

}  // namespace

Song parse_midi(std::span<const std::uint8_t> bytes, const MidiOptions& options, std::string id) {
  MidiFile file = read_file(bytes);
  const Track& melody = pick_melody(file, options);
  Song song;
  song.id = std::move(id);
  song.notes = quantize_melody(melody.notes, file.ppq);
  song.num_measures = measures_spanned(song.notes);
  song.key = file.key;
  return song;
}

}  // namespace repstruct
