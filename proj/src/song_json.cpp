#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {

void validate_song(const Song& song) {
  if (song.num_measures < 1) throw RejectionError("song '" + song.id + "' has no measures");
  Tick previous = -1;
  for (const NoteEvent& n : song.notes) {
    if (n.onset <= previous) throw RejectionError("song '" + song.id + "' has unsorted or shared onsets");
    if (n.duration < 1) throw RejectionError("song '" + song.id + "' has a zero-length note");
    if (n.pitch < 0 || n.pitch > 127) throw RejectionError("song '" + song.id + "' has a pitch outside 0-127");
    if (n.end() > song.length_ticks()) {
      throw RejectionError("song '" + song.id + "' has notes beyond its last measure");
    }
    previous = n.onset;
  }
  if (song.key && (song.key->tonic_pc < 0 || song.key->tonic_pc > 11)) {
    throw RejectionError("song '" + song.id + "' has an invalid tonic");
  }
}

nlohmann::ordered_json song_to_json(const Song& song) {
  if (!song.key) throw ParameterError("song '" + song.id + "' must have a resolved key before export");
  nlohmann::ordered_json j;
  j["id"] = song.id;
  j["tonic_pc"] = song.key->tonic_pc;
  j["mode"] = to_string(song.key->mode);
  j["num_measures"] = song.num_measures;
  auto notes = nlohmann::ordered_json::array();
  for (const NoteEvent& n : song.notes) notes.push_back({n.onset, n.duration, n.pitch});
  j["notes"] = std::move(notes);
  return j;
}

Song song_from_json(const nlohmann::json& j) {
  Song song;
  try {
    song.id = j.at("id").get<std::string>();
    Key key;
    key.tonic_pc = j.at("tonic_pc").get<int>();
    std::string mode = j.at("mode").get<std::string>();
    if (mode != "major" && mode != "minor") throw ParseError("mode must be 'major' or 'minor'");
    key.mode = mode == "major" ? Mode::kMajor : Mode::kMinor;
    song.key = key;
    song.num_measures = j.at("num_measures").get<int>();
    for (const auto& n : j.at("notes")) {
      if (!n.is_array() || n.size() != 3) throw ParseError("note entries must be [onset, duration, pitch]");
      song.notes.push_back({n[0].get<Tick>(), n[1].get<Tick>(), n[2].get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid song JSON: ") + e.what());
  }
  validate_song(song);
  return song;
}

}  // namespace repstruct
