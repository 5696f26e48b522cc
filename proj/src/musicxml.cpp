// score-partwise MusicXML reader. The first part is taken as the melody and
// only its first voice is kept.

#include <algorithm>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {
namespace {

namespace pt = boost::property_tree;

int step_pitch_class(const std::string& step) {
  static const std::string kSteps = "CDEFGAB";
  static const int kPcs[] = {0, 2, 4, 5, 7, 9, 11};
  auto pos = kSteps.find(step.empty() ? '?' : step[0]);
  if (step.size() != 1 || pos == std::string::npos) throw ParseError("invalid pitch step '" + step + "'");
  return kPcs[pos];
}

Key key_from_fifths(int fifths, const std::string& mode) {
  int major_tonic = ((fifths * 7) % 12 + 12) % 12;
  if (mode == "minor") return {(major_tonic + 9) % 12, Mode::kMinor};
  return {major_tonic, Mode::kMajor};
}

}  // namespace

Song parse_musicxml(std::string_view xml, std::string id) {
  pt::ptree doc;
  try {
    std::istringstream stream{std::string(xml)};
    pt::read_xml(stream, doc, pt::xml_parser::no_comments);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(std::string("malformed XML: ") + e.message() + " at line " +
                     std::to_string(e.line()));
  }
  auto score = doc.get_child_optional("score-partwise");
  if (!score) throw ParseError("not a score-partwise document");
  auto part_it = score->find("part");
  if (part_it == score->not_found()) throw ParseError("score has no part");
  const pt::ptree& part = part_it->second;

  std::int64_t divisions = 0;
  std::optional<Key> key;
  std::vector<RawNote> raw;
  std::optional<std::string> melody_voice;
  int measure_count = 0;
  // Positions are kept in divisions; measure k starts at k * 4 quarters.
  for (const auto& [tag, measure] : part) {
    if (tag != "measure") continue;
    if (divisions <= 0) {
      if (auto d = measure.get_optional<std::int64_t>("attributes.divisions")) divisions = *d;
    }
    std::int64_t cursor = 0;
    std::int64_t measure_start_q = measure_count;  // in whole measures
    ++measure_count;
    for (const auto& [child_tag, child] : measure) {
      if (child_tag == "attributes") {
        if (auto d = child.get_optional<std::int64_t>("divisions")) divisions = *d;
        if (auto time = child.get_child_optional("time")) {
          auto beats = time->get_optional<std::string>("beats");
          auto beat_type = time->get_optional<std::string>("beat-type");
          if (!beats || !beat_type || *beats != "4" || *beat_type != "4") {
            throw RejectionError("time signature " + beats.value_or("?") + "/" +
                                 beat_type.value_or("?") + " rejected: only 4/4 is supported");
          }
        }
        if (auto k = child.get_child_optional("key")) {
          if (auto fifths = k->get_optional<int>("fifths"); fifths && !key) {
            key = key_from_fifths(*fifths, k->get<std::string>("mode", "major"));
          }
        }
      } else if (child_tag == "backup" || child_tag == "forward") {
        if (divisions <= 0) throw RejectionError("MusicXML part lacks a divisions attribute");
        std::int64_t d = child.get<std::int64_t>("duration", 0);
        cursor += child_tag == "backup" ? -d : d;
        if (cursor < 0) cursor = 0;
      } else if (child_tag == "note") {
        if (divisions <= 0) throw RejectionError("MusicXML part lacks a divisions attribute");
        if (child.get_child_optional("grace") || child.get_child_optional("cue")) continue;
        std::string voice = child.get<std::string>("voice", "1");
        if (!melody_voice) melody_voice = voice;
        std::int64_t duration = child.get<std::int64_t>("duration", 0);
        bool chord = static_cast<bool>(child.get_child_optional("chord"));
        bool in_voice = voice == *melody_voice;
        if (chord) {
          // Chord members share the previous onset and do not advance time.
          if (in_voice && !child.get_child_optional("rest") && !raw.empty()) {
            auto pitch = child.get_child_optional("pitch");
            if (pitch) {
              int midi = (pitch->get<int>("octave") + 1) * 12 +
                         step_pitch_class(pitch->get<std::string>("step")) +
                         static_cast<int>(pitch->get<double>("alter", 0.0));
              RawNote n = raw.back();
              n.pitch = midi;
              raw.push_back(n);
            }
          }
          continue;
        }
        std::int64_t start = measure_start_q * 4 * divisions + cursor;
        cursor += duration;
        if (!in_voice || child.get_child_optional("rest")) continue;
        auto pitch = child.get_child_optional("pitch");
        if (!pitch) continue;  // unpitched
        int midi = (pitch->get<int>("octave") + 1) * 12 +
                   step_pitch_class(pitch->get<std::string>("step")) +
                   static_cast<int>(pitch->get<double>("alter", 0.0));

        bool tie_stop = false;
        for (const auto& [t, tie] : child) {
          if (t == "tie" && tie.get<std::string>("<xmlattr>.type", "") == "stop") tie_stop = true;
        }
        if (tie_stop) {
          auto tied = std::find_if(raw.rbegin(), raw.rend(),
                                   [&](const RawNote& n) { return n.pitch == midi && n.end == start; });
          if (tied != raw.rend()) {
            tied->end = start + duration;
            continue;
          }
        }
        raw.push_back({start, start + duration, midi});
      }
    }
  }
  if (divisions <= 0) throw RejectionError("MusicXML part lacks a divisions attribute");

  Song song;
  song.id = std::move(id);
  song.notes = quantize_melody(std::move(raw), divisions);
  song.num_measures = std::max(measure_count, song.notes.empty() ? 1 : measures_spanned(song.notes));
  song.key = key;
  return song;
}

}  // namespace repstruct
