#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "repstruct/error.h"
#include "repstruct/ingest.h"
#include "test_support.h"

namespace repstruct {
namespace {

using testing::SmfWriter;

Song parse(const SmfWriter& w, const MidiOptions& opts = {}) {
  auto bytes = w.bytes();
  return parse_midi(bytes, opts, "t");
}

TEST(Quantize, RoundsHalfUpOnSixteenthGrid) {
  // PPQ 480: one sixteenth is 120 ticks.
  struct Row {
    std::int64_t raw;
    Tick expected;
  };
  for (Row r : {Row{0, 0}, Row{59, 0}, Row{60, 1}, Row{120, 1}, Row{179, 1}, Row{180, 2}, Row{475, 4}, Row{480, 4},
                Row{540, 5}, Row{1919, 16}}) {
    EXPECT_EQ(quantize_to_sixteenths(r.raw, 480), r.expected) << r.raw;
  }
  EXPECT_EQ(quantize_to_sixteenths(3, 4), 3);
  EXPECT_EQ(quantize_to_sixteenths(1, 2), 2);  // one eighth at divisions 2
}

TEST(Quantize, GridAlignedMelodyIsIdentity) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<RawNote> raw;
    std::vector<NoteEvent> expected;
    Tick t = 0;
    for (int i = 0; i < 20; ++i) {
      Tick gap = static_cast<Tick>(rng() % 3), dur = 1 + static_cast<Tick>(rng() % 8);
      t += gap;
      int pitch = 40 + static_cast<int>(rng() % 40);
      raw.push_back({t * 120, (t + dur) * 120, pitch});
      expected.push_back({t, dur, pitch});
      t += dur;
    }
    EXPECT_EQ(quantize_melody(raw, 480), expected);
  }
}

TEST(Quantize, ForcesMonophony) {
  // Chord at 0 keeps the top note; the overlapped note is truncated.
  std::vector<RawNote> raw{{0, 960, 60}, {0, 480, 64}, {240, 720, 67}};
  auto notes = quantize_melody(raw, 480);
  ASSERT_EQ(notes.size(), 2u);
  EXPECT_EQ(notes[0], (NoteEvent{0, 2, 64}));
  EXPECT_EQ(notes[1], (NoteEvent{2, 4, 67}));
}

TEST(Quantize, ZeroLengthClampsToOneSixteenth) {
  auto notes = quantize_melody({{0, 10, 60}}, 480);
  ASSERT_EQ(notes.size(), 1u);
  EXPECT_EQ(notes[0].duration, 1);
}

TEST(Midi, SingleQuarterNote) {
  SmfWriter w;
  w.add_track().note(0, 480, 60);
  Song s = parse(w);
  ASSERT_EQ(s.notes.size(), 1u);
  EXPECT_EQ(s.notes[0], (NoteEvent{0, 4, 60}));
  EXPECT_EQ(s.num_measures, 1);
}

TEST(Midi, NearGridOnsetQuantizes) {
  SmfWriter w;
  w.add_track().note(475, 955, 62);
  Song s = parse(w);
  ASSERT_EQ(s.notes.size(), 1u);
  EXPECT_EQ(s.notes[0].onset, 4);
  EXPECT_EQ(s.notes[0].duration, 4);
}

TEST(Midi, RejectsThreeFour) {
  SmfWriter w;
  w.add_track().time_signature(0, 3).note(0, 480, 60);
  EXPECT_THROW(parse(w), RejectionError);
}

TEST(Midi, AcceptsFourFour) {
  SmfWriter w;
  w.add_track().time_signature(0, 4).note(0, 480, 60);
  EXPECT_NO_THROW(parse(w));
}

TEST(Midi, ReadsKeySignature) {
  SmfWriter w;
  w.add_track().key_signature(1, false).note(0, 480, 67);
  Song s = parse(w);
  ASSERT_TRUE(s.key.has_value());
  EXPECT_EQ(s.key->tonic_pc, 7);
  EXPECT_EQ(s.key->mode, Mode::kMajor);

  SmfWriter m;
  m.add_track().key_signature(-3, true).note(0, 480, 60);
  Song minor = parse(m);
  ASSERT_TRUE(minor.key.has_value());
  EXPECT_EQ(minor.key->tonic_pc, 0);  // three flats, minor: C minor
  EXPECT_EQ(minor.key->mode, Mode::kMinor);
}

TEST(Midi, MalformedReportsByteOffset) {
  SmfWriter w;
  w.add_track().note(0, 480, 60);
  auto bytes = w.bytes();
  bytes.resize(bytes.size() - 6);
  try {
    parse_midi(bytes);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(e.offset(), ParseError::kNoOffset);
    EXPECT_NE(std::string(e.what()).find("at byte"), std::string::npos);
  }
  std::vector<std::uint8_t> garbage{'R', 'I', 'F', 'F', 0, 0, 0, 6};
  EXPECT_THROW(parse_midi(garbage), ParseError);
}

TEST(Midi, RunningStatus) {
  // Note-on, then a second note-on and both note-offs using running status.
  std::vector<std::uint8_t> track{0x00, 0x90, 60, 100, 0x83, 0x60, 60, 0, 0x00, 64, 100, 0x83, 0x60, 64, 0,
                                  0x00, 0xFF, 0x2F, 0x00};
  std::vector<std::uint8_t> bytes{'M', 'T', 'h', 'd', 0, 0, 0, 6, 0, 0, 0, 1, 0x01, 0xE0, 'M', 'T', 'r', 'k', 0, 0, 0,
                                  static_cast<std::uint8_t>(track.size())};
  bytes.insert(bytes.end(), track.begin(), track.end());
  Song s = parse_midi(bytes);
  ASSERT_EQ(s.notes.size(), 2u);
  EXPECT_EQ(s.notes[1], (NoteEvent{4, 4, 64}));
}

TEST(Midi, NamedMelodyTrackWins) {
  SmfWriter w;
  auto& acc = w.add_track().name("PIANO");
  for (int i = 0; i < 16; ++i) acc.note(i * 480, (i + 1) * 480, 84);
  w.add_track().name("MELODY").note(0, 480, 60).note(480, 960, 62);
  Song s = parse(w);
  ASSERT_EQ(s.notes.size(), 2u);
  EXPECT_EQ(s.notes[0].pitch, 60);
}

TEST(Midi, FallsBackToHighestMeanPitch) {
  SmfWriter w;
  auto& low = w.add_track().name("BASS");
  auto& high = w.add_track().name("LEAD");
  auto& sparse = w.add_track().name("BELL");
  for (int i = 0; i < 8; ++i) {
    low.note(i * 480, (i + 1) * 480, 40);
    high.note(i * 480, (i + 1) * 480, 72);
  }
  sparse.note(0, 480, 100);  // too few notes to be a candidate
  Song s = parse(w);
  ASSERT_EQ(s.notes.size(), 8u);
  EXPECT_EQ(s.notes[0].pitch, 72);
}

TEST(Midi, NoNotesIsRejected) {
  SmfWriter w;
  w.add_track().name("EMPTY");
  EXPECT_THROW(parse(w), RejectionError);
}

constexpr const char* kQuarterC5 = R"(<?xml version="1.0"?>
<score-partwise version="3.1">
  <part-list><score-part id="P1"><part-name>M</part-name></score-part></part-list>
  <part id="P1">
    <measure number="1">
      <attributes><divisions>4</divisions><key><fifths>0</fifths><mode>major</mode></key>
        <time><beats>4</beats><beat-type>4</beat-type></time></attributes>
      <note><pitch><step>C</step><octave>5</octave></pitch><duration>4</duration></note>
      <note><rest/><duration>12</duration></note>
    </measure>
  </part>
</score-partwise>)";

TEST(MusicXml, QuarterNote) {
  Song s = parse_musicxml(kQuarterC5, "x");
  ASSERT_EQ(s.notes.size(), 1u);
  EXPECT_EQ(s.notes[0], (NoteEvent{0, 4, 72}));
  ASSERT_TRUE(s.key.has_value());
  EXPECT_EQ(s.key->tonic_pc, 0);
  EXPECT_EQ(s.key->mode, Mode::kMajor);
}

TEST(MusicXml, NoNotesKeepsMeasureCount) {
  std::string xml = R"(<score-partwise><part-list><score-part id="P1"/></part-list><part id="P1">
    <measure number="1"><attributes><divisions>2</divisions></attributes></measure>
    <measure number="2"/><measure number="3"/></part></score-partwise>)";
  Song s = parse_musicxml(xml);
  EXPECT_TRUE(s.notes.empty());
  EXPECT_EQ(s.num_measures, 3);
}

TEST(MusicXml, TiesChordsAndBackup) {
  std::string xml = R"(<score-partwise><part-list><score-part id="P1"/></part-list><part id="P1">
    <measure number="1"><attributes><divisions>2</divisions><key><fifths>1</fifths></key></attributes>
      <note><pitch><step>G</step><octave>4</octave></pitch><duration>4</duration><tie type="start"/></note>
      <note><chord/><pitch><step>B</step><octave>4</octave></pitch><duration>4</duration></note>
      <note><pitch><step>G</step><octave>4</octave></pitch><duration>2</duration><tie type="stop"/></note>
      <note><pitch><step>F</step><alter>1</alter><octave>4</octave></pitch><duration>2</duration></note>
      <backup><duration>8</duration></backup>
      <note><pitch><step>C</step><octave>3</octave></pitch><duration>8</duration><voice>2</voice></note>
    </measure></part></score-partwise>)";
  Song s = parse_musicxml(xml);
  ASSERT_TRUE(s.key.has_value());
  EXPECT_EQ(s.key->tonic_pc, 7);
  ASSERT_EQ(s.notes.size(), 2u);
  // Chord keeps the top note; the tie into beat 3 does not apply to B.
  EXPECT_EQ(s.notes[0], (NoteEvent{0, 8, 71}));
  EXPECT_EQ(s.notes[1], (NoteEvent{12, 4, 66}));
}

TEST(MusicXml, Errors) {
  EXPECT_THROW(parse_musicxml("<score-partwise><part"), ParseError);
  std::string no_div = R"(<score-partwise><part id="P1"><measure number="1">
      <note><pitch><step>C</step><octave>4</octave></pitch><duration>4</duration></note>
    </measure></part></score-partwise>)";
  EXPECT_THROW(parse_musicxml(no_div), RejectionError);
  std::string waltz = R"(<score-partwise><part id="P1"><measure number="1">
      <attributes><divisions>1</divisions><time><beats>3</beats><beat-type>4</beat-type></time></attributes>
    </measure></part></score-partwise>)";
  EXPECT_THROW(parse_musicxml(waltz), RejectionError);
}

// Independent Krumhansl-Schmuckler computation.
std::pair<int, Mode> oracle_key(const std::array<double, 12>& hist) {
  const double major[12] = {6.35, 2.23, 3.48, 2.33, 4.38, 4.09, 2.52, 5.19, 2.39, 3.66, 2.29, 2.88};
  const double minor[12] = {6.33, 2.68, 3.52, 5.38, 2.60, 3.53, 2.54, 4.75, 3.98, 2.69, 3.34, 3.17};
  auto pearson = [](const double* x, const double* y) {
    double mx = 0, my = 0;
    for (int i = 0; i < 12; ++i) mx += x[i] / 12, my += y[i] / 12;
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 12; ++i) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
      syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
  };
  double best = -2;
  std::pair<int, Mode> key{0, Mode::kMajor};
  for (int tonic = 0; tonic < 12; ++tonic) {
    double rotated[12];
    for (int pc = 0; pc < 12; ++pc) rotated[pc] = hist[static_cast<std::size_t>((pc + tonic) % 12)];
    for (auto [profile, mode] : {std::pair{major, Mode::kMajor}, std::pair{minor, Mode::kMinor}}) {
      double r = pearson(rotated, profile);
      if (r > best + 1e-12) best = r, key = {tonic, mode};
    }
  }
  return key;
}

TEST(Key, NotatedKeyWins) {
  Song s = testing::make_song({{0, 4, 67}, {4, 4, 79}}, 1, "g", {7, Mode::kMajor});
  Key k = resolve_tonic(s);
  EXPECT_EQ(k.tonic_pc, 7);
  EXPECT_EQ(k.mode, Mode::kMajor);
}

TEST(Key, CMajorScaleMatchesOracle) {
  Song s;
  s.num_measures = 2;
  const int scale[8] = {60, 62, 64, 65, 67, 69, 71, 72};
  for (int i = 0; i < 8; ++i) s.notes.push_back({i * 4, 4, scale[i]});
  Key k = resolve_tonic(s);
  auto [tonic, mode] = oracle_key(pitch_class_histogram(s.notes));
  EXPECT_EQ(k.tonic_pc, tonic);
  EXPECT_EQ(k.mode, mode);
  EXPECT_EQ(k.tonic_pc, 0);
  EXPECT_EQ(k.mode, Mode::kMajor);
}

TEST(Key, RandomHistogramsMatchOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::array<double, 12> hist{};
    for (double& h : hist) h = static_cast<double>(rng() % 20);
    if (std::all_of(hist.begin(), hist.end(), [&](double v) { return v == hist[0]; })) continue;
    Key k = best_key(key_correlations(hist));
    auto [tonic, mode] = oracle_key(hist);
    EXPECT_EQ(k.tonic_pc, tonic);
    EXPECT_EQ(k.mode, mode);
  }
}

TEST(Key, TiesGoToLowerPitchClassThenMajor) {
  std::array<double, 24> flat{};
  Key k = best_key(flat);
  EXPECT_EQ(k.tonic_pc, 0);
  EXPECT_EQ(k.mode, Mode::kMajor);
  std::array<double, 24> two{};
  two[5 * 2 + 1] = 0.9;  // F minor
  two[9 * 2] = 0.9;      // A major
  k = best_key(two);
  EXPECT_EQ(k.tonic_pc, 5);
  EXPECT_EQ(k.mode, Mode::kMinor);
  // A chromatic melody has no tonal centre at all.
  Song chromatic;
  chromatic.num_measures = 3;
  for (int i = 0; i < 12; ++i) chromatic.notes.push_back({i * 4, 4, 60 + i});
  k = resolve_tonic(chromatic);
  EXPECT_EQ(k.tonic_pc, 0);
  EXPECT_EQ(k.mode, Mode::kMajor);
}

TEST(Key, EmptyMelodyIsAnError) {
  Song s;
  s.num_measures = 1;
  EXPECT_THROW(resolve_tonic(s), Error);
}

TEST(Degrees, Examples) {
  EXPECT_EQ(to_degree_sequence(testing::make_song({{0, 4, 60}, {4, 4, 64}, {8, 4, 67}}, 1)),
            (std::vector<Symbol>{0, 4, 7}));
  EXPECT_EQ(to_degree_sequence(testing::make_song({{0, 4, 57}, {4, 4, 69}}, 1, "a", {9, Mode::kMinor})),
            (std::vector<Symbol>{0, 0}));
  EXPECT_EQ(to_degree_sequence(testing::make_song({{0, 4, 66}}, 1, "g", {7, Mode::kMajor})), (std::vector<Symbol>{11}));
}

TEST(Labels, Examples) {
  SongStructure s = parse_labels("A4A4", 8);
  ASSERT_EQ(s.labels.size(), 2u);
  EXPECT_EQ(s.labels[0].letter, 'A');
  EXPECT_EQ(s.labels[1].letter, 'A');
  EXPECT_EQ(s.labels[0].start_measure, 0);
  EXPECT_EQ(s.labels[1].start_measure, 4);
  EXPECT_TRUE(s.labels[0].melodic());

  EXPECT_THROW(parse_labels("i2A4", 7), StructureMismatchError);

  SongStructure fig = parse_labels("i4A8A8B8B8o4");
  ASSERT_EQ(fig.labels.size(), 6u);
  std::string melodic, other;
  for (const PhraseLabel& l : fig.labels) (l.melodic() ? melodic : other) += l.letter;
  EXPECT_EQ(melodic, "AABB");
  EXPECT_EQ(other, "io");
  EXPECT_EQ(fig.total_measures(), 40);
}

TEST(Labels, Errors) {
  EXPECT_THROW(parse_labels("A4-B4"), ParseError);
  EXPECT_THROW(parse_labels("A"), ParseError);
  EXPECT_THROW(parse_labels("4A"), ParseError);
  EXPECT_THROW(parse_labels("A0"), ParseError);
  EXPECT_THROW(parse_labels(""), ParseError);
  EXPECT_TRUE(is_unrepeated_marker('X'));
  EXPECT_TRUE(is_unrepeated_marker('x'));
  EXPECT_FALSE(is_unrepeated_marker('A'));
}

TEST(Labels, RenderRoundTrip) {
  std::mt19937_64 rng(7);
  const std::string letters = "ABCDXiobx";
  for (int trial = 0; trial < 1000; ++trial) {
    std::string text;
    int n = 1 + static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      text += letters[rng() % letters.size()];
      text += std::to_string(1 + rng() % 16);
    }
    SongStructure s = parse_labels(text);
    EXPECT_EQ(render_labels(s), text);
    EXPECT_EQ(parse_labels(render_labels(s)), s);
  }
}

TEST(Labels, LabelFile) {
  auto rows = parse_label_file("# comment\n\nsong1\tA4A4\nsong2\ti2B4\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1].first, "song2");
  EXPECT_EQ(rows[1].second, "i2B4");
  EXPECT_THROW(parse_label_file("song1 A4A4\n"), ParseError);
}

TEST(SongJson, RoundTrip) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    Song s;
    s.id = "r" + std::to_string(trial);
    Tick t = 0;
    for (int i = 0; i < 30; ++i) {
      t += static_cast<Tick>(rng() % 3);
      Tick d = 1 + static_cast<Tick>(rng() % 6);
      s.notes.push_back({t, d, static_cast<int>(rng() % 128)});
      t += d;
    }
    s.num_measures = measures_spanned(s.notes);
    s.key = Key{static_cast<int>(rng() % 12), rng() % 2 ? Mode::kMinor : Mode::kMajor};
    Song back = song_from_json(nlohmann::json::parse(song_to_json(s).dump()));
    EXPECT_EQ(back, s);
    EXPECT_LE(s.notes.back().end(), s.num_measures * kTicksPerMeasure);
  }
}

TEST(SongJson, ValidationErrors) {
  auto bad = nlohmann::json::parse(R"({"id":"b","tonic_pc":0,"mode":"major","num_measures":1,"notes":[[0,4,60],[0,4,62]]})");
  EXPECT_THROW(song_from_json(bad), RejectionError);
  bad = nlohmann::json::parse(R"({"id":"b","tonic_pc":0,"mode":"major","num_measures":1,"notes":[[12,8,60]]})");
  EXPECT_THROW(song_from_json(bad), RejectionError);
  bad = nlohmann::json::parse(R"({"id":"b","tonic_pc":0,"mode":"dorian","num_measures":1,"notes":[]})");
  EXPECT_THROW(song_from_json(bad), ParseError);
  bad = nlohmann::json::parse(R"({"id":"b"})");
  EXPECT_THROW(song_from_json(bad), ParseError);
}

}  // namespace
}  // namespace repstruct
