#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "repstruct/error.h"
#include "repstruct/experiments.h"
#include "repstruct/ingest.h"
#include "repstruct/report.h"
#include "test_support.h"

namespace repstruct {
namespace {

using testing::make_corpus;
using testing::make_song;
using testing::quarter_notes;

// Songs of i.i.d. uniform degrees in C major, quarter-note rhythm.
std::vector<Song> random_songs(int count, int measures, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Song> songs;
  for (int i = 0; i < count; ++i) {
    std::vector<NoteEvent> notes;
    for (int q = 0; q < measures * 4; ++q) notes.push_back({q * 4, 4, 60 + static_cast<int>(rng() % 12)});
    songs.push_back(make_song(notes, measures, "r" + std::to_string(100 + i)));
  }
  return songs;
}

std::map<std::string, std::string> label_all(const std::vector<Song>& songs, const std::string& labels) {
  std::map<std::string, std::string> out;
  for (const Song& s : songs) out[s.id] = labels;
  return out;
}

TEST(Curves, ConstantMelodyIsPredictable) {
  Song s = make_song(quarter_notes({60}, 16), 16);
  Corpus c = make_corpus({s}, {{"s", "A4A4A4A4"}});
  ExperimentConfig config;
  config.bins = 4;
  BinnedCurve curve = within_phrase_curve(c, config);
  for (int b = 1; b < 4; ++b) EXPECT_LT(*curve.mean(b), 0.1);
}

TEST(Curves, RandomMelodyIsFlatNearUniform) {
  const double uniform = std::log2(12.0);
  // Short songs with the default order: flat, but escapes into sparse
  // high-order contexts cost extra bits on unlearnable material.
  auto short_songs = random_songs(40, 16, 1);
  ExperimentConfig config;
  config.bins = 10;
  BinnedCurve curve = within_phrase_curve(make_corpus(short_songs, label_all(short_songs, "X8Y8")), config);
  double lo = INFINITY, hi = -INFINITY;
  for (int b = 0; b < 10; ++b) lo = std::min(lo, *curve.mean(b)), hi = std::max(hi, *curve.mean(b));
  EXPECT_LT(hi - lo, 0.35);
  EXPECT_GT(lo, uniform - 0.2);
  EXPECT_LT(hi, uniform + 1.0);

  // Long songs with an order-0 model settle at log2 12.
  auto long_songs = random_songs(10, 256, 2);
  config.max_order_fg = 0;
  curve = over_song_curve(make_corpus(long_songs, label_all(long_songs, "X128Y128")), config);
  for (int b = 2; b < 10; ++b) EXPECT_NEAR(*curve.mean(b), uniform, 0.1) << b;
}

TEST(Curves, RepeatedPhrasesDropOverSong) {
  std::mt19937_64 rng(3);
  std::vector<NoteEvent> notes;
  std::vector<int> phrase;
  for (int i = 0; i < 16; ++i) phrase.push_back(60 + static_cast<int>(rng() % 12));
  for (int rep = 0; rep < 4; ++rep) {
    for (int i = 0; i < 16; ++i) notes.push_back({rep * 64 + i * 4, 4, phrase[static_cast<std::size_t>(i)]});
  }
  Corpus c = make_corpus({make_song(notes, 16)}, {{"s", "A4A4A4A4"}});
  ExperimentConfig config;
  config.bins = 8;
  BinnedCurve curve = over_song_curve(c, config);
  EXPECT_GT(*curve.mean(0), 3.0);
  for (int b = 2; b < 8; ++b) EXPECT_LT(*curve.mean(b), 0.5 * *curve.mean(0));
}

TEST(Curves, BinnedCurveBasics) {
  BinnedCurve c(4);
  c.add(0.0, 1.0);
  c.add(1.0, 3.0);
  c.add(0.99, 5.0);
  EXPECT_EQ(*c.mean(0), 1.0);
  EXPECT_FALSE(c.mean(1).has_value());
  EXPECT_EQ(*c.mean(3), 4.0);
  EXPECT_DOUBLE_EQ(c.bin_start(2), 0.5);
}

TEST(Positions, EveryNoteGetsOnePosition) {
  Song s = make_song(quarter_notes({60, 62, 64, 65, 67}, 24), 24);
  Corpus c = make_corpus({s}, {{"s", "i4A4A4X4B4B4"}});
  const AnalyzedSong& a = c.songs[0];
  auto pos = structural_positions(a);
  ASSERT_EQ(pos.size(), a.song.notes.size());
  // Section of A4A4: first half note of measure 4 is section start.
  EXPECT_EQ(pos[16], StructuralPosition::kSectionStart);
  EXPECT_EQ(pos[17], StructuralPosition::kSectionStart);
  EXPECT_EQ(pos[18], StructuralPosition::kPhraseMiddle);
  EXPECT_EQ(pos[30], StructuralPosition::kPhraseEnd);
  EXPECT_EQ(pos[32], StructuralPosition::kPhraseStart);
  EXPECT_EQ(pos[47], StructuralPosition::kSectionEnd);
  // Unique phrase X4 and the non-melodic intro use phrase positions only.
  EXPECT_EQ(pos[48], StructuralPosition::kPhraseStart);
  EXPECT_EQ(pos[0], StructuralPosition::kPhraseStart);
  auto phrase_only = phrase_positions(a);
  EXPECT_EQ(phrase_only[16], StructuralPosition::kPhraseStart);
  EXPECT_EQ(phrase_only[47], StructuralPosition::kPhraseEnd);

  ExperimentConfig config;
  auto pce = positional_cross_entropy(c, config);
  long sum = 0;
  for (const auto& [p, n] : pce.background.count) sum += n;
  EXPECT_EQ(sum, static_cast<long>(a.song.notes.size()));
  EXPECT_EQ(pce.background.total, sum);
}

TEST(Positions, RandomCorpusHasNoPositionalSignal) {
  auto songs = random_songs(60, 32, 5);
  Corpus c = make_corpus(songs, label_all(songs, "A8A8B8B8"));
  ExperimentConfig config;
  auto pce = positional_cross_entropy(c, config);
  const double overall = pce.background.overall_mean;
  for (const auto& [p, m] : pce.background.mean) EXPECT_NEAR(m, overall, 0.15) << to_string(p);
}

TEST(Sweep, EndpointsMatchPureModels) {
  auto songs = random_songs(4, 16, 9);
  Corpus c = make_corpus(songs, label_all(songs, "A4B4A4B4"));
  ExperimentConfig config;
  config.lambda_grid = {0.0, 0.5, 1.0};
  for (SweepVariant v : {SweepVariant::kIncludeDuplicates, SweepVariant::kHoldoutRepeats}) {
    SweepResult r = fg_bg_sweep(c, v, config);
    ASSERT_EQ(r.rows.size(), 3u);
    EXPECT_EQ(r.tested_notes, 4 * 4 * 8);

    // Foreground-only evaluation, computed directly.
    ContextTreeModel full_bg = train_background(c, config.max_order_bg);
    double fg_sum = 0, bg_sum = 0;
    for (const AnalyzedSong& a : c.songs) {
      ContextTreeModel bg = full_bg;
      bg.remove(a.degrees);
      for (std::size_t p = 0; p < a.structure.labels.size(); ++p) {
        auto mask = foreground_training_mask(a, p, v, config);
        ContextTreeModel fg = train_on_mask(a.degrees, mask, config.max_order_fg);
        for (std::size_t i : tested_notes(a, p, config.test_notes)) {
          std::span<const Symbol> deg(a.degrees);
          auto ctx_fg = context_before({}, deg, i, static_cast<std::size_t>(config.max_order_fg));
          auto ctx_bg = context_before({}, deg, i, static_cast<std::size_t>(config.max_order_bg));
          fg_sum += -std::log2(fg.predict(ctx_fg)[a.degrees[i]]);
          bg_sum += -std::log2(bg.predict(ctx_bg)[a.degrees[i]]);
        }
      }
    }
    EXPECT_NEAR(r.rows[2].cross_entropy, fg_sum / static_cast<double>(r.tested_notes), 1e-9);
    EXPECT_NEAR(r.rows[0].cross_entropy, bg_sum / static_cast<double>(r.tested_notes), 1e-9);
  }
}

TEST(Sweep, ShortPhrasesAreTestedWhole) {
  Song s = make_song({{0, 4, 60}, {16, 4, 62}, {32, 4, 64}, {64, 4, 65}, {70, 4, 67}}, 8);
  Corpus c = make_corpus({s}, {{"s", "A4B4"}});
  EXPECT_EQ(tested_notes(c.songs[0], 0, 8).size(), 3u);
  EXPECT_EQ(tested_notes(c.songs[0], 1, 8).size(), 2u);
  EXPECT_EQ(tested_notes(c.songs[0], 0, 2), (std::vector<std::size_t>{0, 1}));
}

TEST(Holdout, TestedNotesNeverTrainTheirForeground) {
  auto songs = random_songs(3, 24, 13);
  std::vector<std::string> forms{"A4B4A4X4B4C4", "i4A8A8X4", "A4A4A4B4B4B4"};
  std::map<std::string, std::string> labels;
  for (std::size_t i = 0; i < songs.size(); ++i) labels[songs[i].id] = forms[i];
  ExperimentConfig config;
  Corpus c = make_corpus(songs, labels, config);
  for (const AnalyzedSong& a : c.songs) {
    auto repeated = repeated_phrases(a, config.sim_threshold);
    auto related = related_phrases(a, config.sim_threshold);
    for (std::size_t p = 0; p < a.structure.labels.size(); ++p) {
      for (SweepVariant v : {SweepVariant::kIncludeDuplicates, SweepVariant::kHoldoutRepeats}) {
        auto mask = foreground_training_mask(a, p, v, config);
        for (std::size_t i : tested_notes(a, p, config.test_notes)) EXPECT_FALSE(mask[i]);
        if (v != SweepVariant::kHoldoutRepeats) continue;
        for (std::size_t n = 0; n < mask.size(); ++n) {
          int q = a.phrase_of_note[n];
          if (q < 0) continue;
          auto qi = static_cast<std::size_t>(q);
          if (repeated[qi] || related[p][qi] || qi == p) {
            EXPECT_FALSE(mask[n]);
          }
        }
      }
    }
  }
  // The foreground model never contains a tested note's own occurrence: for
  // a song made of one phrase repeated, the holdout mask is empty.
  Song rep = make_song(quarter_notes({60, 64, 67, 72}, 8), 8, "rep");
  Corpus single = make_corpus({rep}, {{"rep", "A4A4"}}, config);
  for (std::size_t p = 0; p < 2; ++p) {
    auto mask = foreground_training_mask(single.songs[0], p, SweepVariant::kHoldoutRepeats, config);
    EXPECT_EQ(std::count(mask.begin(), mask.end(), true), 0);
  }
}

TEST(PitchStats, TonicEndings) {
  std::vector<Song> songs;
  for (int i = 0; i < 3; ++i) {
    std::vector<NoteEvent> notes;
    for (int m = 0; m < 8; ++m) {
      bool last_measure = m % 4 == 3;
      for (int q = 0; q < 4; ++q) {
        int pitch = last_measure && q >= 2 ? 60 : 62 + (q + m + i) % 9;
        notes.push_back({m * 16 + q * 4, 4, pitch});
      }
    }
    songs.push_back(make_song(notes, 8, "t" + std::to_string(i)));
  }
  Corpus c = make_corpus(songs, label_all(songs, "A4B4"));
  auto stats = phrase_position_pitch_stats(c);
  const auto& end = stats.at(StructuralPosition::kPhraseEnd);
  EXPECT_DOUBLE_EQ(end.tonic_probability, 1.0);
  EXPECT_DOUBLE_EQ(end.entropy_bits, 0.0);
  EXPECT_EQ(end.total, 3 * 2 * 2);
  EXPECT_LT(stats.at(StructuralPosition::kPhraseMiddle).tonic_probability, 1.0);
}

TEST(Vocabulary, SingleRepeatedPatternSong) {
  ExperimentConfig config;
  for (int measures : {4, 8, 16}) {
    Song s = make_song(quarter_notes({60}, measures), measures);
    Corpus c = make_corpus({s}, {{"s", "A" + std::to_string(measures)}});
    auto units = song_onset_units(c, config);
    ASSERT_EQ(units.size(), 1u);
    auto v = count_vocabulary<OnsetPattern>(units[0]);
    EXPECT_EQ(v.distinct, 1);
    EXPECT_EQ(v.unique, 0);
  }
}

TEST(Vocabulary, LongRestsAreNotCounted) {
  // Measures 4-6 hold one note sounding across a 2.5-measure rest.
  std::vector<NoteEvent> notes = quarter_notes({60, 62}, 4);
  notes.push_back({64, 4, 64});
  for (NoteEvent n : quarter_notes({65, 67}, 1)) {
    n.onset += 7 * 16;
    notes.push_back(n);
  }
  Corpus c = make_corpus({make_song(notes, 8)}, {{"s", "A8"}});
  auto countable = countable_measures(c.songs[0], 2);
  EXPECT_EQ(countable, (std::vector<bool>{true, true, true, true, false, false, false, true}));
}

TEST(Rhythm, DistinctOnsetPatterns) {
  Song s = make_song({{0, 4, 60}, {4, 4, 60}, {8, 8, 60}, {16, 2, 60}}, 2);
  Corpus c = make_corpus({s}, {{"s", "A2"}});
  // x...x... , x....... , x.......(held) : two distinct from three non-empty windows.
  EXPECT_EQ(distinct_onset_patterns(c), 2);
}

TEST(Config, ValidationListsEveryProblem) {
  ExperimentConfig config;
  config.bins = 1;
  config.max_order_bg = -1;
  config.lambda_grid = {0.5, 1.5};
  config.sim_threshold = 2;
  auto errors = validate_config(config);
  EXPECT_GE(errors.size(), 4u);
  EXPECT_TRUE(validate_config(ExperimentConfig{}).empty());
}

TEST(Corpus, BuildSortsAndRejectsDuplicates) {
  auto songs = random_songs(3, 4, 2);
  std::reverse(songs.begin(), songs.end());
  Corpus c = make_corpus(songs, {});
  EXPECT_EQ(c.songs.front().song.id, "r100");
  songs.push_back(songs.front());
  EXPECT_THROW(make_corpus(songs, {}), Error);
  // A label string that does not tile the song is reported, not fatal.
  std::vector<std::pair<std::string, std::string>> failures;
  auto one = random_songs(2, 4, 3);
  Corpus partial = build_corpus("p", one, {{"r100", "A8"}}, ExperimentConfig{}, &failures);
  EXPECT_EQ(partial.songs.size(), 1u);
  ASSERT_EQ(failures.size(), 1u);
  EXPECT_EQ(failures[0].first, "r100");
}

TEST(Determinism, JobsDoNotChangeResults) {
  auto songs = random_songs(8, 16, 21);
  auto labels = label_all(songs, "A4B4A4B4");
  ExperimentConfig one, four;
  four.jobs = 4;
  Json a = corpus_metrics(make_corpus(songs, labels, one), one);
  Json b = corpus_metrics(make_corpus(songs, labels, four), four);
  EXPECT_EQ(a.dump(), b.dump());
}

}  // namespace
}  // namespace repstruct
