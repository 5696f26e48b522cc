// Corpus-level analyses: within-phrase and over-song cross-entropy curves,
// foreground/background mixture sweeps, structural-position predictability,
// phrase-position pitch statistics and vocabulary curves.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "repstruct/markov.h"
#include "repstruct/patterns.h"
#include "repstruct/structure.h"
#include "repstruct/types.h"

namespace repstruct {

struct ExperimentConfig {
  int bins = 20;
  int timeline_bins = 20;
  int max_order_fg = 8;
  int max_order_bg = 2;
  std::vector<double> lambda_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double sim_threshold = 0.75;
  int test_notes = 8;            // notes tested per phrase / per held-out window
  int min_phrase_count = 20;     // phrase vocabulary bins with fewer phrases are dropped
  int min_song_count = 1;        // same, for song vocabulary bins
  int song_length_bin = 32;      // half notes per song-length bin
  int baseline_draws = 10;       // random phrases sampled per real phrase or song
  int long_rest_measures = 2;    // rests at least this long are dropped from song length
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Returns a list of problems; empty when the configuration is usable.
std::vector<std::string> validate_config(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Corpus preparation
// ---------------------------------------------------------------------------

struct AnalyzedSong {
  Song song;
  SongStructure structure;
  bool labeled = false;
  std::vector<Symbol> degrees;
  std::vector<Section> sections;
  std::vector<int> phrase_of_note;  // index into structure.labels, per note
};

struct Corpus {
  std::string id;
  std::vector<AnalyzedSong> songs;  // sorted by song id
};

/// Human labels, when given, override extraction.
AnalyzedSong analyze_song(Song song, const std::optional<std::string>& labels, const ExperimentConfig& config);

/// Sorts by id and prepares every song; `labels` maps song id to a label string.
/// Songs that fail preparation are dropped and listed in `failures` as
/// (song id, reason) when it is given; otherwise the first failure is thrown.
Corpus build_corpus(std::string id, std::vector<Song> songs, const std::map<std::string, std::string>& labels,
                    const ExperimentConfig& config,
                    std::vector<std::pair<std::string, std::string>>* failures = nullptr);

/// Calls fn(i) for i in [0, n) on up to `jobs` threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------------------
// Positions
// ---------------------------------------------------------------------------

enum class StructuralPosition { kSectionStart, kPhraseStart, kPhraseMiddle, kPhraseEnd, kSectionEnd };
inline constexpr std::array<StructuralPosition, 5> kAllPositions = {
    StructuralPosition::kSectionStart, StructuralPosition::kPhraseStart, StructuralPosition::kPhraseMiddle,
    StructuralPosition::kPhraseEnd, StructuralPosition::kSectionEnd};

std::string to_string(StructuralPosition p);

/// One position per note. Start/End are the half-note windows holding the
/// phrase's first/last onset; section boundaries win over phrase boundaries.
std::vector<StructuralPosition> structural_positions(const AnalyzedSong& song);

/// Phrase-level only (SectionStart folds into PhraseStart, SectionEnd into PhraseEnd).
std::vector<StructuralPosition> phrase_positions(const AnalyzedSong& song);

// ---------------------------------------------------------------------------
// Binned curves
// ---------------------------------------------------------------------------

struct BinnedCurve {
  int num_bins = 0;
  std::vector<double> sums;
  std::vector<int> counts;

  explicit BinnedCurve(int bins = 0) : num_bins(bins), sums(static_cast<std::size_t>(bins)), counts(static_cast<std::size_t>(bins)) {}
  /// `position` in [0, 1]; 1 falls in the last bin.
  void add(double position, double value);
  void merge(const BinnedCurve& other);
  std::optional<double> mean(int bin) const;
  double bin_start(int bin) const { return static_cast<double>(bin) / num_bins; }
};

/// Online foreground model per song; each note in a melodic phrase is binned
/// by its normalized position inside the phrase.
BinnedCurve within_phrase_curve(const Corpus& corpus, const ExperimentConfig& config);

/// Same predictions, binned by normalized song position.
BinnedCurve over_song_curve(const Corpus& corpus, const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Foreground / background
// ---------------------------------------------------------------------------

enum class SweepVariant { kIncludeDuplicates, kHoldoutRepeats };
std::string to_string(SweepVariant v);

struct SweepRow {
  double lambda = 0;
  double entropy = 0;
  double cross_entropy = 0;
  double accuracy = 0;
};

struct SweepResult {
  SweepVariant variant = SweepVariant::kIncludeDuplicates;
  std::vector<SweepRow> rows;
  long tested_notes = 0;
  double best_lambda() const;  // argmin cross-entropy, first on ties
};

/// Note indices tested for phrase `phrase`: its first `test_notes` notes (all
/// of them when shorter).
std::vector<std::size_t> tested_notes(const AnalyzedSong& song, std::size_t phrase, int test_notes);

/// Per-phrase relation used for holdout: same (repeatable) letter, or equal
/// length with similarity at or above the threshold.
std::vector<std::vector<bool>> related_phrases(const AnalyzedSong& song, double sim_threshold);

/// Phrases that duplicate or closely resemble an earlier phrase.
std::vector<bool> repeated_phrases(const AnalyzedSong& song, double sim_threshold);

/// Which notes train the foreground model when testing `phrase`.
std::vector<bool> foreground_training_mask(const AnalyzedSong& song, std::size_t phrase, SweepVariant variant,
                                           const ExperimentConfig& config);

/// Builds a model from the notes where `mask` is true; gaps break the context.
ContextTreeModel train_on_mask(std::span<const Symbol> degrees, const std::vector<bool>& mask, int max_order);

/// Background model on every song; leave-one-out models are derived by removal.
ContextTreeModel train_background(const Corpus& corpus, int max_order);

SweepResult fg_bg_sweep(const Corpus& corpus, SweepVariant variant, const ExperimentConfig& config);

struct PositionStats {
  std::map<StructuralPosition, double> mean;
  std::map<StructuralPosition, long> count;
  double overall_mean = 0;
  long total = 0;
};

struct PositionalCrossEntropy {
  PositionStats background;
  PositionStats foreground;
};

PositionalCrossEntropy positional_cross_entropy(const Corpus& corpus, const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Pitch and vocabulary statistics
// ---------------------------------------------------------------------------

struct PositionPitchStats {
  std::array<long, 12> histogram{};
  long total = 0;
  double entropy_bits = 0;
  double tonic_probability = 0;
};

/// Degree histograms at PhraseStart / PhraseMiddle / PhraseEnd of melodic phrases.
std::map<StructuralPosition, PositionPitchStats> phrase_position_pitch_stats(const Corpus& corpus);

/// Measures counted toward song length: inside melodic phrases, not empty,
/// and not mostly covered by a rest of `long_rest_measures` or more.
std::vector<bool> countable_measures(const AnalyzedSong& song, int long_rest_measures);

std::vector<std::vector<OnsetPattern>> song_onset_units(const Corpus& corpus, const ExperimentConfig& config);
std::vector<std::vector<OnsetPattern>> phrase_onset_units(const Corpus& corpus);
std::vector<std::vector<PitchPattern>> phrase_pitch_units(const Corpus& corpus);

struct VocabularyComparison {
  VocabularyCurve real;
  VocabularyCurve baseline;
};

/// Real curve plus a seeded i.i.d. baseline drawing `baseline_draws`
/// sequences of equal length per real unit from `dist`.
template <typename Pattern>
VocabularyComparison vocabulary_with_baseline(const std::vector<std::vector<Pattern>>& units,
                                              const PatternDistribution<Pattern>& dist, int min_samples,
                                              int length_bin, int draws, std::uint64_t seed) {
  VocabularyComparison out;
  out.real = vocabulary_curve(units, min_samples, length_bin);
  if (dist.empty()) return out;
  std::vector<std::vector<Pattern>> sampled;
  for (std::size_t i = 0; i < units.size(); ++i) {
    auto drawn = sample_baseline_phrases(dist, static_cast<int>(units[i].size()), draws, seed + i * 0x9E3779B97F4A7C15ull);
    sampled.insert(sampled.end(), drawn.begin(), drawn.end());
  }
  out.baseline = vocabulary_curve(sampled, min_samples * draws, length_bin);
  return out;
}

VocabularyComparison song_vocabulary_curve(const Corpus& corpus, const PatternDistribution<OnsetPattern>& dist,
                                           const ExperimentConfig& config);

struct RhythmFormStats {
  long phrases = 0;
  double all_same_fraction = 0;
  double listed_form_fraction = 0;
  std::map<std::string, long> forms;
};

RhythmFormStats rhythm_form_stats(const Corpus& corpus);

/// Distinct half-note onset patterns over all non-empty measures of the corpus.
int distinct_onset_patterns(const Corpus& corpus);

/// Distinct-pattern count per melodic phrase (onset or pitch patterns).
std::vector<double> phrase_distinct_counts(const Corpus& corpus, bool pitch);

}  // namespace repstruct
