// Phrase extraction by approximate repetition, section derivation and
// song-level repetition statistics.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "repstruct/types.h"

namespace repstruct {

// ---------------------------------------------------------------------------
// Measure similarity
// ---------------------------------------------------------------------------

/// One onset inside a measure: sixteenth slot (0-15) and scale degree.
struct MeasureEvent {
  int slot = 0;
  Symbol degree = 0;
  friend bool operator==(const MeasureEvent&, const MeasureEvent&) = default;
};

using MeasureToken = std::vector<MeasureEvent>;

/// Per-measure onset/degree tokens. The song key must be resolved.
std::vector<MeasureToken> measure_tokens(const Song& song);

/// Levenshtein distance between two measures' event lists, divided by the
/// longer list length. 0 for identical (including two empty measures), 1 max.
double measure_distance(const MeasureToken& a, const MeasureToken& b);

/// 1 - (edit distance over measures / segment length), where substituting a
/// measure costs its measure_distance and inserting or deleting one costs 1.
double segment_similarity(std::span<const MeasureToken> a, std::span<const MeasureToken> b);

// ---------------------------------------------------------------------------
// Phrases and sections
// ---------------------------------------------------------------------------

struct ExtractOptions {
  int min_len = 4;
  int max_len = 16;
  double sim_threshold = 0.75;
};

/// Greedy longest-match-first tiling into phrases whose lengths are multiples
/// of `min_len`, followed by letter assignment: phrases of equal length with
/// similarity >= threshold share a letter (transitively). Unmatched melodic
/// phrases get X, Y, Z and then X again; near-empty stretches become
/// non-melodic 'i' (leading), 'o' (trailing) or 'x'.
SongStructure extract_phrases(const Song& song, const ExtractOptions& options = {});

/// True when the phrase at `index` does not repeat: its letter is an
/// unrepeated marker or occurs only once in the structure.
bool is_unique_phrase(const SongStructure& structure, std::size_t index);

/// True when an earlier phrase carries the same letter (unrepeated markers never repeat).
bool repeats_earlier(const SongStructure& structure, std::size_t index);

struct Section {
  int start_measure = 0;
  int length_measures = 0;
  std::string phrase_letters;
  std::size_t first_phrase = 0;  // index into SongStructure::labels
  std::size_t last_phrase = 0;
  friend bool operator==(const Section&, const Section&) = default;
};

/// Maximal runs of melodic, non-unique phrases.
std::vector<Section> derive_sections(const SongStructure& structure);

// ---------------------------------------------------------------------------
// Repetition over time
// ---------------------------------------------------------------------------

struct RepetitionTimeline {
  int num_bins = 0;
  std::vector<double> fraction_repeating;
};

/// Per normalized-time bin, the corpus mean of the share of that bin covered
/// by measures in a phrase whose letter occurred earlier in the song.
RepetitionTimeline repetition_timeline(std::span<const SongStructure> corpus, int num_bins);

struct RepeatLatencyStats {
  double immediate_repeat_fraction = 0;
  double within_quarter_fraction = 0;
  int repeated_phrases = 0;  // melodic letters with at least two occurrences
};

/// Over every repeated melodic letter: whether its second occurrence directly
/// follows the first, and whether the gap between the end of the first and
/// the start of the second is at most a quarter of the song.
RepeatLatencyStats repeat_latency_stats(std::span<const SongStructure> corpus);

/// Share of the song made of first occurrences: first occurrence of each
/// melodic letter, all unrepeated phrases and every non-melodic phrase
/// except repeats of an earlier non-melodic letter.
double novelty_ratio(const SongStructure& structure);

}  // namespace repstruct
