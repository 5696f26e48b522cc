// Half-note onset and pitch patterns, vocabulary statistics, seeded random
// baselines, measure-level rhythm forms and a rank-sum significance test.

#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "repstruct/error.h"
#include "repstruct/types.h"

namespace repstruct {

// ---------------------------------------------------------------------------
// Patterns
// ---------------------------------------------------------------------------

/// Onsets in the eight sixteenth slots of a half-note window. Slot 0 is always
/// set, so there are exactly 128 values.
class OnsetPattern {
 public:
  static constexpr int kSlots = 8;
  static constexpr int kCount = 128;

  constexpr OnsetPattern() = default;
  /// Slot 0 is forced on.
  constexpr explicit OnsetPattern(std::uint8_t mask) : mask_(static_cast<std::uint8_t>(mask | 1u)) {}

  constexpr std::uint8_t mask() const { return mask_; }
  constexpr bool has_onset(int slot) const { return ((mask_ >> slot) & 1u) != 0; }
  constexpr int onset_count() const { return std::popcount(mask_); }
  /// Dense index in [0, 128).
  constexpr int index() const { return mask_ >> 1; }

  /// Slot-ordered string, 'x' for onset and '.' otherwise, e.g. "x...x...".
  std::string to_string() const;
  static OnsetPattern parse(std::string_view text);

  friend constexpr auto operator<=>(const OnsetPattern&, const OnsetPattern&) = default;

 private:
  std::uint8_t mask_ = 1;
};

/// Degree sounding at a pattern slot when nothing sounds.
inline constexpr Symbol kRestSymbol = 12;

/// Scale degrees at the onset slots of a half-note window. Slot 0 carries the
/// sounding (possibly held-over) pitch.
struct PitchPattern {
  std::vector<Symbol> degrees;

  /// Dash-separated degrees, 'r' for a rest, e.g. "0-4-7".
  std::string to_string() const;
  static PitchPattern parse(std::string_view text);

  friend auto operator<=>(const PitchPattern&, const PitchPattern&) = default;
};

/// One pattern per half note of [start, end). Both ends must sit on half-note boundaries.
std::vector<OnsetPattern> encode_onset_patterns(std::span<const NoteEvent> notes, Tick start, Tick end);

/// Degrees are taken per note from `degrees` (parallel to `notes`).
std::vector<PitchPattern> encode_pitch_patterns(std::span<const NoteEvent> notes, std::span<const Symbol> degrees,
                                                Tick start, Tick end);
std::vector<PitchPattern> encode_pitch_patterns(const Song& song, Tick start, Tick end);

/// True for measures in which no note sounds at all.
std::vector<bool> empty_measures(const Song& song);

/// Onset patterns of measures [first, last), skipping measures with no sounding note.
std::vector<OnsetPattern> melodic_onset_patterns(const Song& song, int first_measure, int last_measure);
std::vector<PitchPattern> melodic_pitch_patterns(const Song& song, int first_measure, int last_measure);

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

struct VocabularyCount {
  int distinct = 0;
  int unique = 0;  // patterns occurring exactly once
};

template <typename Pattern>
VocabularyCount count_vocabulary(std::span<const Pattern> sequence) {
  std::map<Pattern, int> occurrences;
  for (const Pattern& p : sequence) ++occurrences[p];
  VocabularyCount c;
  c.distinct = static_cast<int>(occurrences.size());
  c.unique = static_cast<int>(std::count_if(occurrences.begin(), occurrences.end(),
                                            [](const auto& kv) { return kv.second == 1; }));
  return c;
}

struct VocabularyPoint {
  int length = 0;
  double mean_distinct = 0;
  double mean_unique = 0;
  int n_samples = 0;
};

struct VocabularyCurve {
  std::vector<VocabularyPoint> points;
};

/// Groups sequences by length (floored to a multiple of `length_bin`) and
/// reports mean distinct / unique counts for groups with at least
/// `min_samples` members, in ascending length order.
template <typename Pattern>
VocabularyCurve vocabulary_curve(const std::vector<std::vector<Pattern>>& units, int min_samples = 1,
                                 int length_bin = 1) {
  if (length_bin < 1) throw ParameterError("length bin must be positive");
  struct Acc {
    double distinct = 0, unique = 0;
    int n = 0;
  };
  std::map<int, Acc> by_length;
  for (const auto& unit : units) {
    int len = static_cast<int>(unit.size()) / length_bin * length_bin;
    VocabularyCount c = count_vocabulary<Pattern>(unit);
    Acc& a = by_length[len];
    a.distinct += c.distinct;
    a.unique += c.unique;
    ++a.n;
  }
  VocabularyCurve curve;
  for (const auto& [len, a] : by_length) {
    if (a.n < std::max(1, min_samples)) continue;
    curve.points.push_back({len, a.distinct / a.n, a.unique / a.n, a.n});
  }
  return curve;
}

/// Empirical distribution over observed patterns, sampled by inverse CDF from
/// a 64-bit Mersenne Twister so draws are identical on every platform.
template <typename Pattern>
class PatternDistribution {
 public:
  PatternDistribution() = default;

  static PatternDistribution from_counts(const std::map<Pattern, double>& counts) {
    PatternDistribution d;
    double total = 0;
    for (const auto& [p, c] : counts) {
      if (c < 0) throw ParameterError("negative pattern weight");
      if (c == 0) continue;
      d.support_.push_back(p);
      total += c;
      d.cumulative_.push_back(total);
    }
    for (double& c : d.cumulative_) c /= total;
    if (!d.cumulative_.empty()) d.cumulative_.back() = 1.0;
    return d;
  }

  template <typename Range>
  static PatternDistribution from_sequences(const Range& sequences) {
    std::map<Pattern, double> counts;
    for (const auto& seq : sequences) {
      for (const Pattern& p : seq) counts[p] += 1.0;
    }
    return from_counts(counts);
  }

  bool empty() const { return support_.empty(); }
  const std::vector<Pattern>& support() const { return support_; }
  double probability(std::size_t i) const { return cumulative_[i] - (i == 0 ? 0.0 : cumulative_[i - 1]); }

  /// `u` in [0, 1).
  const Pattern& at_quantile(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return support_[static_cast<std::size_t>(it - cumulative_.begin())];
  }

 private:
  std::vector<Pattern> support_;
  std::vector<double> cumulative_;
};

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// `count` sequences of `length` i.i.d. draws; identical output for identical seeds.
template <typename Pattern>
std::vector<std::vector<Pattern>> sample_baseline_phrases(const PatternDistribution<Pattern>& dist, int length,
                                                          int count, std::uint64_t seed) {
  if (dist.empty()) throw ParameterError("cannot sample from an empty pattern distribution");
  if (count < 1 || length < 0) throw ParameterError("baseline needs count >= 1 and length >= 0");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Pattern>> out(static_cast<std::size_t>(count));
  for (auto& seq : out) {
    seq.reserve(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) seq.push_back(dist.at_quantile(unit_uniform(rng)));
  }
  return out;
}

/// Closed-form expected distinct count of `length` i.i.d. draws from `probs`.
double expected_distinct(std::span<const double> probs, int length);

// ---------------------------------------------------------------------------
// Rhythm forms
// ---------------------------------------------------------------------------

enum class RhythmClass { kAllSame, kListedForm, kOther };

struct RhythmForm {
  std::string form;  // e.g. "abab"
  RhythmClass classification = RhythmClass::kOther;
};

/// Letters by first appearance: equal keys share a letter, new keys get the next letter.
template <typename Key>
std::string canonical_form(std::span<const Key> keys) {
  std::vector<Key> seen;
  std::string form;
  for (const Key& k : keys) {
    auto it = std::find(seen.begin(), seen.end(), k);
    if (it == seen.end()) {
      seen.push_back(k);
      it = seen.end() - 1;
    }
    auto idx = it - seen.begin();
    form += idx < 26 ? static_cast<char>('a' + idx) : '?';
  }
  return form;
}

RhythmClass classify_form(std::string_view form);

/// Form over the measures of a phrase, each measure keyed by its pair of onset patterns.
RhythmForm rhythm_form(const Song& song, int start_measure, int length_measures);

std::string to_string(RhythmClass c);

// ---------------------------------------------------------------------------
// Significance
// ---------------------------------------------------------------------------

struct SignificanceResult {
  double u_statistic = 0;  // U of the first sample
  double p_value = 1;
  bool exact = false;
};

/// Two-sided Mann-Whitney U test. Exact null distribution for small tie-free
/// samples, otherwise the tie-corrected normal approximation with continuity
/// correction. Samples with no rank variation give p = 1.
SignificanceResult count_significance(std::span<const double> a, std::span<const double> b);

}  // namespace repstruct
