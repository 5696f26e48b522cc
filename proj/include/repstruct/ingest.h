// Parsing of Standard MIDI Files, MusicXML and phrase-label strings into the
// canonical quantized melody representation.

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "repstruct/types.h"

namespace repstruct {

// ---------------------------------------------------------------------------
// Quantization
// ---------------------------------------------------------------------------

/// Rounds a raw tick position to the sixteenth grid, halves rounding up.
/// `ticks_per_quarter` is the source resolution (PPQ or MusicXML divisions).
Tick quantize_to_sixteenths(std::int64_t raw_ticks, std::int64_t ticks_per_quarter);

/// A note position in source resolution, before quantization.
struct RawNote {
  std::int64_t start = 0;
  std::int64_t end = 0;
  int pitch = 60;
};

/// Quantizes raw notes and forces monophony: simultaneous onsets keep the
/// highest pitch, an overlapped note is truncated at the next onset and
/// zero-length results are clamped to one sixteenth.
std::vector<NoteEvent> quantize_melody(std::vector<RawNote> raw, std::int64_t ticks_per_quarter);

/// Number of measures needed to hold every note (at least one).
int measures_spanned(std::span<const NoteEvent> notes);

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

struct MidiOptions {
  std::string track_hint = "MELODY";
  /// Tracks below this note count are ignored by the mean-pitch fallback,
  /// unless no track reaches it.
  int min_fallback_notes = 8;
};

Song parse_midi(std::span<const std::uint8_t> bytes, const MidiOptions& options = {},
                std::string id = {});

Song parse_musicxml(std::string_view xml, std::string id = {});

// ---------------------------------------------------------------------------
// Key resolution
// ---------------------------------------------------------------------------

/// Krumhansl-Kessler probe-tone profiles, tonic first.
extern const std::array<double, 12> kMajorKeyProfile;
extern const std::array<double, 12> kMinorKeyProfile;

/// Duration-weighted pitch-class histogram.
std::array<double, 12> pitch_class_histogram(std::span<const NoteEvent> notes);

/// Correlation of a histogram against all 24 rotated key profiles.
/// Index = tonic_pc * 2 + (minor ? 1 : 0). Zero-variance input yields zeros.
std::array<double, 24> key_correlations(const std::array<double, 12>& histogram);

/// Argmax key; ties go to the lower pitch class, then major before minor.
Key best_key(const std::array<double, 24>& correlations);

/// Notated key when present, otherwise the Krumhansl-Schmuckler estimate.
Key resolve_tonic(const Song& song);

/// Pitch class relative to the tonic, one symbol per note.
std::vector<Symbol> to_degree_sequence(const Song& song);

// ---------------------------------------------------------------------------
// Phrase labels
// ---------------------------------------------------------------------------

/// Letters reserved for phrases that do not repeat.
constexpr bool is_unrepeated_marker(char letter) { return letter == 'X' || letter == 'x'; }

/// Parses a "i4A8A8B8o4"-style string. When `num_measures` is given, the
/// labels must tile exactly that many measures.
SongStructure parse_labels(std::string_view text, std::optional<int> num_measures = std::nullopt,
                           std::string song_id = {});
SongStructure parse_labels(std::string_view text, const Song& song);

std::string render_labels(const SongStructure& structure);

/// Reads "<song_id>\t<labels>" lines. Blank lines and '#' comments are skipped.
std::vector<std::pair<std::string, std::string>> parse_label_file(std::string_view text);

// ---------------------------------------------------------------------------
// Canonical JSON
// ---------------------------------------------------------------------------

/// {id, tonic_pc, mode, num_measures, notes:[[onset,duration,pitch],...]}.
/// The song key must be resolved.
nlohmann::ordered_json song_to_json(const Song& song);
Song song_from_json(const nlohmann::json& j);

/// Checks the Song invariants: sorted distinct onsets, positive durations,
/// MIDI pitch range and notes inside the measure count.
void validate_song(const Song& song);

}  // namespace repstruct
