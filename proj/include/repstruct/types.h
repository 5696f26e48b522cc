// Core value types shared by every analysis: quantized melodies, keys and phrase labels.

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace repstruct {

/// Sixteenth-note ticks. All timing is on the quantized grid.
using Tick = std::int64_t;

/// Discrete symbol fed to the sequence models (scale degree, pattern id, ...).
using Symbol = std::uint16_t;

inline constexpr Tick kTicksPerMeasure = 16;  // 4/4 only
inline constexpr Tick kTicksPerHalfNote = 8;
inline constexpr int kPitchClasses = 12;

struct NoteEvent {
  Tick onset = 0;
  Tick duration = 1;
  int pitch = 60;

  Tick end() const { return onset + duration; }
  friend bool operator==(const NoteEvent&, const NoteEvent&) = default;
};

enum class Mode { kMajor, kMinor };

struct Key {
  int tonic_pc = 0;
  Mode mode = Mode::kMajor;
  friend bool operator==(const Key&, const Key&) = default;
};

/// Canonical monophonic melody. `key` is empty until notation supplies it or
/// resolve_tonic() estimates it.
struct Song {
  std::string id;
  std::vector<NoteEvent> notes;
  int num_measures = 1;
  std::optional<Key> key;

  Tick length_ticks() const { return num_measures * kTicksPerMeasure; }
  friend bool operator==(const Song&, const Song&) = default;
};

struct PhraseLabel {
  char letter = 'A';
  int length_measures = 1;
  int start_measure = 0;

  /// Uppercase letters mark melodic phrases.
  bool melodic() const { return letter >= 'A' && letter <= 'Z'; }
  int end_measure() const { return start_measure + length_measures; }
  friend bool operator==(const PhraseLabel&, const PhraseLabel&) = default;
};

struct SongStructure {
  std::string song_id;
  std::vector<PhraseLabel> labels;

  int total_measures() const {
    return labels.empty() ? 0 : labels.back().end_measure();
  }
  friend bool operator==(const SongStructure&, const SongStructure&) = default;
};

std::string to_string(Mode mode);

}  // namespace repstruct
