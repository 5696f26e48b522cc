#include <algorithm>

#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {

Tick quantize_to_sixteenths(std::int64_t raw_ticks, std::int64_t ticks_per_quarter) {
  if (ticks_per_quarter <= 0) throw ParameterError("ticks per quarter must be positive");
  if (raw_ticks < 0) throw ParameterError("negative tick position");
  // raw * 4 / tpq sixteenths, rounded to nearest with halves up.
  return (raw_ticks * 8 + ticks_per_quarter) / (2 * ticks_per_quarter);
}

std::vector<NoteEvent> quantize_melody(std::vector<RawNote> raw, std::int64_t ticks_per_quarter) {
  std::vector<NoteEvent> quantized;
  quantized.reserve(raw.size());
  for (const RawNote& r : raw) {
    Tick onset = quantize_to_sixteenths(r.start, ticks_per_quarter);
    Tick end = quantize_to_sixteenths(std::max(r.end, r.start), ticks_per_quarter);
    quantized.push_back({onset, std::max<Tick>(end - onset, 0), r.pitch});
  }
  std::stable_sort(quantized.begin(), quantized.end(), [](const NoteEvent& a, const NoteEvent& b) {
    if (a.onset != b.onset) return a.onset < b.onset;
    return a.pitch > b.pitch;
  });

  std::vector<NoteEvent> melody;
  melody.reserve(quantized.size());
  for (const NoteEvent& n : quantized) {
    if (!melody.empty() && melody.back().onset == n.onset) continue;  // lower pitch of a chord
    melody.push_back(n);
  }
  for (std::size_t i = 0; i < melody.size(); ++i) {
    if (i + 1 < melody.size()) {
      melody[i].duration = std::min(melody[i].duration, melody[i + 1].onset - melody[i].onset);
    }
    melody[i].duration = std::max<Tick>(melody[i].duration, 1);
  }
  return melody;
}

int measures_spanned(std::span<const NoteEvent> notes) {
  Tick last_end = 0;
  for (const NoteEvent& n : notes) last_end = std::max(last_end, n.end());
  return static_cast<int>(std::max<Tick>(1, (last_end + kTicksPerMeasure - 1) / kTicksPerMeasure));
}

}  // namespace repstruct
