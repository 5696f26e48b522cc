#include <cmath>

#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {

const std::array<double, 12> kMajorKeyProfile = {6.35, 2.23, 3.48, 2.33, 4.38, 4.09,
                                                 2.52, 5.19, 2.39, 3.66, 2.29, 2.88};
const std::array<double, 12> kMinorKeyProfile = {6.33, 2.68, 3.52, 5.38, 2.60, 3.53,
                                                 2.54, 4.75, 3.98, 2.69, 3.34, 3.17};

std::string to_string(Mode mode) { return mode == Mode::kMajor ? "major" : "minor"; }

std::array<double, 12> pitch_class_histogram(std::span<const NoteEvent> notes) {
  std::array<double, 12> h{};
  for (const NoteEvent& n : notes) h[static_cast<std::size_t>(n.pitch % 12)] += static_cast<double>(n.duration);
  return h;
}

namespace {

double pearson(const std::array<double, 12>& x, const std::array<double, 12>& profile, int tonic) {
  double mx = 0, my = 0;
  for (int i = 0; i < 12; ++i) {
    mx += x[i];
    my += profile[i];
  }
  mx /= 12;
  my /= 12;
  double sxy = 0, sxx = 0, syy = 0;
  for (int pc = 0; pc < 12; ++pc) {
    double dx = x[pc] - mx;
    double dy = profile[(pc - tonic + 12) % 12] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0 || syy <= 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

std::array<double, 24> key_correlations(const std::array<double, 12>& histogram) {
  std::array<double, 24> r{};
  for (int tonic = 0; tonic < 12; ++tonic) {
    r[tonic * 2] = pearson(histogram, kMajorKeyProfile, tonic);
    r[tonic * 2 + 1] = pearson(histogram, kMinorKeyProfile, tonic);
  }
  return r;
}

Key best_key(const std::array<double, 24>& correlations) {
  int best = 0;
  for (int i = 1; i < 24; ++i) {
    if (correlations[i] > correlations[best]) best = i;  // strict: earlier index wins ties
  }
  return {best / 2, best % 2 == 0 ? Mode::kMajor : Mode::kMinor};
}

Key resolve_tonic(const Song& song) {
  if (song.key) return *song.key;
  if (song.notes.empty()) throw RejectionError("cannot resolve the key of an empty melody");
  return best_key(key_correlations(pitch_class_histogram(song.notes)));
}

std::vector<Symbol> to_degree_sequence(const Song& song) {
  if (!song.key) throw ParameterError("song '" + song.id + "' has no resolved key");
  std::vector<Symbol> degrees;
  degrees.reserve(song.notes.size());
  for (const NoteEvent& n : song.notes) {
    degrees.push_back(static_cast<Symbol>(((n.pitch - song.key->tonic_pc) % 12 + 12) % 12));
  }
  return degrees;
}

}  // namespace repstruct
