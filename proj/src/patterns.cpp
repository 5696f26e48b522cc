#include "repstruct/patterns.h"

#include <cmath>
#include <numeric>

#include "repstruct/ingest.h"

namespace repstruct {

std::string OnsetPattern::to_string() const {
  std::string s(kSlots, '.');
  for (int i = 0; i < kSlots; ++i) {
    if (has_onset(i)) s[static_cast<std::size_t>(i)] = 'x';
  }
  return s;
}

OnsetPattern OnsetPattern::parse(std::string_view text) {
  if (text.size() != kSlots || text[0] != 'x') throw ParseError("onset pattern must be 8 slots starting with 'x'");
  std::uint8_t mask = 0;
  for (int i = 0; i < kSlots; ++i) {
    char c = text[static_cast<std::size_t>(i)];
    if (c == 'x') {
      mask = static_cast<std::uint8_t>(mask | (1u << i));
    } else if (c != '.') {
      throw ParseError("onset pattern slots must be 'x' or '.'", static_cast<std::size_t>(i));
    }
  }
  return OnsetPattern(mask);
}

std::string PitchPattern::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    if (i > 0) s += '-';
    s += degrees[i] == kRestSymbol ? std::string("r") : std::to_string(degrees[i]);
  }
  return s;
}

PitchPattern PitchPattern::parse(std::string_view text) {
  PitchPattern p;
  if (text.empty()) throw ParseError("empty pitch pattern");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto dash = text.find('-', pos);
    auto field = text.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos);
    if (field == "r") {
      p.degrees.push_back(kRestSymbol);
    } else {
      if (field.empty() || field.size() > 2) throw ParseError("bad pitch pattern degree", pos);
      int v = 0;
      for (char c : field) {
        if (c < '0' || c > '9') throw ParseError("bad pitch pattern degree", pos);
        v = v * 10 + (c - '0');
      }
      if (v >= kPitchClasses) throw ParseError("pitch pattern degree out of range", pos);
      p.degrees.push_back(static_cast<Symbol>(v));
    }
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  return p;
}

namespace {

void check_window_range(Tick start, Tick end) {
  if (start < 0 || end < start || start % kTicksPerHalfNote != 0 || end % kTicksPerHalfNote != 0) {
    throw ParameterError("pattern range [" + std::to_string(start) + ", " + std::to_string(end) +
                         ") is not aligned to half notes");
  }
}

auto first_onset_at_or_after(std::span<const NoteEvent> notes, Tick t) {
  return std::lower_bound(notes.begin(), notes.end(), t, [](const NoteEvent& n, Tick v) { return n.onset < v; });
}

}  // namespace

std::vector<OnsetPattern> encode_onset_patterns(std::span<const NoteEvent> notes, Tick start, Tick end) {
  check_window_range(start, end);
  std::vector<OnsetPattern> out;
  out.reserve(static_cast<std::size_t>((end - start) / kTicksPerHalfNote));
  auto it = first_onset_at_or_after(notes, start);
  for (Tick w = start; w < end; w += kTicksPerHalfNote) {
    std::uint8_t mask = 1;
    while (it != notes.end() && it->onset < w + kTicksPerHalfNote) {
      mask = static_cast<std::uint8_t>(mask | (1u << (it->onset - w)));
      ++it;
    }
    out.emplace_back(mask);
  }
  return out;
}

std::vector<PitchPattern> encode_pitch_patterns(std::span<const NoteEvent> notes, std::span<const Symbol> degrees,
                                                Tick start, Tick end) {
  check_window_range(start, end);
  if (degrees.size() != notes.size()) throw ParameterError("degree sequence does not match the notes");
  std::vector<PitchPattern> out;
  out.reserve(static_cast<std::size_t>((end - start) / kTicksPerHalfNote));
  for (Tick w = start; w < end; w += kTicksPerHalfNote) {
    PitchPattern p;
    auto it = first_onset_at_or_after(notes, w);
    // Slot 0: the note sounding at the window start, possibly held over.
    if (it != notes.end() && it->onset == w) {
      p.degrees.push_back(degrees[static_cast<std::size_t>(it - notes.begin())]);
      ++it;
    } else if (it != notes.begin() && std::prev(it)->end() > w) {
      p.degrees.push_back(degrees[static_cast<std::size_t>(std::prev(it) - notes.begin())]);
    } else {
      p.degrees.push_back(kRestSymbol);
    }
    for (; it != notes.end() && it->onset < w + kTicksPerHalfNote; ++it) {
      p.degrees.push_back(degrees[static_cast<std::size_t>(it - notes.begin())]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PitchPattern> encode_pitch_patterns(const Song& song, Tick start, Tick end) {
  auto degrees = to_degree_sequence(song);
  return encode_pitch_patterns(song.notes, degrees, start, end);
}

std::vector<bool> empty_measures(const Song& song) {
  std::vector<bool> empty(static_cast<std::size_t>(song.num_measures), true);
  for (const NoteEvent& n : song.notes) {
    Tick first = n.onset / kTicksPerMeasure;
    Tick last = (n.end() - 1) / kTicksPerMeasure;
    for (Tick m = first; m <= last && m < song.num_measures; ++m) empty[static_cast<std::size_t>(m)] = false;
  }
  return empty;
}

namespace {

template <typename Encode>
auto melodic_windows(const Song& song, int first_measure, int last_measure, Encode encode) {
  auto empty = empty_measures(song);
  decltype(encode(Tick{0}, Tick{0})) out;
  first_measure = std::max(first_measure, 0);
  last_measure = std::min(last_measure, song.num_measures);
  for (int m = first_measure; m < last_measure; ++m) {
    if (empty[static_cast<std::size_t>(m)]) continue;
    auto part = encode(m * kTicksPerMeasure, (m + 1) * kTicksPerMeasure);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace

std::vector<OnsetPattern> melodic_onset_patterns(const Song& song, int first_measure, int last_measure) {
  return melodic_windows(song, first_measure, last_measure,
                         [&](Tick a, Tick b) { return encode_onset_patterns(song.notes, a, b); });
}

std::vector<PitchPattern> melodic_pitch_patterns(const Song& song, int first_measure, int last_measure) {
  auto degrees = to_degree_sequence(song);
  return melodic_windows(song, first_measure, last_measure,
                         [&](Tick a, Tick b) { return encode_pitch_patterns(song.notes, degrees, a, b); });
}

double expected_distinct(std::span<const double> probs, int length) {
  double e = 0;
  for (double p : probs) e += 1.0 - std::pow(1.0 - p, length);
  return e;
}

RhythmClass classify_form(std::string_view form) {
  if (!form.empty() && std::all_of(form.begin(), form.end(), [&](char c) { return c == form[0]; })) {
    return RhythmClass::kAllSame;
  }
  for (std::string_view listed : {"abab", "aabbaabb", "aba", "abababa"}) {
    if (form == listed) return RhythmClass::kListedForm;
  }
  return RhythmClass::kOther;
}

RhythmForm rhythm_form(const Song& song, int start_measure, int length_measures) {
  if (length_measures < 1) throw ParameterError("rhythm form needs at least one measure");
  auto patterns = encode_onset_patterns(song.notes, start_measure * kTicksPerMeasure,
                                        (start_measure + length_measures) * kTicksPerMeasure);
  std::vector<int> keys;
  for (std::size_t i = 0; i + 1 < patterns.size(); i += 2) {
    keys.push_back(patterns[i].mask() << 8 | patterns[i + 1].mask());
  }
  RhythmForm f;
  f.form = canonical_form<int>(keys);
  f.classification = classify_form(f.form);
  return f;
}

std::string to_string(RhythmClass c) {
  switch (c) {
    case RhythmClass::kAllSame:
      return "all_same";
    case RhythmClass::kListedForm:
      return "listed_form";
    case RhythmClass::kOther:
      break;
  }
  return "other";
}

namespace {

// Counts of rank arrangements giving each U, for samples of size n1 and n2.
std::vector<double> exact_u_counts(int n1, int n2) {
  // table[i][j] over u, built up from empty samples.
  std::vector<std::vector<std::vector<double>>> table(
      static_cast<std::size_t>(n1 + 1),
      std::vector<std::vector<double>>(static_cast<std::size_t>(n2 + 1)));
  for (int i = 0; i <= n1; ++i) {
    for (int j = 0; j <= n2; ++j) {
      auto& cell = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      cell.assign(static_cast<std::size_t>(i * j + 1), 0.0);
      if (i == 0 || j == 0) {
        cell[0] = 1.0;
        continue;
      }
      // Largest observation is from sample one (adds j to U) or from sample two.
      const auto& from_one = table[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j)];
      const auto& from_two = table[static_cast<std::size_t>(i)][static_cast<std::size_t>(j - 1)];
      for (std::size_t u = 0; u < from_one.size(); ++u) cell[u + static_cast<std::size_t>(j)] += from_one[u];
      for (std::size_t u = 0; u < from_two.size(); ++u) cell[u] += from_two[u];
    }
  }
  return table[static_cast<std::size_t>(n1)][static_cast<std::size_t>(n2)];
}

}  // namespace

SignificanceResult count_significance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ParameterError("significance test needs two non-empty samples");
  const auto n1 = static_cast<double>(a.size());
  const auto n2 = static_cast<double>(b.size());
  const std::size_t total = a.size() + b.size();

  std::vector<std::pair<double, int>> pooled;
  pooled.reserve(total);
  for (double v : a) pooled.emplace_back(v, 0);
  for (double v : b) pooled.emplace_back(v, 1);
  std::sort(pooled.begin(), pooled.end());

  double rank_sum_a = 0;
  double tie_term = 0;
  bool ties = false;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && pooled[j].first == pooled[i].first) ++j;
    double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    auto t = static_cast<double>(j - i);
    if (t > 1) ties = true;
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 0) rank_sum_a += avg_rank;
    }
    i = j;
  }

  SignificanceResult r;
  r.u_statistic = rank_sum_a - n1 * (n1 + 1) / 2.0;
  const double mean_u = n1 * n2 / 2.0;

  if (!ties && a.size() + b.size() <= 40 && a.size() * b.size() <= 400) {
    auto counts = exact_u_counts(static_cast<int>(a.size()), static_cast<int>(b.size()));
    double all = std::accumulate(counts.begin(), counts.end(), 0.0);
    auto u = static_cast<std::size_t>(std::llround(r.u_statistic));
    double lower = 0, upper = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      if (k <= u) lower += counts[k];
      if (k >= u) upper += counts[k];
    }
    r.p_value = std::min(1.0, 2.0 * std::min(lower, upper) / all);
    r.exact = true;
    return r;
  }

  const double n = n1 + n2;
  const double variance = n1 * n2 / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (variance <= 0) {
    r.p_value = 1.0;
    return r;
  }
  const double deviation = std::abs(r.u_statistic - mean_u) - 0.5;
  if (deviation <= 0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = deviation / std::sqrt(variance);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

}  // namespace repstruct
