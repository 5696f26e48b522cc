#include "repstruct/structure.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {

std::vector<MeasureToken> measure_tokens(const Song& song) {
  std::vector<MeasureToken> tokens(static_cast<std::size_t>(song.num_measures));
  auto degrees = to_degree_sequence(song);
  for (std::size_t i = 0; i < song.notes.size(); ++i) {
    auto m = static_cast<std::size_t>(song.notes[i].onset / kTicksPerMeasure);
    if (m >= tokens.size()) continue;
    tokens[m].push_back({static_cast<int>(song.notes[i].onset % kTicksPerMeasure), degrees[i]});
  }
  return tokens;
}

double measure_distance(const MeasureToken& a, const MeasureToken& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return static_cast<double>(row[b.size()]) / static_cast<double>(std::max(a.size(), b.size()));
}

namespace {

// Weighted edit distance over measures with a precomputed substitution table.
template <typename SubCost>
double weighted_edit(std::size_t n, std::size_t m, SubCost sub) {
  std::vector<double> row(m + 1);
  for (std::size_t j = 0; j <= m; ++j) row[j] = static_cast<double>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    double diag = row[0];
    row[0] = static_cast<double>(i);
    for (std::size_t j = 1; j <= m; ++j) {
      double up = row[j];
      row[j] = std::min({row[j] + 1.0, row[j - 1] + 1.0, diag + sub(i - 1, j - 1)});
      diag = up;
    }
  }
  return row[m];
}

}  // namespace

double segment_similarity(std::span<const MeasureToken> a, std::span<const MeasureToken> b) {
  std::size_t len = std::max(a.size(), b.size());
  if (len == 0) return 1.0;
  double d = weighted_edit(a.size(), b.size(),
                           [&](std::size_t i, std::size_t j) { return measure_distance(a[i], b[j]); });
  return 1.0 - d / static_cast<double>(len);
}

namespace {

class SimilarityTable {
 public:
  explicit SimilarityTable(const std::vector<MeasureToken>& tokens) : n_(tokens.size()), dist_(n_ * n_) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i; j < n_; ++j) {
        double d = measure_distance(tokens[i], tokens[j]);
        dist_[i * n_ + j] = d;
        dist_[j * n_ + i] = d;
      }
    }
  }

  double similarity(std::size_t p, std::size_t q, std::size_t len) const {
    if (len == 0) return 1.0;
    double d = weighted_edit(len, len, [&](std::size_t i, std::size_t j) { return dist_[(p + i) * n_ + (q + j)]; });
    return 1.0 - d / static_cast<double>(len);
  }

 private:
  std::size_t n_;
  std::vector<double> dist_;
};

struct Segment {
  int start = 0;
  int length = 0;
  bool melodic = true;
};

bool near_empty(const std::vector<MeasureToken>& tokens, int start, int length) {
  int filled = 0;
  for (int m = start; m < start + length; ++m) filled += tokens[static_cast<std::size_t>(m)].empty() ? 0 : 1;
  return 2 * filled < length;
}

std::vector<Segment> tile(const std::vector<MeasureToken>& tokens, const SimilarityTable& sim,
                          const ExtractOptions& opt) {
  const int n = static_cast<int>(tokens.size());
  auto empty_run = [&](int from) {
    int r = from;
    while (r < n && tokens[static_cast<std::size_t>(r)].empty()) ++r;
    return r - from;
  };

  std::vector<Segment> segments;
  int p = 0;
  while (p < n) {
    int run = empty_run(p);
    // Silence at either end, or two or more silent measures inside, is its own phrase.
    if (run > 0 && (p == 0 || p + run == n || run >= 2)) {
      segments.push_back({p, run, false});
      p += run;
      continue;
    }
    int chosen = 0;
    for (int len = (opt.max_len / opt.min_len) * opt.min_len; len >= opt.min_len && chosen == 0; len -= opt.min_len) {
      if (p + len > n) continue;
      for (int q = 0; q + len <= n; ++q) {
        if (q + len > p && q < p + len) continue;  // overlapping
        if (sim.similarity(static_cast<std::size_t>(p), static_cast<std::size_t>(q), static_cast<std::size_t>(len)) >=
            opt.sim_threshold) {
          chosen = len;
          break;
        }
      }
    }
    if (chosen == 0) chosen = std::min(opt.min_len, n - p);
    segments.push_back({p, chosen, true});
    p += chosen;
  }
  for (Segment& s : segments) {
    if (s.melodic && near_empty(tokens, s.start, s.length)) s.melodic = false;
  }
  return segments;
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

}  // namespace

SongStructure extract_phrases(const Song& song, const ExtractOptions& options) {
  if (options.min_len < 1 || options.max_len < options.min_len) {
    throw ParameterError("phrase lengths must satisfy 1 <= min_len <= max_len");
  }
  if (!(options.sim_threshold >= 0.0 && options.sim_threshold <= 1.0)) {
    throw ParameterError("similarity threshold must lie in [0, 1]");
  }
  Song keyed = song;
  if (!keyed.key && !keyed.notes.empty()) keyed.key = resolve_tonic(keyed);
  if (!keyed.key) keyed.key = Key{};

  SongStructure out;
  out.song_id = song.id;
  const auto tokens = measure_tokens(keyed);
  const int n = song.num_measures;

  if (n < options.min_len) {
    bool melodic = !near_empty(tokens, 0, n);
    out.labels.push_back({melodic ? 'X' : 'i', n, 0});
    return out;
  }

  SimilarityTable sim(tokens);
  std::vector<Segment> segments = tile(tokens, sim, options);

  DisjointSets groups(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (!segments[i].melodic) continue;
    for (std::size_t j = i + 1; j < segments.size(); ++j) {
      if (!segments[j].melodic || segments[j].length != segments[i].length) continue;
      if (sim.similarity(static_cast<std::size_t>(segments[i].start), static_cast<std::size_t>(segments[j].start),
                         static_cast<std::size_t>(segments[i].length)) >= options.sim_threshold) {
        groups.unite(i, j);
      }
    }
  }
  std::map<std::size_t, int> group_size;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (segments[i].melodic) ++group_size[groups.find(i)];
  }

  static const std::string kRepeatedLetters = "ABCDEFGHIJKLMNOPQRSTUVW";
  static const std::string kUniqueLetters = "XYZ";
  std::map<std::size_t, char> letter_of;
  std::size_t next_repeated = 0;
  std::size_t next_unique = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    char letter;
    if (!s.melodic) {
      letter = s.start == 0 ? 'i' : (s.start + s.length == n ? 'o' : 'x');
    } else if (group_size[groups.find(i)] == 1) {
      letter = next_unique < kUniqueLetters.size() ? kUniqueLetters[next_unique++] : 'X';
    } else {
      auto root = groups.find(i);
      auto it = letter_of.find(root);
      if (it == letter_of.end()) {
        if (next_repeated >= kRepeatedLetters.size()) {
          throw RejectionError("song '" + song.id + "' has more repeated phrase groups than letters");
        }
        it = letter_of.emplace(root, kRepeatedLetters[next_repeated++]).first;
      }
      letter = it->second;
    }
    out.labels.push_back({letter, s.length, s.start});
  }
  return out;
}

bool is_unique_phrase(const SongStructure& structure, std::size_t index) {
  char letter = structure.labels.at(index).letter;
  if (is_unrepeated_marker(letter)) return true;
  return std::count_if(structure.labels.begin(), structure.labels.end(),
                       [&](const PhraseLabel& l) { return l.letter == letter; }) == 1;
}

bool repeats_earlier(const SongStructure& structure, std::size_t index) {
  char letter = structure.labels.at(index).letter;
  if (is_unrepeated_marker(letter)) return false;
  for (std::size_t i = 0; i < index; ++i) {
    if (structure.labels[i].letter == letter) return true;
  }
  return false;
}

std::vector<Section> derive_sections(const SongStructure& structure) {
  std::vector<Section> sections;
  std::optional<Section> current;
  for (std::size_t i = 0; i < structure.labels.size(); ++i) {
    const PhraseLabel& l = structure.labels[i];
    if (l.melodic() && !is_unique_phrase(structure, i)) {
      if (!current) current = Section{l.start_measure, 0, "", i, i};
      current->length_measures += l.length_measures;
      current->phrase_letters += l.letter;
      current->last_phrase = i;
    } else if (current) {
      sections.push_back(*current);
      current.reset();
    }
  }
  if (current) sections.push_back(*current);
  return sections;
}

RepetitionTimeline repetition_timeline(std::span<const SongStructure> corpus, int num_bins) {
  if (num_bins < 2) throw ParameterError("repetition timeline needs at least 2 bins");
  if (corpus.empty()) throw ParameterError("repetition timeline needs at least one structure");
  RepetitionTimeline t;
  t.num_bins = num_bins;
  t.fraction_repeating.assign(static_cast<std::size_t>(num_bins), 0.0);
  for (const SongStructure& s : corpus) {
    const int n = s.total_measures();
    std::vector<double> repeating(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
      if (!repeats_earlier(s, i)) continue;
      for (int m = s.labels[i].start_measure; m < s.labels[i].end_measure(); ++m) repeating[static_cast<std::size_t>(m)] = 1.0;
    }
    // Bin b covers [b/B, (b+1)/B); measure m covers [m/n, (m+1)/n).
    for (int b = 0; b < num_bins; ++b) {
      double lo = static_cast<double>(b) / num_bins;
      double hi = static_cast<double>(b + 1) / num_bins;
      double covered = 0.0;
      int first = static_cast<int>(lo * n);
      for (int m = std::max(0, first); m < n; ++m) {
        double mlo = static_cast<double>(m) / n;
        double mhi = static_cast<double>(m + 1) / n;
        if (mlo >= hi) break;
        covered += repeating[static_cast<std::size_t>(m)] * std::max(0.0, std::min(hi, mhi) - std::max(lo, mlo));
      }
      t.fraction_repeating[static_cast<std::size_t>(b)] += std::clamp(covered / (hi - lo), 0.0, 1.0);
    }
  }
  for (double& f : t.fraction_repeating) f /= static_cast<double>(corpus.size());
  return t;
}

RepeatLatencyStats repeat_latency_stats(std::span<const SongStructure> corpus) {
  RepeatLatencyStats stats;
  int immediate = 0;
  int within_quarter = 0;
  for (const SongStructure& s : corpus) {
    const double quarter = 0.25 * s.total_measures();
    std::map<char, std::vector<std::size_t>> occurrences;
    for (std::size_t i = 0; i < s.labels.size(); ++i) {
      const PhraseLabel& l = s.labels[i];
      if (l.melodic() && !is_unrepeated_marker(l.letter)) occurrences[l.letter].push_back(i);
    }
    for (const auto& [letter, idx] : occurrences) {
      if (idx.size() < 2) continue;
      ++stats.repeated_phrases;
      if (idx[1] == idx[0] + 1) ++immediate;
      int gap = s.labels[idx[1]].start_measure - s.labels[idx[0]].end_measure();
      if (gap <= quarter) ++within_quarter;
    }
  }
  if (stats.repeated_phrases > 0) {
    stats.immediate_repeat_fraction = static_cast<double>(immediate) / stats.repeated_phrases;
    stats.within_quarter_fraction = static_cast<double>(within_quarter) / stats.repeated_phrases;
  }
  return stats;
}

double novelty_ratio(const SongStructure& structure) {
  const int total = structure.total_measures();
  if (total <= 0) throw ParameterError("novelty ratio of an empty structure");
  int fresh = 0;
  for (std::size_t i = 0; i < structure.labels.size(); ++i) {
    if (!repeats_earlier(structure, i)) fresh += structure.labels[i].length_measures;
  }
  return static_cast<double>(fresh) / total;
}

}  // namespace repstruct
