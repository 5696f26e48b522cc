#include "repstruct/experiments.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {

std::vector<std::string> validate_config(const ExperimentConfig& c) {
  std::vector<std::string> errors;
  if (c.bins < 2) errors.push_back("bins must be at least 2");
  if (c.timeline_bins < 2) errors.push_back("timeline_bins must be at least 2");
  if (c.max_order_fg < 0) errors.push_back("max_order_fg must be >= 0");
  if (c.max_order_bg < 0) errors.push_back("max_order_bg must be >= 0");
  if (c.lambda_grid.empty()) errors.push_back("lambda_grid must not be empty");
  for (double l : c.lambda_grid) {
    if (!(l >= 0.0 && l <= 1.0)) {
      errors.push_back("lambda_grid value " + std::to_string(l) + " outside [0, 1]");
    }
  }
  if (!(c.sim_threshold >= 0.0 && c.sim_threshold <= 1.0)) errors.push_back("sim_threshold must lie in [0, 1]");
  if (c.test_notes < 1) errors.push_back("test_notes must be at least 1");
  if (c.min_phrase_count < 1) errors.push_back("min_phrase_count must be at least 1");
  if (c.min_song_count < 1) errors.push_back("min_song_count must be at least 1");
  if (c.song_length_bin < 1) errors.push_back("song_length_bin must be at least 1");
  if (c.baseline_draws < 1) errors.push_back("baseline_draws must be at least 1");
  if (c.long_rest_measures < 1) errors.push_back("long_rest_measures must be at least 1");
  if (c.jobs < 1) errors.push_back("jobs must be at least 1");
  return errors;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

AnalyzedSong analyze_song(Song song, const std::optional<std::string>& labels, const ExperimentConfig& config) {
  validate_song(song);
  if (!song.key) song.key = resolve_tonic(song);
  AnalyzedSong a;
  a.degrees = to_degree_sequence(song);
  if (labels) {
    a.structure = parse_labels(*labels, song);
    a.labeled = true;
  } else {
    ExtractOptions opt;
    opt.sim_threshold = config.sim_threshold;
    a.structure = extract_phrases(song, opt);
  }
  a.sections = derive_sections(a.structure);
  a.phrase_of_note.reserve(song.notes.size());
  std::size_t phrase = 0;
  for (const NoteEvent& n : song.notes) {
    auto measure = static_cast<int>(n.onset / kTicksPerMeasure);
    while (phrase + 1 < a.structure.labels.size() && a.structure.labels[phrase].end_measure() <= measure) ++phrase;
    a.phrase_of_note.push_back(static_cast<int>(phrase));
  }
  a.song = std::move(song);
  return a;
}

Corpus build_corpus(std::string id, std::vector<Song> songs, const std::map<std::string, std::string>& labels,
                    const ExperimentConfig& config, std::vector<std::pair<std::string, std::string>>* failures) {
  std::sort(songs.begin(), songs.end(), [](const Song& a, const Song& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < songs.size(); ++i) {
    if (songs[i].id == songs[i - 1].id) throw RejectionError("duplicate song id '" + songs[i].id + "'");
  }
  Corpus corpus;
  corpus.id = std::move(id);
  std::vector<std::optional<AnalyzedSong>> prepared(songs.size());
  std::vector<std::string> errors(songs.size());
  parallel_for(songs.size(), config.jobs, [&](std::size_t i) {
    auto it = labels.find(songs[i].id);
    std::optional<std::string> label;
    if (it != labels.end()) label = it->second;
    try {
      prepared[i] = analyze_song(songs[i], label, config);
    } catch (const Error& e) {
      if (!failures) throw;
      errors[i] = e.what();
    }
  });
  for (std::size_t i = 0; i < songs.size(); ++i) {
    if (prepared[i]) {
      corpus.songs.push_back(std::move(*prepared[i]));
    } else {
      failures->emplace_back(songs[i].id, errors[i]);
    }
  }
  return corpus;
}

std::string to_string(StructuralPosition p) {
  switch (p) {
    case StructuralPosition::kSectionStart:
      return "section_start";
    case StructuralPosition::kPhraseStart:
      return "phrase_start";
    case StructuralPosition::kPhraseMiddle:
      return "phrase_middle";
    case StructuralPosition::kPhraseEnd:
      return "phrase_end";
    case StructuralPosition::kSectionEnd:
      return "section_end";
  }
  return "unknown";
}

namespace {

std::vector<StructuralPosition> positions_impl(const AnalyzedSong& a, bool with_sections) {
  const auto& notes = a.song.notes;
  std::vector<StructuralPosition> pos(notes.size(), StructuralPosition::kPhraseMiddle);
  std::vector<bool> section_first(a.structure.labels.size(), false);
  std::vector<bool> section_last(a.structure.labels.size(), false);
  if (with_sections) {
    for (const Section& s : a.sections) {
      section_first[s.first_phrase] = true;
      section_last[s.last_phrase] = true;
    }
  }
  std::size_t i = 0;
  while (i < notes.size()) {
    std::size_t j = i;
    while (j < notes.size() && a.phrase_of_note[j] == a.phrase_of_note[i]) ++j;
    auto phrase = static_cast<std::size_t>(a.phrase_of_note[i]);
    Tick start_window = notes[i].onset / kTicksPerHalfNote;
    Tick end_window = notes[j - 1].onset / kTicksPerHalfNote;
    for (std::size_t k = i; k < j; ++k) {
      Tick w = notes[k].onset / kTicksPerHalfNote;
      if (w == start_window) {
        pos[k] = section_first[phrase] ? StructuralPosition::kSectionStart : StructuralPosition::kPhraseStart;
      } else if (w == end_window) {
        pos[k] = section_last[phrase] ? StructuralPosition::kSectionEnd : StructuralPosition::kPhraseEnd;
      }
    }
    i = j;
  }
  return pos;
}

}  // namespace

std::vector<StructuralPosition> structural_positions(const AnalyzedSong& song) { return positions_impl(song, true); }
std::vector<StructuralPosition> phrase_positions(const AnalyzedSong& song) { return positions_impl(song, false); }

void BinnedCurve::add(double position, double value) {
  int bin = static_cast<int>(std::floor(position * num_bins));
  bin = std::clamp(bin, 0, num_bins - 1);
  sums[static_cast<std::size_t>(bin)] += value;
  ++counts[static_cast<std::size_t>(bin)];
}

void BinnedCurve::merge(const BinnedCurve& other) {
  if (other.num_bins != num_bins) throw ParameterError("merging curves with different bin counts");
  for (std::size_t b = 0; b < sums.size(); ++b) {
    sums[b] += other.sums[b];
    counts[b] += other.counts[b];
  }
}

std::optional<double> BinnedCurve::mean(int bin) const {
  auto b = static_cast<std::size_t>(bin);
  if (counts[b] == 0) return std::nullopt;
  return sums[b] / counts[b];
}

namespace {

constexpr int kDegreeAlphabet = kPitchClasses;

template <typename PerSong>
BinnedCurve reduce_curves(const Corpus& corpus, const ExperimentConfig& config, PerSong per_song) {
  std::vector<BinnedCurve> partial(corpus.songs.size(), BinnedCurve(config.bins));
  parallel_for(corpus.songs.size(), config.jobs, [&](std::size_t i) { per_song(corpus.songs[i], partial[i]); });
  BinnedCurve total(config.bins);
  for (const auto& p : partial) total.merge(p);
  return total;
}

std::vector<double> online_song_cross_entropy(const AnalyzedSong& a, int max_order) {
  ContextTreeModel model(max_order, kDegreeAlphabet);
  CrossEntropyOptions opt;
  opt.online = true;
  return cross_entropy(model, a.degrees, opt).per_symbol;
}

}  // namespace

BinnedCurve within_phrase_curve(const Corpus& corpus, const ExperimentConfig& config) {
  return reduce_curves(corpus, config, [&](const AnalyzedSong& a, BinnedCurve& curve) {
    auto ce = online_song_cross_entropy(a, config.max_order_fg);
    for (std::size_t k = 0; k < ce.size(); ++k) {
      const PhraseLabel& p = a.structure.labels[static_cast<std::size_t>(a.phrase_of_note[k])];
      if (!p.melodic()) continue;
      Tick start = p.start_measure * kTicksPerMeasure;
      Tick len = p.length_measures * kTicksPerMeasure;
      curve.add(static_cast<double>(a.song.notes[k].onset - start) / static_cast<double>(len), ce[k]);
    }
  });
}

BinnedCurve over_song_curve(const Corpus& corpus, const ExperimentConfig& config) {
  return reduce_curves(corpus, config, [&](const AnalyzedSong& a, BinnedCurve& curve) {
    auto ce = online_song_cross_entropy(a, config.max_order_fg);
    const auto len = static_cast<double>(a.song.length_ticks());
    for (std::size_t k = 0; k < ce.size(); ++k) curve.add(static_cast<double>(a.song.notes[k].onset) / len, ce[k]);
  });
}

std::string to_string(SweepVariant v) {
  return v == SweepVariant::kIncludeDuplicates ? "include_duplicates" : "holdout_repeats";
}

double SweepResult::best_lambda() const {
  if (rows.empty()) throw ParameterError("empty sweep");
  const SweepRow* best = &rows.front();
  for (const SweepRow& r : rows) {
    if (r.cross_entropy < best->cross_entropy) best = &r;
  }
  return best->lambda;
}

std::vector<std::size_t> tested_notes(const AnalyzedSong& song, std::size_t phrase, int test_notes) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < song.phrase_of_note.size() && static_cast<int>(out.size()) < test_notes; ++k) {
    if (static_cast<std::size_t>(song.phrase_of_note[k]) == phrase) out.push_back(k);
  }
  return out;
}

namespace {

std::vector<std::vector<double>> phrase_similarity(const AnalyzedSong& a) {
  const auto& labels = a.structure.labels;
  const auto tokens = measure_tokens(a.song);
  std::span<const MeasureToken> all(tokens);
  std::vector<std::vector<double>> sim(labels.size(), std::vector<double>(labels.size(), 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    sim[i][i] = 1.0;
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i].length_measures != labels[j].length_measures) continue;
      auto len = static_cast<std::size_t>(labels[i].length_measures);
      double s = segment_similarity(all.subspan(static_cast<std::size_t>(labels[i].start_measure), len),
                                    all.subspan(static_cast<std::size_t>(labels[j].start_measure), len));
      sim[i][j] = sim[j][i] = s;
    }
  }
  return sim;
}

}  // namespace

std::vector<std::vector<bool>> related_phrases(const AnalyzedSong& song, double sim_threshold) {
  const auto& labels = song.structure.labels;
  auto sim = phrase_similarity(song);
  std::vector<std::vector<bool>> rel(labels.size(), std::vector<bool>(labels.size(), false));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (i == j) continue;
      bool same_letter = labels[i].letter == labels[j].letter && !is_unrepeated_marker(labels[i].letter);
      bool similar = labels[i].melodic() && labels[j].melodic() &&
                     labels[i].length_measures == labels[j].length_measures && sim[i][j] >= sim_threshold;
      rel[i][j] = same_letter || similar;
    }
  }
  return rel;
}

std::vector<bool> repeated_phrases(const AnalyzedSong& song, double sim_threshold) {
  const auto& labels = song.structure.labels;
  auto sim = phrase_similarity(song);
  std::vector<bool> repeated(labels.size(), false);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (repeats_earlier(song.structure, i)) {
      repeated[i] = true;
      continue;
    }
    if (!labels[i].melodic() || !is_unique_phrase(song.structure, i)) continue;
    for (std::size_t j = 0; j < i; ++j) {
      if (labels[j].melodic() && labels[j].length_measures == labels[i].length_measures && sim[i][j] >= sim_threshold) {
        repeated[i] = true;
        break;
      }
    }
  }
  return repeated;
}

namespace {

std::vector<bool> holdout_base_mask(const AnalyzedSong& song, const std::vector<bool>& excluded_phrases) {
  std::vector<bool> mask(song.degrees.size(), true);
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (excluded_phrases[static_cast<std::size_t>(song.phrase_of_note[k])]) mask[k] = false;
  }
  return mask;
}

std::vector<bool> training_mask(const AnalyzedSong& song, std::size_t phrase, SweepVariant variant,
                                const ExperimentConfig& config, const std::vector<bool>& repeated,
                                const std::vector<std::vector<bool>>& related) {
  std::vector<bool> mask(song.degrees.size(), true);
  if (variant == SweepVariant::kHoldoutRepeats) {
    std::vector<bool> excluded = repeated;
    excluded[phrase] = true;
    for (std::size_t j = 0; j < excluded.size(); ++j) {
      if (related[phrase][j]) excluded[j] = true;
    }
    mask = holdout_base_mask(song, excluded);
  }
  for (std::size_t k : tested_notes(song, phrase, config.test_notes)) mask[k] = false;
  return mask;
}

}  // namespace

std::vector<bool> foreground_training_mask(const AnalyzedSong& song, std::size_t phrase, SweepVariant variant,
                                           const ExperimentConfig& config) {
  if (variant == SweepVariant::kIncludeDuplicates) return training_mask(song, phrase, variant, config, {}, {});
  return training_mask(song, phrase, variant, config, repeated_phrases(song, config.sim_threshold),
                       related_phrases(song, config.sim_threshold));
}

ContextTreeModel train_on_mask(std::span<const Symbol> degrees, const std::vector<bool>& mask, int max_order) {
  ContextTreeModel model(max_order, kDegreeAlphabet);
  std::size_t k = 0;
  while (k < degrees.size()) {
    if (!mask[k]) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < degrees.size() && mask[end]) ++end;
    model.update(degrees.subspan(k, end - k));
    k = end;
  }
  return model;
}

ContextTreeModel train_background(const Corpus& corpus, int max_order) {
  ContextTreeModel model(max_order, kDegreeAlphabet);
  for (const AnalyzedSong& a : corpus.songs) model.update(a.degrees);
  return model;
}

namespace {

std::span<const Symbol> context_at(std::span<const Symbol> degrees, std::size_t t, int order) {
  std::size_t len = std::min(t, static_cast<std::size_t>(order));
  return degrees.subspan(t - len, len);
}

struct SweepAccumulator {
  std::vector<double> entropy, cross_entropy, hits;
  long n = 0;
  explicit SweepAccumulator(std::size_t k = 0) : entropy(k), cross_entropy(k), hits(k) {}
};

}  // namespace

SweepResult fg_bg_sweep(const Corpus& corpus, SweepVariant variant, const ExperimentConfig& config) {
  for (double l : config.lambda_grid) {
    if (!(l >= 0.0 && l <= 1.0)) throw ParameterError("lambda grid values must lie in [0, 1]");
  }
  const std::size_t grid = config.lambda_grid.size();
  const ContextTreeModel background = train_background(corpus, config.max_order_bg);
  const int context_len = std::max(config.max_order_fg, config.max_order_bg);

  std::vector<SweepAccumulator> partial(corpus.songs.size(), SweepAccumulator(grid));
  parallel_for(corpus.songs.size(), config.jobs, [&](std::size_t i) {
    const AnalyzedSong& a = corpus.songs[i];
    SweepAccumulator& acc = partial[i];
    ContextTreeModel bg = background;
    bg.remove(a.degrees);
    std::vector<bool> repeated;
    std::vector<std::vector<bool>> related;
    if (variant == SweepVariant::kHoldoutRepeats) {
      repeated = repeated_phrases(a, config.sim_threshold);
      related = related_phrases(a, config.sim_threshold);
    }
    for (std::size_t p = 0; p < a.structure.labels.size(); ++p) {
      if (!a.structure.labels[p].melodic()) continue;
      auto tested = tested_notes(a, p, config.test_notes);
      if (tested.empty()) continue;
      auto mask = training_mask(a, p, variant, config, repeated, related);
      ContextTreeModel fg = train_on_mask(a.degrees, mask, config.max_order_fg);
      for (std::size_t t : tested) {
        auto ctx = context_at(a.degrees, t, context_len);
        auto pf = fg.predict(ctx);
        auto pb = bg.predict(ctx);
        Symbol actual = a.degrees[t];
        for (std::size_t g = 0; g < grid; ++g) {
          auto d = mix(pf, pb, config.lambda_grid[g]);
          acc.entropy[g] += entropy(d);
          acc.cross_entropy[g] += -std::log2(d[actual]);
          acc.hits[g] += argmax(d) == actual ? 1.0 : 0.0;
        }
        ++acc.n;
      }
    }
  });

  SweepAccumulator total(grid);
  for (const auto& p : partial) {
    for (std::size_t g = 0; g < grid; ++g) {
      total.entropy[g] += p.entropy[g];
      total.cross_entropy[g] += p.cross_entropy[g];
      total.hits[g] += p.hits[g];
    }
    total.n += p.n;
  }
  SweepResult result;
  result.variant = variant;
  result.tested_notes = total.n;
  for (std::size_t g = 0; g < grid; ++g) {
    SweepRow row;
    row.lambda = config.lambda_grid[g];
    if (total.n > 0) {
      const auto n = static_cast<double>(total.n);
      row.entropy = total.entropy[g] / n;
      row.cross_entropy = total.cross_entropy[g] / n;
      row.accuracy = total.hits[g] / n;
    }
    result.rows.push_back(row);
  }
  return result;
}

namespace {

struct PositionAccumulator {
  std::map<StructuralPosition, double> sum;
  std::map<StructuralPosition, long> count;

  void add(StructuralPosition p, double v) {
    sum[p] += v;
    ++count[p];
  }
  void merge(const PositionAccumulator& o) {
    for (auto [p, v] : o.sum) sum[p] += v;
    for (auto [p, c] : o.count) count[p] += c;
  }
  PositionStats finish() const {
    PositionStats s;
    double total_sum = 0;
    for (StructuralPosition p : kAllPositions) {
      auto c = count.contains(p) ? count.at(p) : 0L;
      s.count[p] = c;
      if (c > 0) {
        s.mean[p] = sum.at(p) / static_cast<double>(c);
        total_sum += sum.at(p);
        s.total += c;
      }
    }
    if (s.total > 0) s.overall_mean = total_sum / static_cast<double>(s.total);
    return s;
  }
};

}  // namespace

PositionalCrossEntropy positional_cross_entropy(const Corpus& corpus, const ExperimentConfig& config) {
  const ContextTreeModel background = train_background(corpus, config.max_order_bg);
  std::vector<PositionAccumulator> bg_parts(corpus.songs.size());
  std::vector<PositionAccumulator> fg_parts(corpus.songs.size());

  parallel_for(corpus.songs.size(), config.jobs, [&](std::size_t i) {
    const AnalyzedSong& a = corpus.songs[i];
    const auto positions = structural_positions(a);
    std::span<const Symbol> degrees(a.degrees);

    ContextTreeModel bg = background;
    bg.remove(a.degrees);
    for (std::size_t t = 0; t < degrees.size(); ++t) {
      auto d = bg.predict(context_at(degrees, t, config.max_order_bg));
      bg_parts[i].add(positions[t], -std::log2(d[degrees[t]]));
    }

    const auto repeated = repeated_phrases(a, config.sim_threshold);
    const auto related = related_phrases(a, config.sim_threshold);
    const auto window = static_cast<std::size_t>(config.test_notes);
    for (std::size_t w = 0; w < degrees.size(); w += window) {
      std::size_t end = std::min(degrees.size(), w + window);
      std::vector<bool> excluded = repeated;
      for (std::size_t t = w; t < end; ++t) {
        auto phrase = static_cast<std::size_t>(a.phrase_of_note[t]);
        for (std::size_t j = 0; j < excluded.size(); ++j) {
          if (related[phrase][j]) excluded[j] = true;
        }
      }
      auto mask = holdout_base_mask(a, excluded);
      for (std::size_t t = w; t < end; ++t) mask[t] = false;
      ContextTreeModel fg = train_on_mask(degrees, mask, config.max_order_fg);
      for (std::size_t t = w; t < end; ++t) {
        auto d = fg.predict(context_at(degrees, t, config.max_order_fg));
        fg_parts[i].add(positions[t], -std::log2(d[degrees[t]]));
      }
    }
  });

  PositionAccumulator bg_total, fg_total;
  for (std::size_t i = 0; i < corpus.songs.size(); ++i) {
    bg_total.merge(bg_parts[i]);
    fg_total.merge(fg_parts[i]);
  }
  return {bg_total.finish(), fg_total.finish()};
}

std::map<StructuralPosition, PositionPitchStats> phrase_position_pitch_stats(const Corpus& corpus) {
  std::map<StructuralPosition, PositionPitchStats> stats;
  for (StructuralPosition p :
       {StructuralPosition::kPhraseStart, StructuralPosition::kPhraseMiddle, StructuralPosition::kPhraseEnd}) {
    stats[p] = {};
  }
  for (const AnalyzedSong& a : corpus.songs) {
    auto positions = phrase_positions(a);
    for (std::size_t k = 0; k < a.degrees.size(); ++k) {
      if (!a.structure.labels[static_cast<std::size_t>(a.phrase_of_note[k])].melodic()) continue;
      PositionPitchStats& s = stats[positions[k]];
      ++s.histogram[a.degrees[k]];
      ++s.total;
    }
  }
  for (auto& [p, s] : stats) {
    if (s.total == 0) continue;
    PredictionDistribution d;
    for (long c : s.histogram) d.probs.push_back(static_cast<double>(c) / static_cast<double>(s.total));
    s.entropy_bits = entropy(d);
    s.tonic_probability = d.probs[0];
  }
  return stats;
}

std::vector<bool> countable_measures(const AnalyzedSong& a, int long_rest_measures) {
  const Song& song = a.song;
  auto empty = empty_measures(song);
  std::vector<bool> countable(static_cast<std::size_t>(song.num_measures), false);
  for (const PhraseLabel& l : a.structure.labels) {
    if (!l.melodic()) continue;
    for (int m = l.start_measure; m < l.end_measure(); ++m) countable[static_cast<std::size_t>(m)] = true;
  }
  std::vector<Tick> rest_ticks(static_cast<std::size_t>(song.num_measures), 0);
  auto add_rest = [&](Tick from, Tick to) {
    if (to - from < static_cast<Tick>(long_rest_measures) * kTicksPerMeasure) return;
    for (Tick m = from / kTicksPerMeasure; m < song.num_measures && m * kTicksPerMeasure < to; ++m) {
      Tick lo = std::max(from, m * kTicksPerMeasure);
      Tick hi = std::min(to, (m + 1) * kTicksPerMeasure);
      rest_ticks[static_cast<std::size_t>(m)] += std::max<Tick>(0, hi - lo);
    }
  };
  Tick cursor = 0;
  for (const NoteEvent& n : song.notes) {
    if (n.onset > cursor) add_rest(cursor, n.onset);
    cursor = std::max(cursor, n.end());
  }
  add_rest(cursor, song.length_ticks());
  for (std::size_t m = 0; m < countable.size(); ++m) {
    if (empty[m] || 2 * rest_ticks[m] >= kTicksPerMeasure) countable[m] = false;
  }
  return countable;
}

std::vector<std::vector<OnsetPattern>> song_onset_units(const Corpus& corpus, const ExperimentConfig& config) {
  std::vector<std::vector<OnsetPattern>> units;
  for (const AnalyzedSong& a : corpus.songs) {
    auto countable = countable_measures(a, config.long_rest_measures);
    std::vector<OnsetPattern> unit;
    for (std::size_t m = 0; m < countable.size(); ++m) {
      if (!countable[m]) continue;
      auto start = static_cast<Tick>(m) * kTicksPerMeasure;
      auto part = encode_onset_patterns(a.song.notes, start, start + kTicksPerMeasure);
      unit.insert(unit.end(), part.begin(), part.end());
    }
    units.push_back(std::move(unit));
  }
  return units;
}

std::vector<std::vector<OnsetPattern>> phrase_onset_units(const Corpus& corpus) {
  std::vector<std::vector<OnsetPattern>> units;
  for (const AnalyzedSong& a : corpus.songs) {
    for (const PhraseLabel& l : a.structure.labels) {
      if (!l.melodic()) continue;
      auto unit = melodic_onset_patterns(a.song, l.start_measure, l.end_measure());
      if (!unit.empty()) units.push_back(std::move(unit));
    }
  }
  return units;
}

std::vector<std::vector<PitchPattern>> phrase_pitch_units(const Corpus& corpus) {
  std::vector<std::vector<PitchPattern>> units;
  for (const AnalyzedSong& a : corpus.songs) {
    for (const PhraseLabel& l : a.structure.labels) {
      if (!l.melodic()) continue;
      auto unit = melodic_pitch_patterns(a.song, l.start_measure, l.end_measure());
      if (!unit.empty()) units.push_back(std::move(unit));
    }
  }
  return units;
}

VocabularyComparison song_vocabulary_curve(const Corpus& corpus, const PatternDistribution<OnsetPattern>& dist,
                                           const ExperimentConfig& config) {
  auto units = song_onset_units(corpus, config);
  std::erase_if(units, [](const auto& u) { return u.empty(); });
  return vocabulary_with_baseline(units, dist, config.min_song_count, config.song_length_bin, config.baseline_draws,
                                  config.seed ^ 0x50E6u);
}

RhythmFormStats rhythm_form_stats(const Corpus& corpus) {
  RhythmFormStats s;
  long all_same = 0, listed = 0;
  for (const AnalyzedSong& a : corpus.songs) {
    for (const PhraseLabel& l : a.structure.labels) {
      if (!l.melodic()) continue;
      RhythmForm f = rhythm_form(a.song, l.start_measure, l.length_measures);
      ++s.phrases;
      ++s.forms[f.form];
      if (f.classification == RhythmClass::kAllSame) ++all_same;
      if (f.classification == RhythmClass::kListedForm) ++listed;
    }
  }
  if (s.phrases > 0) {
    s.all_same_fraction = static_cast<double>(all_same) / static_cast<double>(s.phrases);
    s.listed_form_fraction = static_cast<double>(listed) / static_cast<double>(s.phrases);
  }
  return s;
}

int distinct_onset_patterns(const Corpus& corpus) {
  std::vector<bool> seen(OnsetPattern::kCount, false);
  for (const AnalyzedSong& a : corpus.songs) {
    for (OnsetPattern p : melodic_onset_patterns(a.song, 0, a.song.num_measures)) seen[static_cast<std::size_t>(p.index())] = true;
  }
  return static_cast<int>(std::count(seen.begin(), seen.end(), true));
}

std::vector<double> phrase_distinct_counts(const Corpus& corpus, bool pitch) {
  std::vector<double> counts;
  if (pitch) {
    for (const auto& u : phrase_pitch_units(corpus)) counts.push_back(count_vocabulary<PitchPattern>(u).distinct);
  } else {
    for (const auto& u : phrase_onset_units(corpus)) counts.push_back(count_vocabulary<OnsetPattern>(u).distinct);
  }
  return counts;
}

}  // namespace repstruct
