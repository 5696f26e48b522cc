#include "repstruct/report.h"

#include <cmath>
#include <functional>
#include <sstream>

#include "repstruct/error.h"

namespace repstruct {

Json config_to_json(const ExperimentConfig& c) {
  Json j;
  j["bins"] = c.bins;
  j["timeline_bins"] = c.timeline_bins;
  j["max_order_fg"] = c.max_order_fg;
  j["max_order_bg"] = c.max_order_bg;
  j["lambda_grid"] = c.lambda_grid;
  j["sim_threshold"] = c.sim_threshold;
  j["test_notes"] = c.test_notes;
  j["min_phrase_count"] = c.min_phrase_count;
  j["min_song_count"] = c.min_song_count;
  j["song_length_bin"] = c.song_length_bin;
  j["baseline_draws"] = c.baseline_draws;
  j["long_rest_measures"] = c.long_rest_measures;
  j["seed"] = c.seed;
  return j;
}

void apply_config_json(const nlohmann::json& j, ExperimentConfig& c, std::vector<std::string>& errors) {
  if (!j.is_object()) {
    errors.push_back("config must be a JSON object");
    return;
  }
  auto read = [&](const char* key, auto& field) {
    if (!j.contains(key)) return;
    try {
      j.at(key).get_to(field);
    } catch (const nlohmann::json::exception&) {
      errors.push_back(std::string("config field '") + key + "' has the wrong type");
    }
  };
  read("bins", c.bins);
  read("timeline_bins", c.timeline_bins);
  read("max_order_fg", c.max_order_fg);
  read("max_order_bg", c.max_order_bg);
  read("lambda_grid", c.lambda_grid);
  read("sim_threshold", c.sim_threshold);
  read("test_notes", c.test_notes);
  read("min_phrase_count", c.min_phrase_count);
  read("min_song_count", c.min_song_count);
  read("song_length_bin", c.song_length_bin);
  read("baseline_draws", c.baseline_draws);
  read("long_rest_measures", c.long_rest_measures);
  read("seed", c.seed);
  read("jobs", c.jobs);
}

namespace {

Json curve_json(const BinnedCurve& curve) {
  Json bins = Json::array();
  for (int b = 0; b < curve.num_bins; ++b) {
    Json row;
    row["bin_index"] = b;
    row["bin_start"] = curve.bin_start(b);
    auto m = curve.mean(b);
    row["mean"] = m ? Json(*m) : Json(nullptr);
    row["n"] = curve.counts[static_cast<std::size_t>(b)];
    bins.push_back(std::move(row));
  }
  Json j;
  j["num_bins"] = curve.num_bins;
  j["bins"] = std::move(bins);
  return j;
}

Json vocabulary_json(const VocabularyCurve& curve) {
  Json points = Json::array();
  for (const VocabularyPoint& p : curve.points) {
    points.push_back({{"length", p.length},
                      {"mean_distinct", p.mean_distinct},
                      {"mean_unique", p.mean_unique},
                      {"n_samples", p.n_samples}});
  }
  return Json{{"points", std::move(points)}};
}

Json comparison_json(const VocabularyComparison& v) {
  return Json{{"real", vocabulary_json(v.real)}, {"baseline", vocabulary_json(v.baseline)}};
}

Json sweep_json(const SweepResult& s) {
  Json rows = Json::array();
  for (const SweepRow& r : s.rows) {
    rows.push_back({{"lambda", r.lambda},
                    {"entropy", r.entropy},
                    {"cross_entropy", r.cross_entropy},
                    {"accuracy", r.accuracy}});
  }
  Json j;
  j["variant"] = to_string(s.variant);
  j["tested_notes"] = s.tested_notes;
  j["best_lambda"] = s.tested_notes > 0 ? Json(s.best_lambda()) : Json(nullptr);
  j["rows"] = std::move(rows);
  return j;
}

Json position_stats_json(const PositionStats& s) {
  Json positions;
  for (StructuralPosition p : kAllPositions) {
    auto it = s.mean.find(p);
    positions[to_string(p)] = {{"mean", it == s.mean.end() ? Json(nullptr) : Json(it->second)},
                               {"n", s.count.at(p)}};
  }
  return Json{{"positions", std::move(positions)}, {"overall_mean", s.overall_mean}, {"n", s.total}};
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
  // splitmix64 finalizer
  std::uint64_t z = seed + tag * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Json corpus_metrics(const Corpus& corpus, const ExperimentConfig& config,
                    const PatternDistribution<OnsetPattern>* onset_baseline) {
  if (corpus.songs.empty()) throw RejectionError("corpus '" + corpus.id + "' has no analyzable songs");
  if (auto errors = validate_config(config); !errors.empty()) throw ParameterError(errors.front());

  std::vector<SongStructure> structures;
  long notes = 0, phrases = 0, labeled = 0;
  for (const AnalyzedSong& a : corpus.songs) {
    structures.push_back(a.structure);
    notes += static_cast<long>(a.song.notes.size());
    phrases += static_cast<long>(a.structure.labels.size());
    labeled += a.labeled ? 1 : 0;
  }

  Json metrics;
  metrics["corpus"] = {{"id", corpus.id},
                       {"songs", corpus.songs.size()},
                       {"labeled_songs", labeled},
                       {"notes", notes},
                       {"phrases", phrases}};

  // Structure
  Json structure;
  {
    auto timeline = repetition_timeline(structures, config.timeline_bins);
    Json bins = Json::array();
    for (int b = 0; b < timeline.num_bins; ++b) {
      bins.push_back({{"bin_index", b},
                      {"bin_start", static_cast<double>(b) / timeline.num_bins},
                      {"mean", timeline.fraction_repeating[static_cast<std::size_t>(b)]},
                      {"n", corpus.songs.size()}});
    }
    structure["repetition_timeline"] = {{"num_bins", timeline.num_bins}, {"bins", std::move(bins)}};

    auto latency = repeat_latency_stats(structures);
    structure["repeat_latency"] = {{"immediate_repeat_fraction", latency.immediate_repeat_fraction},
                                   {"within_quarter_fraction", latency.within_quarter_fraction},
                                   {"repeated_phrases", latency.repeated_phrases}};

    double sum = 0;
    long in_range = 0;
    for (const SongStructure& s : structures) {
      double r = novelty_ratio(s);
      sum += r;
      in_range += (r >= 0.15 && r <= 0.35) ? 1 : 0;
    }
    const auto n = static_cast<double>(structures.size());
    structure["novelty"] = {{"mean", sum / n},
                            {"fraction_in_range", static_cast<double>(in_range) / n},
                            {"range", {0.15, 0.35}}};
  }
  metrics["structure"] = std::move(structure);

  // Patterns
  Json patterns;
  {
    patterns["distinct_onset_patterns"] = distinct_onset_patterns(corpus);
    auto onset_units = phrase_onset_units(corpus);
    auto pitch_units = phrase_pitch_units(corpus);
    auto onset_dist = PatternDistribution<OnsetPattern>::from_sequences(onset_units);
    auto pitch_dist = PatternDistribution<PitchPattern>::from_sequences(pitch_units);
    patterns["phrase_onset_vocabulary"] =
        comparison_json(vocabulary_with_baseline(onset_units, onset_dist, config.min_phrase_count, 1,
                                                 config.baseline_draws, derive_seed(config.seed, 1)));
    patterns["phrase_pitch_vocabulary"] =
        comparison_json(vocabulary_with_baseline(pitch_units, pitch_dist, config.min_phrase_count, 1,
                                                 config.baseline_draws, derive_seed(config.seed, 2)));
    ExperimentConfig song_cfg = config;
    song_cfg.seed = derive_seed(config.seed, 3);
    patterns["song_onset_vocabulary"] =
        comparison_json(song_vocabulary_curve(corpus, onset_baseline ? *onset_baseline : onset_dist, song_cfg));

    auto forms = rhythm_form_stats(corpus);
    Json form_counts = Json::object();
    for (const auto& [form, count] : forms.forms) form_counts[form] = count;
    patterns["rhythm_forms"] = {{"phrases", forms.phrases},
                                {"all_same_fraction", forms.all_same_fraction},
                                {"listed_form_fraction", forms.listed_form_fraction},
                                {"forms", std::move(form_counts)}};
  }
  metrics["patterns"] = std::move(patterns);

  // Sequence models
  Json markov;
  {
    markov["within_phrase"] = curve_json(within_phrase_curve(corpus, config));
    auto over = over_song_curve(corpus, config);
    Json over_json = curve_json(over);
    Json low = Json::array();
    for (int b = 0; b < over.num_bins; ++b) {
      if (auto m = over.mean(b); m && *m < 1.0) low.push_back(b);
    }
    over_json["low_bins"] = std::move(low);
    markov["over_song"] = std::move(over_json);
    markov["fg_bg_sweep"] = {
        {"include_duplicates", sweep_json(fg_bg_sweep(corpus, SweepVariant::kIncludeDuplicates, config))},
        {"holdout_repeats", sweep_json(fg_bg_sweep(corpus, SweepVariant::kHoldoutRepeats, config))}};
    auto positional = positional_cross_entropy(corpus, config);
    markov["positional_cross_entropy"] = {{"background", position_stats_json(positional.background)},
                                          {"foreground", position_stats_json(positional.foreground)},
                                          {"max_order_bg", config.max_order_bg},
                                          {"max_order_fg", config.max_order_fg}};
    Json pitch;
    for (const auto& [pos, s] : phrase_position_pitch_stats(corpus)) {
      pitch[to_string(pos)] = {{"histogram", s.histogram},
                               {"total", s.total},
                               {"entropy_bits", s.entropy_bits},
                               {"tonic_probability", s.tonic_probability}};
    }
    markov["phrase_position_pitch"] = std::move(pitch);
  }
  metrics["markov"] = std::move(markov);
  return metrics;
}

Json song_diagnostics(const Corpus& corpus) {
  Json songs = Json::array();
  for (const AnalyzedSong& a : corpus.songs) {
    songs.push_back({{"id", a.song.id},
                     {"labeled", a.labeled},
                     {"structure", render_labels(a.structure)},
                     {"sections", a.sections.size()},
                     {"num_notes", a.song.notes.size()},
                     {"num_measures", a.song.num_measures},
                     {"tonic_pc", a.song.key->tonic_pc},
                     {"mode", to_string(a.song.key->mode)},
                     {"novelty_ratio", novelty_ratio(a.structure)}});
  }
  return songs;
}

Json metric_deltas(const Json& reference, const Json& generated) {
  if (reference.is_number() && generated.is_number()) {
    return generated.get<double>() - reference.get<double>();
  }
  if (reference.is_object() && generated.is_object()) {
    Json out = Json::object();
    for (const auto& [key, value] : reference.items()) {
      if (!generated.contains(key)) continue;
      Json d = metric_deltas(value, generated.at(key));
      if (!d.is_null()) out[key] = std::move(d);
    }
    return out;
  }
  if (reference.is_array() && generated.is_array()) {
    Json out = Json::array();
    std::size_t n = std::min(reference.size(), generated.size());
    for (std::size_t i = 0; i < n; ++i) out.push_back(metric_deltas(reference[i], generated[i]));
    return out;
  }
  return nullptr;
}

Json vocabulary_significance(const Corpus& reference, const Corpus& generated) {
  Json out;
  for (bool pitch : {false, true}) {
    auto a = phrase_distinct_counts(reference, pitch);
    auto b = phrase_distinct_counts(generated, pitch);
    const char* key = pitch ? "phrase_pitch_vocabulary" : "phrase_onset_vocabulary";
    if (a.empty() || b.empty()) {
      out[key] = {{"skipped", "a corpus has no melodic phrases"}};
      continue;
    }
    auto mean = [](const std::vector<double>& v) {
      double s = 0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    auto r = count_significance(a, b);
    out[key] = {{"test", "mann_whitney_u"},
                {"u_statistic", r.u_statistic},
                {"p_value", r.p_value},
                {"exact", r.exact},
                {"n_reference", a.size()},
                {"n_generated", b.size()},
                {"mean_reference", mean(a)},
                {"mean_generated", mean(b)}};
  }
  return out;
}

Json config_echo(const ExperimentConfig& config, const std::map<std::string, std::string>& sources) {
  Json echo = config_to_json(config);
  for (const auto& [k, v] : sources) echo[k] = v;
  return echo;
}

namespace {

Json input_json(const CorpusInput& input, const Corpus& corpus) {
  Json hashes = Json::object();
  for (const auto& [id, h] : input.loaded.content_hashes) hashes[id] = h;
  return {{"corpus_id", corpus.id}, {"source", input.source}, {"songs", corpus.songs.size()}, {"content_hashes", hashes}};
}

Corpus prepare(const CorpusInput& input, const ExperimentConfig& config, const std::string& role, Json& skipped) {
  for (const SkippedFile& s : input.loaded.skipped) {
    skipped.push_back({{"corpus", role}, {"path", s.path}, {"reason", s.reason}});
  }
  std::vector<std::pair<std::string, std::string>> failures;
  Corpus corpus = build_corpus(input.loaded.id, input.loaded.songs, input.loaded.labels, config, &failures);
  for (const auto& [id, reason] : failures) skipped.push_back({{"corpus", role}, {"path", id}, {"reason", reason}});
  if (corpus.songs.empty()) throw RejectionError(role + " corpus has no analyzable songs");
  return corpus;
}

Json report_header(const char* kind, const Json& echo) {
  Json r;
  r["schema_version"] = kReportSchemaVersion;
  r["tool_version"] = kToolVersion;
  r["kind"] = kind;
  r["config"] = echo;
  return r;
}

}  // namespace

Json build_analysis_report(const CorpusInput& input, const ExperimentConfig& config, const Json& echo) {
  Json skipped = Json::array();
  Corpus corpus = prepare(input, config, "reference", skipped);
  Json r = report_header("analysis", echo);
  r["inputs"] = {{"reference", input_json(input, corpus)}};
  r["skipped_files"] = std::move(skipped);
  r["metrics"] = corpus_metrics(corpus, config);
  r["songs"] = song_diagnostics(corpus);
  return r;
}

Json build_comparison_report(const CorpusInput& reference, const CorpusInput& generated,
                             const ExperimentConfig& config, const Json& echo) {
  Json skipped = Json::array();
  Corpus ref = prepare(reference, config, "reference", skipped);
  Corpus gen = prepare(generated, config, "generated", skipped);
  // Both song-level baselines draw from the reference pattern distribution.
  auto ref_dist = PatternDistribution<OnsetPattern>::from_sequences(phrase_onset_units(ref));

  Json r = report_header("comparison", echo);
  r["inputs"] = {{"reference", input_json(reference, ref)}, {"generated", input_json(generated, gen)}};
  r["skipped_files"] = std::move(skipped);
  Json ref_metrics = corpus_metrics(ref, config, &ref_dist);
  Json gen_metrics = corpus_metrics(gen, config, &ref_dist);
  r["deltas"] = metric_deltas(ref_metrics, gen_metrics);
  r["significance"] = vocabulary_significance(ref, gen);
  r["reference"] = {{"metrics", std::move(ref_metrics)}, {"songs", song_diagnostics(ref)}};
  r["generated"] = {{"metrics", std::move(gen_metrics)}, {"songs", song_diagnostics(gen)}};
  return r;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

class Validator {
 public:
  std::vector<std::string> errors;

  const Json* need(const Json& parent, const std::string& key, const std::string& where) {
    if (!parent.is_object() || !parent.contains(key)) {
      errors.push_back(where + ": missing '" + key + "'");
      return nullptr;
    }
    return &parent.at(key);
  }

  void need_object(const Json& parent, const std::string& key, const std::string& where) {
    if (const Json* v = need(parent, key, where); v && !v->is_object()) errors.push_back(where + "." + key + ": not an object");
  }

  void binned(const Json& parent, const std::string& key, const std::string& where) {
    const Json* c = need(parent, key, where);
    if (!c) return;
    const std::string at = where + "." + key;
    const Json* bins = need(*c, "bins", at);
    const Json* num = need(*c, "num_bins", at);
    if (!bins || !num) return;
    if (!bins->is_array() || !num->is_number_integer() || bins->size() != num->get<std::size_t>()) {
      errors.push_back(at + ": bins do not match num_bins");
      return;
    }
    for (const auto& b : *bins) {
      if (!b.contains("bin_index") || !b.contains("bin_start") || !b.contains("mean") || !b.contains("n") ||
          !(b["mean"].is_number() || b["mean"].is_null()) || !b["n"].is_number_integer()) {
        errors.push_back(at + ": malformed bin row");
        return;
      }
    }
  }

  void vocabulary(const Json& parent, const std::string& key, const std::string& where) {
    const Json* v = need(parent, key, where);
    if (!v) return;
    for (const char* series : {"real", "baseline"}) {
      const Json* s = need(*v, series, where + "." + key);
      if (!s) continue;
      const Json* points = need(*s, "points", where + "." + key + "." + series);
      if (!points) continue;
      for (const auto& p : *points) {
        for (const char* f : {"length", "mean_distinct", "mean_unique", "n_samples"}) {
          if (!p.contains(f) || !p[f].is_number()) errors.push_back(where + "." + key + ": malformed point");
        }
        if (p.contains("mean_unique") && p.contains("mean_distinct") && p["mean_unique"].is_number() &&
            p["mean_distinct"].is_number() && p["mean_unique"].get<double>() > p["mean_distinct"].get<double>() + 1e-12) {
          errors.push_back(where + "." + key + ": mean_unique exceeds mean_distinct");
        }
      }
    }
  }

  void metrics(const Json& m, const std::string& where) {
    need_object(m, "corpus", where);
    if (const Json* s = need(m, "structure", where)) {
      binned(*s, "repetition_timeline", where + ".structure");
      need_object(*s, "repeat_latency", where + ".structure");
      need_object(*s, "novelty", where + ".structure");
    }
    if (const Json* p = need(m, "patterns", where)) {
      need(*p, "distinct_onset_patterns", where + ".patterns");
      vocabulary(*p, "phrase_onset_vocabulary", where + ".patterns");
      vocabulary(*p, "phrase_pitch_vocabulary", where + ".patterns");
      vocabulary(*p, "song_onset_vocabulary", where + ".patterns");
      need_object(*p, "rhythm_forms", where + ".patterns");
    }
    if (const Json* k = need(m, "markov", where)) {
      const std::string at = where + ".markov";
      binned(*k, "within_phrase", at);
      binned(*k, "over_song", at);
      if (const Json* s = need(*k, "fg_bg_sweep", at)) {
        for (const char* v : {"include_duplicates", "holdout_repeats"}) {
          const Json* sweep = need(*s, v, at + ".fg_bg_sweep");
          if (sweep) need(*sweep, "rows", at + ".fg_bg_sweep." + v);
        }
      }
      if (const Json* p = need(*k, "positional_cross_entropy", at)) {
        need_object(*p, "background", at + ".positional_cross_entropy");
        need_object(*p, "foreground", at + ".positional_cross_entropy");
      }
      need_object(*k, "phrase_position_pitch", at);
    }
  }

  void finite(const Json& j, const std::string& where) {
    if (j.is_number_float() && !std::isfinite(j.get<double>())) {
      errors.push_back(where + ": non-finite number");
    } else if (j.is_object()) {
      for (const auto& [k, v] : j.items()) finite(v, where + "." + k);
    } else if (j.is_array()) {
      for (std::size_t i = 0; i < j.size(); ++i) finite(j[i], where + "[" + std::to_string(i) + "]");
    }
  }
};

}  // namespace

std::vector<std::string> validate_report(const Json& report) {
  Validator v;
  if (!report.is_object()) return {"report is not an object"};
  if (const Json* s = v.need(report, "schema_version", "report"); s && (!s->is_number_integer() || *s != kReportSchemaVersion)) {
    v.errors.push_back("report: unsupported schema_version");
  }
  v.need(report, "tool_version", "report");
  v.need_object(report, "config", "report");
  v.need_object(report, "inputs", "report");
  if (const Json* s = v.need(report, "skipped_files", "report"); s && !s->is_array()) {
    v.errors.push_back("report.skipped_files: not an array");
  }
  const Json* kind = v.need(report, "kind", "report");
  if (kind && *kind == "analysis") {
    if (const Json* m = v.need(report, "metrics", "report")) v.metrics(*m, "metrics");
    v.need(report, "songs", "report");
  } else if (kind && *kind == "comparison") {
    for (const char* side : {"reference", "generated"}) {
      if (const Json* s = v.need(report, side, "report")) {
        if (const Json* m = v.need(*s, "metrics", side)) v.metrics(*m, std::string(side) + ".metrics");
        v.need(*s, "songs", side);
      }
    }
    v.need_object(report, "deltas", "report");
    if (const Json* sig = v.need(report, "significance", "report")) {
      for (const auto& [k, test] : sig->items()) {
        if (test.contains("p_value")) {
          double p = test["p_value"].is_number() ? test["p_value"].get<double>() : -1.0;
          if (!(p >= 0.0 && p <= 1.0)) v.errors.push_back("significance." + k + ": p_value outside [0, 1]");
        }
      }
    }
  } else if (kind) {
    v.errors.push_back("report: unknown kind");
  }
  v.finite(report, "report");
  return v.errors;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

namespace {

std::string num(const Json& j) { return j.is_null() ? std::string() : j.dump(); }

std::string binned_csv(const Json& curve) {
  std::string out = "bin_index,bin_start,mean,n\n";
  for (const auto& b : curve.at("bins")) {
    out += num(b.at("bin_index")) + "," + num(b.at("bin_start")) + "," + num(b.at("mean")) + "," + num(b.at("n")) + "\n";
  }
  return out;
}

std::string vocabulary_csv(const Json& v) {
  std::string out = "series,length,mean_distinct,mean_unique,n_samples\n";
  for (const char* series : {"real", "baseline"}) {
    for (const auto& p : v.at(series).at("points")) {
      out += std::string(series) + "," + num(p.at("length")) + "," + num(p.at("mean_distinct")) + "," +
             num(p.at("mean_unique")) + "," + num(p.at("n_samples")) + "\n";
    }
  }
  return out;
}

void metrics_csvs(const Json& m, const std::string& prefix, std::map<std::string, std::string>& out) {
  out[prefix + "repetition_timeline.csv"] = binned_csv(m.at("structure").at("repetition_timeline"));
  out[prefix + "within_phrase.csv"] = binned_csv(m.at("markov").at("within_phrase"));
  out[prefix + "over_song.csv"] = binned_csv(m.at("markov").at("over_song"));
  for (const char* v : {"phrase_onset_vocabulary", "phrase_pitch_vocabulary", "song_onset_vocabulary"}) {
    out[prefix + v + ".csv"] = vocabulary_csv(m.at("patterns").at(v));
  }
  for (const auto& [variant, sweep] : m.at("markov").at("fg_bg_sweep").items()) {
    std::string csv = "lambda,entropy,cross_entropy,accuracy\n";
    for (const auto& r : sweep.at("rows")) {
      csv += num(r.at("lambda")) + "," + num(r.at("entropy")) + "," + num(r.at("cross_entropy")) + "," +
             num(r.at("accuracy")) + "\n";
    }
    out[prefix + "fg_bg_sweep_" + variant + ".csv"] = csv;
  }
  std::string pos = "model,position,mean,n\n";
  for (const char* model : {"background", "foreground"}) {
    for (const auto& [p, s] : m.at("markov").at("positional_cross_entropy").at(model).at("positions").items()) {
      pos += std::string(model) + "," + p + "," + num(s.at("mean")) + "," + num(s.at("n")) + "\n";
    }
  }
  out[prefix + "positional_cross_entropy.csv"] = pos;
  std::string pitch = "position,entropy_bits,tonic_probability,total";
  for (int d = 0; d < 12; ++d) pitch += ",degree_" + std::to_string(d);
  pitch += "\n";
  for (const auto& [p, s] : m.at("markov").at("phrase_position_pitch").items()) {
    pitch += p + "," + num(s.at("entropy_bits")) + "," + num(s.at("tonic_probability")) + "," + num(s.at("total"));
    for (const auto& c : s.at("histogram")) pitch += "," + num(c);
    pitch += "\n";
  }
  out[prefix + "phrase_position_pitch.csv"] = pitch;
}

}  // namespace

std::map<std::string, std::string> report_csvs(const Json& report) {
  std::map<std::string, std::string> out;
  if (auto errors = validate_report(report); !errors.empty()) throw ParseError("invalid report: " + errors.front());
  if (report.at("kind") == "analysis") {
    metrics_csvs(report.at("metrics"), "", out);
  } else {
    metrics_csvs(report.at("reference").at("metrics"), "reference_", out);
    metrics_csvs(report.at("generated").at("metrics"), "generated_", out);
  }
  return out;
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace repstruct
