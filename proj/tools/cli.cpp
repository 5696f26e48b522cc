#include "repstruct/cli.h"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "repstruct/corpus.h"
#include "repstruct/error.h"
#include "repstruct/report.h"

namespace repstruct {
namespace {

namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << content;
  if (!f) throw Error("failed writing '" + path.string() + "'");
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> grid;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    double v = 0;
    auto first = item.data(), last = item.data() + item.size();
    while (first < last && *first == ' ') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw UsageError("--lambda-grid: cannot parse '" + item + "'");
    grid.push_back(v);
  }
  if (grid.empty()) throw UsageError("--lambda-grid is empty");
  return grid;
}

// Options shared by analyze and compare.
struct ExperimentFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs, max_order_fg, max_order_bg, bins;
  std::optional<double> sim_threshold;
  std::string lambda_grid;

  void add(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Config JSON, or a report whose config echo is reused");
    cmd->add_option("--seed", seed, "Random seed (default 0)");
    cmd->add_option("--jobs", jobs, "Worker threads");
    cmd->add_option("--sim-threshold", sim_threshold, "Phrase similarity threshold");
    cmd->add_option("--max-order-fg", max_order_fg, "Foreground model order maximum");
    cmd->add_option("--max-order-bg", max_order_bg, "Background model order maximum");
    cmd->add_option("--lambda-grid", lambda_grid, "Comma-separated foreground weights");
    cmd->add_option("--bins", bins, "Bins for within-phrase and over-song curves");
  }

  // Returns the config and the echoed corpus sources from --config.
  std::pair<ExperimentConfig, nlohmann::json> resolve() const {
    ExperimentConfig config;
    nlohmann::json file_config = nlohmann::json::object();
    if (!config_path.empty()) {
      if (!fs::is_regular_file(config_path)) throw UsageError("config file '" + config_path + "' not found");
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_file(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file '" + config_path + "' is not valid JSON: " + e.what());
      }
      file_config = (j.is_object() && j.contains("config") && j["config"].is_object()) ? j["config"] : j;
      std::vector<std::string> errors;
      apply_config_json(file_config, config, errors);
      if (!errors.empty()) throw UsageError(join(errors));
    }
    if (seed) config.seed = *seed;
    if (jobs) config.jobs = *jobs;
    if (sim_threshold) config.sim_threshold = *sim_threshold;
    if (max_order_fg) config.max_order_fg = *max_order_fg;
    if (max_order_bg) config.max_order_bg = *max_order_bg;
    if (bins) config.bins = *bins;
    if (!lambda_grid.empty()) config.lambda_grid = parse_grid(lambda_grid);
    if (auto errors = validate_config(config); !errors.empty()) throw UsageError(join(errors));
    return {config, file_config};
  }

  static std::string join(const std::vector<std::string>& errors) {
    std::string msg = "invalid configuration:";
    for (const auto& e : errors) msg += "\n  " + e;
    return msg;
  }
};

// Command-line value, else the echoed one from --config.
std::string source_or_echo(const std::string& given, const nlohmann::json& echo, const char* key) {
  if (!given.empty()) return given;
  if (echo.contains(key) && echo[key].is_string()) return echo[key].get<std::string>();
  return {};
}

CorpusInput load_input(const std::string& source, const std::string& labels, const char* what) {
  if (source.empty()) throw UsageError(std::string("missing ") + what + " corpus path");
  if (!fs::exists(source)) throw UsageError(std::string(what) + " corpus '" + source + "' not found");
  if (!labels.empty() && !fs::is_regular_file(labels)) throw UsageError("label file '" + labels + "' not found");
  std::optional<fs::path> label_path;
  if (!labels.empty()) label_path = labels;
  return {source, load_corpus(source, label_path)};
}

void write_report(const Json& report, const fs::path& out_dir) {
  if (auto errors = validate_report(report); !errors.empty()) {
    throw Error("report failed schema validation: " + errors.front());
  }
  auto csvs = report_csvs(report);
  write_file(out_dir / "report.json", dump_report(report));
  for (const auto& [name, content] : csvs) write_file(out_dir / "csv" / name, content);
}

int cmd_ingest(const std::string& manifest_path, const std::string& out_dir, std::ostream& out) {
  if (!fs::is_regular_file(manifest_path)) throw UsageError("manifest '" + manifest_path + "' not found");
  CorpusManifest manifest = load_manifest(manifest_path);
  IngestResult result = ingest_manifest(manifest);
  fs::create_directories(out_dir);
  Json log;
  log["corpus_id"] = manifest.corpus_id;
  log["songs"] = Json::array();
  for (const Song& s : result.songs) {
    write_file(fs::path(out_dir) / (s.id + ".json"), song_to_json(s).dump(2) + "\n");
    log["songs"].push_back(s.id);
  }
  log["skipped"] = Json::array();
  for (const SkippedFile& s : result.skipped) log["skipped"].push_back({{"path", s.path}, {"reason", s.reason}});
  write_file(fs::path(out_dir) / kIngestLogName, log.dump(2) + "\n");
  if (manifest.labels) fs::copy_file(*manifest.labels, fs::path(out_dir) / kLabelFileName, fs::copy_options::overwrite_existing);
  out << "ingested " << result.songs.size() << " song(s), skipped " << result.skipped.size() << "\n";
  return result.songs.empty() ? kExitData : kExitOk;
}

int cmd_baseline(const std::string& corpus, const std::string& labels, const std::string& kind, int length, int count,
                 std::uint64_t seed, const std::string& out_path, std::ostream& out) {
  Json j;
  j["kind"] = kind;
  j["length"] = length;
  j["count"] = count;
  j["seed"] = seed;
  j["phrases"] = Json::array();
  auto emit = [&](const auto& phrases) {
    for (const auto& p : phrases) {
      Json row = Json::array();
      for (const auto& pat : p) row.push_back(pat.to_string());
      j["phrases"].push_back(std::move(row));
    }
  };
  if (corpus.empty()) {
    if (kind != "onset") throw UsageError("--kind pitch needs --corpus");
    std::map<OnsetPattern, double> uniform;
    for (int m = 0; m < OnsetPattern::kCount; ++m) uniform[OnsetPattern(static_cast<std::uint8_t>(m << 1))] = 1.0;
    j["distribution"] = "uniform";
    emit(sample_baseline_phrases(PatternDistribution<OnsetPattern>::from_counts(uniform), length, count, seed));
  } else {
    CorpusInput input = load_input(corpus, labels, "baseline");
    ExperimentConfig config;
    Corpus c = build_corpus(input.loaded.id, input.loaded.songs, input.loaded.labels, config);
    j["distribution"] = input.loaded.id;
    if (kind == "onset") {
      emit(sample_baseline_phrases(PatternDistribution<OnsetPattern>::from_sequences(phrase_onset_units(c)), length,
                                   count, seed));
    } else {
      emit(sample_baseline_phrases(PatternDistribution<PitchPattern>::from_sequences(phrase_pitch_units(c)), length,
                                   count, seed));
    }
  }
  std::string text = j.dump(2) + "\n";
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kExitOk;
}

int dispatch(CLI::App& app, int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  auto* ingest = app.add_subcommand("ingest", "Parse a corpus manifest into canonical song JSON");
  std::string manifest, ingest_out;
  ingest->add_option("manifest", manifest, "Corpus manifest JSON")->required();
  ingest->add_option("--out", ingest_out, "Output directory")->required();

  auto* analyze = app.add_subcommand("analyze", "Run every analysis on one corpus");
  std::string corpus, labels, analyze_out;
  ExperimentFlags analyze_flags;
  analyze->add_option("corpus", corpus, "Ingested song directory or manifest");
  analyze->add_option("--labels", labels, "Structure label file (id<TAB>labels)");
  analyze->add_option("--out", analyze_out, "Output directory")->required();
  analyze_flags.add(analyze);

  auto* compare = app.add_subcommand("compare", "Compare a generated corpus against a reference corpus");
  std::string reference, generated, generated_labels, compare_out;
  ExperimentFlags compare_flags;
  compare->add_option("reference", reference, "Reference corpus");
  compare->add_option("generated", generated, "Generated corpus");
  compare->add_option("--labels", labels, "Reference label file");
  compare->add_option("--generated-labels", generated_labels, "Generated label file");
  compare->add_option("--out", compare_out, "Output directory")->required();
  compare_flags.add(compare);

  auto* baseline = app.add_subcommand("baseline", "Emit random baseline phrases");
  std::string baseline_corpus, kind = "onset", baseline_out;
  int length = 16, count = 1;
  std::uint64_t seed = 0;
  baseline->add_option("--corpus", baseline_corpus, "Corpus whose pattern distribution is sampled (uniform if absent)");
  baseline->add_option("--labels", labels, "Structure label file");
  baseline->add_option("--kind", kind, "onset or pitch")->check(CLI::IsMember({"onset", "pitch"}));
  baseline->add_option("--length", length, "Patterns per phrase")->check(CLI::NonNegativeNumber);
  baseline->add_option("--count", count, "Number of phrases")->check(CLI::PositiveNumber);
  baseline->add_option("--seed", seed, "Random seed");
  baseline->add_option("--out", baseline_out, "Output file (stdout if absent)");

  auto* plot_data = app.add_subcommand("plot-data", "Re-emit CSV tables from a report");
  std::string report_path, plot_out;
  plot_data->add_option("report", report_path, "report.json")->required();
  plot_data->add_option("--out", plot_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (ingest->parsed()) return cmd_ingest(manifest, ingest_out, out);

  if (analyze->parsed()) {
    auto [config, echo_in] = analyze_flags.resolve();
    std::string source = source_or_echo(corpus, echo_in, "reference");
    std::string label_source = source_or_echo(labels, echo_in, "reference_labels");
    CorpusInput input = load_input(source, label_source, "reference");
    std::map<std::string, std::string> sources{{"reference", source}};
    if (!label_source.empty()) sources["reference_labels"] = label_source;
    write_report(build_analysis_report(input, config, config_echo(config, sources)), analyze_out);
    out << "wrote " << (fs::path(analyze_out) / "report.json").string() << "\n";
    return kExitOk;
  }

  if (compare->parsed()) {
    auto [config, echo_in] = compare_flags.resolve();
    std::string ref = source_or_echo(reference, echo_in, "reference");
    std::string gen = source_or_echo(generated, echo_in, "generated");
    std::string ref_labels = source_or_echo(labels, echo_in, "reference_labels");
    std::string gen_labels = source_or_echo(generated_labels, echo_in, "generated_labels");
    CorpusInput ref_input = load_input(ref, ref_labels, "reference");
    CorpusInput gen_input = load_input(gen, gen_labels, "generated");
    std::map<std::string, std::string> sources{{"reference", ref}, {"generated", gen}};
    if (!ref_labels.empty()) sources["reference_labels"] = ref_labels;
    if (!gen_labels.empty()) sources["generated_labels"] = gen_labels;
    write_report(build_comparison_report(ref_input, gen_input, config, config_echo(config, sources)), compare_out);
    out << "wrote " << (fs::path(compare_out) / "report.json").string() << "\n";
    return kExitOk;
  }

  if (baseline->parsed()) return cmd_baseline(baseline_corpus, labels, kind, length, count, seed, baseline_out, out);

  if (plot_data->parsed()) {
    if (!fs::is_regular_file(report_path)) throw UsageError("report '" + report_path + "' not found");
    Json report = Json::parse(read_file(report_path));
    for (const auto& [name, content] : report_csvs(report)) write_file(fs::path(plot_out) / name, content);
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Repetition and structure analysis for symbolic melodies", "repstruct"};
  try {
    return dispatch(app, argc, argv, out, err);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"repstruct"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace repstruct
