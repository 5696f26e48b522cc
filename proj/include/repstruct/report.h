// AnalysisReport assembly, schema validation, comparison deltas and CSV export.

#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "repstruct/corpus.h"
#include "repstruct/experiments.h"

namespace repstruct {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// Every ExperimentConfig field except `jobs`, which never changes results.
Json config_to_json(const ExperimentConfig& config);

/// Applies recognised keys onto `config`; problems are appended to `errors`.
void apply_config_json(const nlohmann::json& j, ExperimentConfig& config, std::vector<std::string>& errors);

/// Every metric for one corpus. `onset_baseline` is the pattern distribution
/// behind the song-level random baseline; the corpus's own when null.
Json corpus_metrics(const Corpus& corpus, const ExperimentConfig& config,
                    const PatternDistribution<OnsetPattern>* onset_baseline = nullptr);

/// Per-song diagnostics.
Json song_diagnostics(const Corpus& corpus);

/// Numeric leaves present in both trees, as generated - reference, keyed by the same paths.
Json metric_deltas(const Json& reference, const Json& generated);

/// Mann-Whitney tests on per-phrase distinct-pattern counts.
Json vocabulary_significance(const Corpus& reference, const Corpus& generated);

struct CorpusInput {
  std::string source;  // as given on the command line or in the config
  LoadedCorpus loaded;
};

/// Config echo: experiment parameters plus corpus sources.
Json config_echo(const ExperimentConfig& config, const std::map<std::string, std::string>& sources);

Json build_analysis_report(const CorpusInput& input, const ExperimentConfig& config, const Json& echo);
Json build_comparison_report(const CorpusInput& reference, const CorpusInput& generated,
                             const ExperimentConfig& config, const Json& echo);

/// Schema problems; empty for a valid report. Also rejects non-finite numbers.
std::vector<std::string> validate_report(const Json& report);

/// CSV files (name -> content) for every curve, sweep and vocabulary table.
std::map<std::string, std::string> report_csvs(const Json& report);

/// Serialized form written to disk (2-space indent, trailing newline).
std::string dump_report(const Json& report);

}  // namespace repstruct
