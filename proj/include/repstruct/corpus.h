// Corpus manifests, file ingestion with a skip log, and loading of ingested
// song directories.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repstruct/ingest.h"
#include "repstruct/types.h"

namespace repstruct {

enum class FileFormat { kMidi, kMusicXml, kSongJson };

std::string to_string(FileFormat f);
/// From ".mid"/".midi", ".xml"/".musicxml" or ".json"; throws otherwise.
FileFormat format_from_path(const std::filesystem::path& path);

struct ManifestEntry {
  std::filesystem::path path;  // relative to the manifest root
  FileFormat format = FileFormat::kMidi;
  std::optional<std::string> id;  // defaults to the file stem
};

/// JSON: {"corpus_id", "root"?, "labels"?, "files": [{"path", "format"?, "id"?} | "path", ...]}.
/// Relative roots and label paths resolve against the manifest's directory.
struct CorpusManifest {
  std::string corpus_id;
  std::filesystem::path root;
  std::vector<ManifestEntry> files;
  std::optional<std::filesystem::path> labels;
};

CorpusManifest load_manifest(const std::filesystem::path& path);

struct SkippedFile {
  std::string path;
  std::string reason;
};

struct IngestResult {
  std::vector<Song> songs;          // key resolved, ordered by id
  std::vector<SkippedFile> skipped;
};

std::string read_file(const std::filesystem::path& path);

/// Parses one file into a Song with a resolved key. Empty melodies are rejected.
Song ingest_file(const std::filesystem::path& path, FileFormat format, std::string id, const MidiOptions& midi = {});

/// Per-file failures land in `skipped`; nothing is thrown for them.
IngestResult ingest_manifest(const CorpusManifest& manifest, const MidiOptions& midi = {});

struct LoadedCorpus {
  std::string id;
  std::vector<Song> songs;
  std::map<std::string, std::string> labels;
  std::vector<SkippedFile> skipped;
  std::map<std::string, std::string> content_hashes;  // song id -> SHA-256 of its canonical JSON
};

/// Files an ingested directory may hold besides song JSON.
inline constexpr const char* kIngestLogName = "ingest_log.json";
inline constexpr const char* kLabelFileName = "labels.tsv";

/// `source` is a directory of canonical song JSON files or a manifest file.
/// `labels` (TAB-separated) overrides the manifest's label file or the
/// directory's labels.tsv.
LoadedCorpus load_corpus(const std::filesystem::path& source, const std::optional<std::filesystem::path>& labels);

std::map<std::string, std::string> load_label_file(const std::filesystem::path& path);

std::string sha256_hex(std::string_view bytes);

}  // namespace repstruct
