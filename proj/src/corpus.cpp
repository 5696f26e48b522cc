#include "repstruct/corpus.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "repstruct/error.h"

namespace repstruct {

namespace fs = std::filesystem;

std::string to_string(FileFormat f) {
  switch (f) {
    case FileFormat::kMidi:
      return "midi";
    case FileFormat::kMusicXml:
      return "musicxml";
    case FileFormat::kSongJson:
      return "song-json";
  }
  return "unknown";
}

namespace {

FileFormat parse_format(const std::string& s) {
  if (s == "midi") return FileFormat::kMidi;
  if (s == "musicxml") return FileFormat::kMusicXml;
  if (s == "song-json") return FileFormat::kSongJson;
  throw ParseError("unknown file format tag '" + s + "'");
}

}  // namespace

FileFormat format_from_path(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".mid" || ext == ".midi") return FileFormat::kMidi;
  if (ext == ".xml" || ext == ".musicxml") return FileFormat::kMusicXml;
  if (ext == ".json") return FileFormat::kSongJson;
  throw RejectionError("cannot infer file format of '" + path.string() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RejectionError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CorpusManifest load_manifest(const fs::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("manifest '" + path.string() + "' is not valid JSON: " + e.what(), e.byte);
  }
  const fs::path base = path.parent_path();
  CorpusManifest m;
  try {
    m.corpus_id = j.value("corpus_id", path.stem().string());
    m.root = base / fs::path(j.value("root", std::string(".")));
    if (j.contains("labels")) m.labels = base / fs::path(j.at("labels").get<std::string>());
    for (const auto& f : j.at("files")) {
      ManifestEntry e;
      if (f.is_string()) {
        e.path = f.get<std::string>();
        e.format = format_from_path(e.path);
      } else {
        e.path = f.at("path").get<std::string>();
        e.format = f.contains("format") ? parse_format(f.at("format").get<std::string>()) : format_from_path(e.path);
        if (f.contains("id")) e.id = f.at("id").get<std::string>();
      }
      m.files.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest '" + path.string() + "' is malformed: " + e.what());
  }
  return m;
}

Song ingest_file(const fs::path& path, FileFormat format, std::string id, const MidiOptions& midi) {
  std::string bytes = read_file(path);
  Song song;
  switch (format) {
    case FileFormat::kMidi: {
      std::span<const std::uint8_t> data(reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size());
      song = parse_midi(data, midi, std::move(id));
      break;
    }
    case FileFormat::kMusicXml:
      song = parse_musicxml(bytes, std::move(id));
      break;
    case FileFormat::kSongJson:
      try {
        song = song_from_json(nlohmann::json::parse(bytes));
      } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what(), e.byte);
      }
      break;
  }
  if (song.notes.empty()) throw RejectionError("no melody notes");
  song.key = resolve_tonic(song);
  validate_song(song);
  return song;
}

IngestResult ingest_manifest(const CorpusManifest& manifest, const MidiOptions& midi) {
  IngestResult result;
  for (const ManifestEntry& e : manifest.files) {
    fs::path full = manifest.root / e.path;
    std::string id = e.id.value_or(e.path.stem().string());
    try {
      result.songs.push_back(ingest_file(full, e.format, id, midi));
    } catch (const Error& err) {
      result.skipped.push_back({e.path.string(), err.what()});
    }
  }
  std::sort(result.songs.begin(), result.songs.end(), [](const Song& a, const Song& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < result.songs.size(); ++i) {
    if (result.songs[i].id == result.songs[i - 1].id) {
      throw RejectionError("manifest yields duplicate song id '" + result.songs[i].id + "'");
    }
  }
  return result;
}

std::map<std::string, std::string> load_label_file(const fs::path& path) {
  std::map<std::string, std::string> labels;
  for (auto& [id, text] : parse_label_file(read_file(path))) labels[id] = text;
  return labels;
}

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

LoadedCorpus load_corpus(const fs::path& source, const std::optional<fs::path>& labels) {
  LoadedCorpus corpus;
  std::optional<fs::path> label_path = labels;
  if (fs::is_directory(source)) {
    corpus.id = source.filename().empty() ? source.parent_path().filename().string() : source.filename().string();
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(source)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json" &&
          entry.path().filename() != kIngestLogName) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    if (!label_path && fs::is_regular_file(source / kLabelFileName)) label_path = source / kLabelFileName;
    for (const fs::path& f : files) {
      try {
        corpus.songs.push_back(ingest_file(f, FileFormat::kSongJson, f.stem().string()));
      } catch (const Error& err) {
        corpus.skipped.push_back({f.filename().string(), err.what()});
      }
    }
  } else if (fs::is_regular_file(source)) {
    CorpusManifest m = load_manifest(source);
    corpus.id = m.corpus_id;
    if (!label_path) label_path = m.labels;
    IngestResult r = ingest_manifest(m);
    corpus.songs = std::move(r.songs);
    corpus.skipped = std::move(r.skipped);
  } else {
    throw RejectionError("corpus path '" + source.string() + "' does not exist");
  }
  std::sort(corpus.songs.begin(), corpus.songs.end(), [](const Song& a, const Song& b) { return a.id < b.id; });
  if (label_path) corpus.labels = load_label_file(*label_path);
  for (const Song& s : corpus.songs) corpus.content_hashes[s.id] = sha256_hex(song_to_json(s).dump());
  return corpus;
}

}  // namespace repstruct
