#include <cctype>

#include "repstruct/error.h"
#include "repstruct/ingest.h"

namespace repstruct {

SongStructure parse_labels(std::string_view text, std::optional<int> num_measures, std::string song_id) {
  SongStructure s;
  s.song_id = std::move(song_id);
  std::size_t i = 0;
  int start = 0;
  while (i < text.size()) {
    char letter = text[i];
    if (!std::isalpha(static_cast<unsigned char>(letter))) {
      throw ParseError("illegal character '" + std::string(1, letter) + "' in label string", i);
    }
    ++i;
    std::size_t digits_at = i;
    long length = 0;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      length = length * 10 + (text[i] - '0');
      if (length > 100000) throw ParseError("phrase length too large", digits_at);
      ++i;
    }
    if (i == digits_at) throw ParseError("phrase letter without length", digits_at);
    if (length < 1) throw ParseError("phrase length must be at least 1", digits_at);
    s.labels.push_back({letter, static_cast<int>(length), start});
    start += static_cast<int>(length);
  }
  if (s.labels.empty()) throw ParseError("empty label string");
  if (num_measures && start != *num_measures) {
    throw StructureMismatchError("labels '" + std::string(text) + "' cover " + std::to_string(start) +
                                 " measures but the song has " + std::to_string(*num_measures));
  }
  return s;
}

SongStructure parse_labels(std::string_view text, const Song& song) {
  return parse_labels(text, song.num_measures, song.id);
}

std::string render_labels(const SongStructure& structure) {
  std::string out;
  for (const PhraseLabel& l : structure.labels) {
    out += l.letter;
    out += std::to_string(l.length_measures);
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_label_file(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> rows;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("label file line " + std::to_string(line_no) + " has no TAB separator");
    }
    rows.emplace_back(std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)));
  }
  return rows;
}

}  // namespace repstruct
