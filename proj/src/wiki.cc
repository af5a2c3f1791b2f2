// Copyright 2026 The Corefens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "corefens/wiki.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "corefens/errors.h"
#include "corefens/rng.h"

namespace corefens {

namespace {

namespace fs = std::filesystem;

constexpr size_t kBatchSize = 512;

// ---------------------------------------------------------------------------
// UTF-8 helpers

// Decodes the code point at `pos`, storing its byte length in `len`.
// Returns -1 (with len 1) on a malformed sequence.
int32_t DecodeUtf8(std::string_view s, size_t pos, int *len) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int n;
  int32_t cp;
  if (b0 < 0x80) {
    *len = 1;
    return b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    n = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    n = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    n = 4;
    cp = b0 & 0x07;
  } else {
    *len = 1;
    return -1;
  }
  if (pos + n > s.size()) {
    *len = 1;
    return -1;
  }
  for (int k = 1; k < n; ++k) {
    const auto b = static_cast<unsigned char>(s[pos + k]);
    if ((b & 0xC0) != 0x80) {
      *len = 1;
      return -1;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr int32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[n] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
    *len = 1;
    return -1;
  }
  *len = n;
  return cp;
}

bool IsValidUtf8(std::string_view s) {
  for (size_t pos = 0; pos < s.size();) {
    int len;
    if (DecodeUtf8(s, pos, &len) < 0) return false;
    pos += len;
  }
  return true;
}

void AppendUtf8(std::string &out, int32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

bool IsSpace(int32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\v': case '\f': case '\r':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool IsPunct(int32_t cp) {
  if (cp < 0x80) {
    return (cp >= '!' && cp <= '/') || (cp >= ':' && cp <= '@') ||
           (cp >= '[' && cp <= '`') || (cp >= '{' && cp <= '~');
  }
  switch (cp) {
    case 0xA1: case 0xA7: case 0xAB: case 0xB6: case 0xB7: case 0xBB:
    case 0xBF: case 0x060C: case 0x061B: case 0x061F: case 0x06D4:
      return true;
    default:
      return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) ||
             (cp >= 0x3001 && cp <= 0x3003) || (cp >= 0x3008 && cp <= 0x3011) ||
             (cp >= 0x066A && cp <= 0x066D) || (cp >= 0xFF01 && cp <= 0xFF0F);
  }
}

// Simple uppercase mapping for Latin, Greek and Cyrillic letters.
int32_t ToUpper(int32_t cp) {
  if (cp >= 'a' && cp <= 'z') return cp - 32;
  if (cp >= 0xE0 && cp <= 0xFE && cp != 0xF7) return cp - 32;
  if (cp == 0xFF) return 0x178;
  if (cp >= 0x100 && cp <= 0x17F && cp != 0x130 && cp != 0x131 &&
      cp != 0x138 && cp != 0x149 && cp != 0x17F) {
    // Latin Extended-A pairs are even/odd, except for a shifted middle run.
    const bool shifted = (cp >= 0x139 && cp <= 0x148) ||
                         (cp >= 0x179 && cp <= 0x17E);
    const bool lower = shifted ? (cp % 2 == 0) : (cp % 2 == 1);
    return lower ? cp - 1 : cp;
  }
  if (cp >= 0x3B1 && cp <= 0x3C9 && cp != 0x3C2) return cp - 32;
  if (cp >= 0x430 && cp <= 0x44F) return cp - 32;
  if (cp >= 0x450 && cp <= 0x45F) return cp - 80;
  return cp;
}

std::string UppercaseFirst(std::string_view s) {
  if (s.empty()) return {};
  int len;
  const int32_t cp = DecodeUtf8(s, 0, &len);
  if (cp < 0) return std::string(s);
  std::string out;
  AppendUtf8(out, ToUpper(cp));
  out.append(s.substr(len));
  return out;
}

// Collapses runs of whitespace to one space and trims both ends.
std::string CollapseSpaces(std::string_view s) {
  std::string out;
  bool pending = false;
  for (size_t pos = 0; pos < s.size();) {
    int len;
    const int32_t cp = DecodeUtf8(s, pos, &len);
    if (cp >= 0 && IsSpace(cp)) {
      pending = !out.empty();
    } else {
      if (pending) out += ' ';
      pending = false;
      out.append(s.substr(pos, len));
    }
    pos += len;
  }
  return out;
}

// Interlanguage and interwiki prefixes such as "es" or "zh-yue".
bool IsLanguagePrefix(std::string_view p) {
  const size_t dash = p.find('-');
  std::string_view head = p.substr(0, dash);
  if (head.size() < 2 || head.size() > 3) return false;
  auto lower = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(),
                       [](char c) { return c >= 'a' && c <= 'z'; });
  };
  if (!lower(head)) return false;
  return dash == std::string_view::npos ||
         (dash + 1 < p.size() && lower(p.substr(dash + 1)));
}

// ---------------------------------------------------------------------------
// Link parser

class LinkParser {
 public:
  LinkParser(std::string_view body, const WikiCorpusSpec &spec)
      : s_(body), spec_(spec) {}

  ParsedWikitext Run() {
    ParseUntil(false);
    out_.warnings = std::move(warnings_);
    return std::move(out_);
  }

 private:
  bool At(std::string_view token) const {
    return s_.substr(pos_).starts_with(token);
  }

  // Parses text until the end of input or, inside a link, its closing
  // brackets. Returns true when the brackets were found.
  bool ParseUntil(bool in_link) {
    while (pos_ < s_.size()) {
      if (At("<!--")) {
        const size_t close = s_.find("-->", pos_ + 4);
        if (close == std::string_view::npos) {
          warnings_.push_back("unterminated comment");
          pos_ = s_.size();
        } else {
          pos_ = close + 3;
        }
      } else if (At("{{")) {
        SkipTemplate();
      } else if (in_link && At("]]")) {
        pos_ += 2;
        return true;
      } else if (At("[[")) {
        pos_ += 2;
        ParseLink();
      } else if (At("''")) {
        while (pos_ < s_.size() && s_[pos_] == '\'') ++pos_;
      } else {
        out_.text += s_[pos_++];
      }
    }
    return false;
  }

  void SkipTemplate() {
    const size_t start = pos_;
    int depth = 0;
    while (pos_ < s_.size()) {
      if (At("{{")) {
        ++depth;
        pos_ += 2;
      } else if (At("}}")) {
        pos_ += 2;
        if (--depth == 0) return;
      } else {
        ++pos_;
      }
    }
    warnings_.push_back(
        fmt::format("unterminated template at byte {}", start));
    pos_ = start + 2;
  }

  // Called just after `[[`.
  void ParseLink() {
    const size_t start = pos_;
    const size_t text_mark = out_.text.size();
    const size_t anchor_mark = out_.anchors.size();

    size_t k = pos_;
    while (k < s_.size() && s_[k] != '|' && s_[k] != '\n' &&
           !s_.substr(k).starts_with("]]") && !s_.substr(k).starts_with("[[")) {
      ++k;
    }
    const bool piped = k < s_.size() && s_[k] == '|';
    const bool closed_bare = s_.substr(k).starts_with("]]");
    std::string_view raw = s_.substr(start, k - start);
    bool closed = false;
    if (piped) {
      pos_ = k + 1;
      closed = ParseUntil(true);
    } else if (closed_bare) {
      std::string_view shown = raw;
      if (shown.starts_with(':')) shown.remove_prefix(1);
      out_.text.append(shown);
      pos_ = k + 2;
      closed = true;
    }
    if (!closed) {
      out_.text.resize(text_mark);
      out_.anchors.resize(anchor_mark);
      warnings_.push_back(fmt::format("unterminated link at byte {}", start));
      pos_ = start;
      return;
    }

    std::optional<std::string> target = NormalizeTarget(raw, spec_);
    if (!target) {
      out_.text.resize(text_mark);
      out_.anchors.resize(anchor_mark);
      return;
    }
    if (target->empty() && raw.find('#') == std::string_view::npos) {
      warnings_.push_back(fmt::format("link without target at byte {}", start));
      return;
    }
    size_t begin = text_mark;
    size_t end = out_.text.size();
    while (begin < end && out_.text[begin] == ' ') ++begin;
    while (end > begin && out_.text[end - 1] == ' ') --end;
    if (begin == end) {
      warnings_.push_back(fmt::format("link with empty text at byte {}", start));
      return;
    }
    out_.anchors.push_back({std::move(*target), begin, end});
  }

  std::string_view s_;
  const WikiCorpusSpec &spec_;
  size_t pos_ = 0;
  ParsedWikitext out_;
  std::vector<std::string> warnings_;
};

std::string Unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char next = s[i + 1];
      if (next == 'n' || next == 't' || next == '\\') {
        out += next == 'n' ? '\n' : next == 't' ? '\t' : '\\';
        ++i;
        continue;
      }
    }
    out += s[i];
  }
  return out;
}

struct Record {
  std::string title;
  std::string body;
  // Reason the record could not be read; empty when it is usable.
  std::string problem;
};

Record ParseRecordLine(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  Record r;
  const size_t tab = line.find('\t');
  if (tab == std::string_view::npos) {
    r.problem = "record has no tab separator";
  } else if (!IsValidUtf8(line)) {
    r.problem = "record is not valid UTF-8";
  } else {
    r.title = Unescape(line.substr(0, tab));
    r.body = Unescape(line.substr(tab + 1));
  }
  return r;
}

// Pulls records from a record file or a directory of wikitext files.
class RecordSource {
 public:
  explicit RecordSource(const std::string &path) {
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      for (const auto &entry : fs::directory_iterator(path)) {
        if (entry.is_regular_file()) files_.push_back(entry.path());
      }
      std::sort(files_.begin(), files_.end());
      directory_ = true;
    } else if (fs::is_regular_file(path, ec)) {
      in_.open(path, std::ios::binary);
      if (!in_) throw DataError("cannot open " + path);
    } else {
      throw DataError("input not found: " + path);
    }
  }

  bool Next(Record *record) {
    if (!directory_) {
      std::string line;
      while (std::getline(in_, line)) {
        if (line.empty() || line == "\r") continue;
        *record = ParseRecordLine(line);
        return true;
      }
      return false;
    }
    if (next_file_ >= files_.size()) return false;
    const fs::path &file = files_[next_file_++];
    *record = Record{};
    std::string name = file.filename().string();
    for (std::string_view ext : {".wikitext", ".wiki", ".txt"}) {
      if (name.size() > ext.size() && name.ends_with(ext)) {
        name.resize(name.size() - ext.size());
        break;
      }
    }
    record->title = name;
    try {
      record->body = ReadTextFile(file.string());
      if (!IsValidUtf8(record->body) || !IsValidUtf8(name)) {
        record->problem = "file is not valid UTF-8";
      }
    } catch (const DataError &e) {
      record->problem = e.what();
    }
    return true;
  }

 private:
  bool directory_ = false;
  std::vector<fs::path> files_;
  size_t next_file_ = 0;
  std::ifstream in_;
};

}  // namespace

// ---------------------------------------------------------------------------

std::vector<std::string> WikiCorpusSpec::DefaultNamespaces() {
  return {// English and generic
          "Media", "File", "Image", "Category", "Template", "Wikipedia", "WP",
          "Help", "Portal", "Special", "Talk", "User", "MediaWiki", "Module",
          "Draft", "Book", "Wiktionary", "Wikt",
          // Spanish
          "Archivo", "Imagen", "Categoría", "Plantilla", "Anexo", "Ayuda",
          "Especial", "Usuario", "Discusión",
          // Dutch
          "Bestand", "Afbeelding", "Categorie", "Sjabloon", "Overleg",
          "Gebruiker",
          // German and French
          "Datei", "Bild", "Kategorie", "Vorlage", "Fichier", "Catégorie",
          "Modèle",
          // Arabic
          "ملف", "صورة", "تصنيف", "قالب", "ويكيبيديا", "بوابة"};
}

void WikiCorpusSpec::Validate() const {
  if (dev_docs < 0 || test_docs < 0) {
    throw ConfigError("dev and test document counts must be non-negative");
  }
  if (min_nonsingleton_clusters < 0) {
    throw ConfigError("min_nonsingleton_clusters must be non-negative");
  }
  if (!(max_skip_rate >= 0.0 && max_skip_rate <= 1.0)) {
    throw ConfigError("max skip rate must be in [0, 1]");
  }
}

ParsedWikitext ParseWikitextLinks(std::string_view body,
                                  const WikiCorpusSpec &spec) {
  return LinkParser(body, spec).Run();
}

std::optional<std::string> NormalizeTarget(std::string_view raw,
                                           const WikiCorpusSpec &spec) {
  std::string_view t = raw;
  const size_t hash = t.find('#');
  if (hash != std::string_view::npos) t = t.substr(0, hash);
  std::string s(t);
  std::replace(s.begin(), s.end(), '_', ' ');
  s = CollapseSpaces(s);
  if (!s.empty() && s.front() == ':') s = CollapseSpaces(s.substr(1));

  const size_t colon = s.find(':');
  if (colon != std::string::npos) {
    const std::string prefix = CollapseSpaces(s.substr(0, colon));
    if (IsLanguagePrefix(prefix)) return std::nullopt;
    const std::string upper = UppercaseFirst(prefix);
    for (const std::string &ns : spec.excluded_namespaces) {
      if (upper == UppercaseFirst(ns)) return std::nullopt;
    }
  }
  return UppercaseFirst(s);
}

std::vector<TextToken> Tokenize(std::string_view text) {
  std::vector<TextToken> tokens;
  struct Char {
    size_t begin;
    size_t end;
    bool punct;
  };
  std::vector<Char> piece;
  auto flush = [&]() {
    size_t lo = 0;
    size_t hi = piece.size();
    while (lo < hi && piece[lo].punct) ++lo;
    while (hi > lo && piece[hi - 1].punct) --hi;
    auto emit = [&](size_t b, size_t e) {
      tokens.push_back({std::string(text.substr(b, e - b)), b, e});
    };
    for (size_t k = 0; k < lo; ++k) emit(piece[k].begin, piece[k].end);
    if (lo < hi) emit(piece[lo].begin, piece[hi - 1].end);
    for (size_t k = hi; k < piece.size(); ++k) {
      emit(piece[k].begin, piece[k].end);
    }
    piece.clear();
  };
  for (size_t pos = 0; pos < text.size();) {
    int len;
    const int32_t cp = DecodeUtf8(text, pos, &len);
    if (cp >= 0 && IsSpace(cp)) {
      flush();
    } else {
      piece.push_back({pos, pos + len, cp >= 0 && IsPunct(cp)});
    }
    pos += len;
  }
  flush();
  return tokens;
}

BuiltDocument BuildDocument(const WikiArticle &article,
                            const WikiCorpusSpec &spec) {
  std::optional<std::string> title = NormalizeTarget(article.title, spec);
  if (!title || title->empty()) {
    throw DataError("not an article title: '" + article.title + "'");
  }
  ParsedWikitext parsed = ParseWikitextLinks(article.body, spec);
  const std::vector<TextToken> tokens = Tokenize(parsed.text);

  BuiltDocument built;
  built.warnings = std::move(parsed.warnings);
  built.anchors = static_cast<int>(parsed.anchors.size());

  std::vector<std::string> words;
  words.reserve(tokens.size());
  for (const TextToken &t : tokens) words.push_back(t.text);

  std::map<std::string, size_t> by_target;
  std::set<MentionSpan> used;
  Clustering clusters;
  for (const RawAnchor &anchor : parsed.anchors) {
    // First token ending after the anchor start, last token starting
    // before its end.
    auto first = std::upper_bound(
        tokens.begin(), tokens.end(), anchor.begin,
        [](size_t b, const TextToken &t) { return b < t.end; });
    auto last = std::lower_bound(
        tokens.begin(), tokens.end(), anchor.end,
        [](const TextToken &t, size_t e) { return t.begin < e; });
    if (first == tokens.end() || last == tokens.begin() || first >= last) {
      built.warnings.push_back("anchor covers no token: " + anchor.target);
      continue;
    }
    --last;
    if (first->begin != anchor.begin || last->end != anchor.end) {
      built.warnings.push_back(fmt::format(
          "anchor '{}' not on token boundaries, extended to '{}'",
          parsed.text.substr(anchor.begin, anchor.end - anchor.begin),
          parsed.text.substr(first->begin, last->end - first->begin)));
    }
    const MentionSpan span{static_cast<int>(first - tokens.begin()),
                           static_cast<int>(last - tokens.begin())};
    if (!used.insert(span).second) {
      built.warnings.push_back(fmt::format(
          "anchor to '{}' shares its tokens with an earlier anchor",
          anchor.target));
      continue;
    }
    std::string target = anchor.target.empty() ? *title : anchor.target;
    if (auto it = spec.redirects.find(target); it != spec.redirects.end()) {
      target = it->second;
    }
    auto [it, fresh] = by_target.try_emplace(target, clusters.size());
    if (fresh) clusters.emplace_back();
    clusters[it->second].spans.push_back(span);
  }
  built.document = Document::Make(*title, words, std::move(clusters),
                                  spec.language);
  return built;
}

WikiSplits FilterAndSplit(std::vector<Document> docs,
                          const WikiCorpusSpec &spec) {
  spec.Validate();
  WikiSplits out;
  std::vector<Document> kept;
  for (Document &doc : docs) {
    const auto links = std::count_if(
        doc.gold_clusters.begin(), doc.gold_clusters.end(),
        [](const Cluster &c) { return c.size() >= 2; });
    if (links >= spec.min_nonsingleton_clusters) {
      kept.push_back(std::move(doc));
    } else {
      ++out.filtered;
    }
  }
  auto by_id = [](const Document &a, const Document &b) { return a.id < b.id; };
  std::sort(kept.begin(), kept.end(), by_id);
  for (size_t i = 1; i < kept.size(); ++i) {
    if (kept[i].id == kept[i - 1].id) {
      throw DataError("duplicate document id " + kept[i].id);
    }
  }
  const size_t held_out =
      static_cast<size_t>(spec.dev_docs) + static_cast<size_t>(spec.test_docs);
  if (kept.size() < held_out) {
    throw DataError(fmt::format(
        "{} documents survive filtering, but {} dev + {} test are required",
        kept.size(), spec.dev_docs, spec.test_docs));
  }
  Rng(spec.seed).Shuffle(kept);

  out.dev.split = Split::kDev;
  out.test.split = Split::kTest;
  out.train.split = Split::kTrain;
  for (size_t i = 0; i < kept.size(); ++i) {
    Corpus &target = i < static_cast<size_t>(spec.dev_docs) ? out.dev
                     : i < held_out                         ? out.test
                                                            : out.train;
    target.documents.push_back(std::move(kept[i]));
  }
  for (Corpus *c : {&out.train, &out.dev, &out.test}) {
    std::sort(c->documents.begin(), c->documents.end(), by_id);
  }
  return out;
}

std::string WikiStats::ToTsv() const {
  const std::pair<const char *, size_t> rows[] = {
      {"records", records},
      {"skipped", skipped},
      {"built", built},
      {"kept", kept},
      {"filtered", filtered},
      {"anchors", anchors},
      {"mentions", mentions},
      {"clusters", clusters},
      {"nonsingleton_clusters", nonsingleton_clusters},
      {"train", train},
      {"dev", dev},
      {"test", test},
      {"warnings", warnings},
  };
  std::string out;
  for (const auto &[key, value] : rows) out += fmt::format("{}\t{}\n", key, value);
  return out;
}

WikiStats StreamBuild(const std::string &input_path,
                      const WikiCorpusSpec &spec,
                      const std::string &output_dir) {
  spec.Validate();
  RecordSource source(input_path);
  WikiStats stats;
  std::vector<Document> docs;
  std::set<std::string> titles;

  std::vector<Record> batch;
  auto process = [&]() {
    const int n = static_cast<int>(batch.size());
    std::vector<std::optional<BuiltDocument>> built(n);
    std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      if (!batch[i].problem.empty()) continue;
      try {
        built[i] = BuildDocument({batch[i].title, batch[i].body}, spec);
      } catch (const DataError &e) {
        errors[i] = e.what();
      }
    }
    // Bookkeeping runs serially in input order.
    for (int i = 0; i < n; ++i) {
      ++stats.records;
      std::string problem =
          !batch[i].problem.empty() ? batch[i].problem : errors[i];
      if (problem.empty() && !titles.insert(built[i]->document.id).second) {
        problem = "duplicate title " + built[i]->document.id;
      }
      if (!problem.empty()) {
        ++stats.skipped;
        ++stats.warnings;
        spdlog::warn("skipping record {}: {}", stats.records, problem);
        continue;
      }
      ++stats.built;
      stats.anchors += built[i]->anchors;
      for (const std::string &w : built[i]->warnings) {
        ++stats.warnings;
        spdlog::warn("{}: {}", built[i]->document.id, w);
      }
      docs.push_back(std::move(built[i]->document));
    }
    batch.clear();
  };

  Record record;
  while (source.Next(&record)) {
    batch.push_back(std::move(record));
    if (batch.size() == kBatchSize) process();
  }
  process();

  if (stats.records == 0) throw DataError("no documents");
  if (static_cast<double>(stats.skipped) >
      spec.max_skip_rate * static_cast<double>(stats.records)) {
    throw DataError(fmt::format(
        "skipped {} of {} records, above the {:.0f}% limit", stats.skipped,
        stats.records, 100.0 * spec.max_skip_rate));
  }
  if (docs.empty()) throw DataError("no documents");

  WikiSplits splits = FilterAndSplit(std::move(docs), spec);
  stats.filtered = splits.filtered;
  stats.train = splits.train.size();
  stats.dev = splits.dev.size();
  stats.test = splits.test.size();
  stats.kept = stats.train + stats.dev + stats.test;
  for (const Corpus *c : {&splits.train, &splits.dev, &splits.test}) {
    for (const Document &doc : c->documents) {
      stats.clusters += doc.gold_clusters.size();
      for (const Cluster &cluster : doc.gold_clusters) {
        stats.mentions += cluster.size();
        if (cluster.size() >= 2) ++stats.nonsingleton_clusters;
      }
    }
  }

  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw DataError("cannot create " + output_dir + ": " + ec.message());
  const fs::path dir(output_dir);
  WriteTextFile((dir / "train.conll").string(), EmitConll(splits.train));
  WriteTextFile((dir / "dev.conll").string(), EmitConll(splits.dev));
  WriteTextFile((dir / "test.conll").string(), EmitConll(splits.test));
  WriteTextFile((dir / "stats.tsv").string(), stats.ToTsv());
  return stats;
}

std::map<std::string, std::string> ReadRedirects(const std::string &path) {
  const std::string text = ReadTextFile(path);
  WikiCorpusSpec plain;
  plain.excluded_namespaces.clear();
  std::map<std::string, std::string> out;
  int line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const size_t tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw ParseError("redirect line needs from<TAB>to", line_no);
    }
    auto from = NormalizeTarget(line.substr(0, tab), plain);
    auto to = NormalizeTarget(line.substr(tab + 1), plain);
    if (!from || !to || from->empty() || to->empty()) {
      throw ParseError("empty redirect title", line_no);
    }
    out[*from] = *to;
  }
  return out;
}

}  // namespace corefens
