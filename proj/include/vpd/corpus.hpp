// Copyright 2026 The vpd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "vpd/csv.hpp"
#include "vpd/error.hpp"
#include "vpd/sha256.hpp"

namespace vpd {

enum class Sex { female, male };

enum class Cohort { female, male, both };

inline std::string cohort_tag(Cohort c) {
  switch (c) {
    case Cohort::female: return "F";
    case Cohort::male: return "M";
    case Cohort::both: return "B";
  }
  throw ValidationError("unknown cohort");
}

inline Cohort cohort_from_tag(const std::string& tag) {
  if (tag == "F" || tag == "f") return Cohort::female;
  if (tag == "M" || tag == "m") return Cohort::male;
  if (tag == "B" || tag == "b") return Cohort::both;
  throw ValidationError("unknown cohort tag: " + tag);
}

// One recording session row from the corpus metadata table.
struct SessionRecord {
  std::string talker_id;
  std::string session_id;
  std::string date;  // ISO YYYY-MM-DD; lexicographic order is time order
  Sex sex = Sex::female;
  int age = 0;
  std::vector<std::string> pathologies;  // empty means healthy
  std::string comment;
  std::string file_name;

  // Positive class (1) is pathological.
  int label() const { return pathologies.empty() ? 0 : 1; }
};

struct ExclusionEntry {
  std::string file_name;
  std::string stage;   // underage | rule | singer_only | comment_artifact |
                       // duplicate_session | unusable_audio
  std::string reason;
};

struct CuratedCorpus {
  std::vector<SessionRecord> records;
  std::vector<ExclusionEntry> exclusions;
};

// Curation rule set. File rules name specific recordings; marker rules are
// substring predicates over the comment field (defective recordings) or the
// pathology list (singing-voice annotations that do not indicate disease).
struct ExclusionRules {
  std::map<std::string, std::string> file_reasons;
  std::vector<std::string> comment_markers;
  std::vector<std::string> singer_markers;
};

namespace detail {

inline std::string trim_ws(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : s) {
    if (c == sep) {
      const std::string t = trim_ws(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  const std::string t = trim_ws(cur);
  if (!t.empty()) out.push_back(t);
  return out;
}

inline std::size_t column_index(const std::vector<std::string>& header,
                                const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw FormatError("metadata: missing column '" + name + "'");
}

}  // namespace detail

inline Sex parse_sex(const std::string& raw) {
  const std::string s = detail::trim_ws(raw);
  if (s == "f" || s == "F" || s == "w" || s == "W" || s == "female") {
    return Sex::female;
  }
  if (s == "m" || s == "M" || s == "male") return Sex::male;
  throw FormatError("metadata: unknown sex value '" + raw + "'");
}

// Load the session table. Required columns: talker_id, session_id, date,
// sex, age, pathologies, comment, file_name. The pathologies field is a
// semicolon-separated list; blank means healthy.
inline std::vector<SessionRecord> read_metadata(const std::string& path) {
  const auto rows = csv::parse_file(path);
  if (rows.empty()) throw FormatError("metadata: empty file " + path);
  const auto& header = rows[0];
  const std::size_t c_talker = detail::column_index(header, "talker_id");
  const std::size_t c_session = detail::column_index(header, "session_id");
  const std::size_t c_date = detail::column_index(header, "date");
  const std::size_t c_sex = detail::column_index(header, "sex");
  const std::size_t c_age = detail::column_index(header, "age");
  const std::size_t c_path = detail::column_index(header, "pathologies");
  const std::size_t c_comment = detail::column_index(header, "comment");
  const std::size_t c_file = detail::column_index(header, "file_name");
  std::vector<SessionRecord> records;
  records.reserve(rows.size() - 1);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw FormatError("metadata: row " + std::to_string(r + 1) +
                        " has wrong field count");
    }
    SessionRecord rec;
    rec.talker_id = detail::trim_ws(row[c_talker]);
    rec.session_id = detail::trim_ws(row[c_session]);
    rec.date = detail::trim_ws(row[c_date]);
    rec.sex = parse_sex(row[c_sex]);
    try {
      rec.age = std::stoi(detail::trim_ws(row[c_age]));
    } catch (const std::exception&) {
      throw FormatError("metadata: bad age in row " + std::to_string(r + 1));
    }
    if (rec.age < 0 || rec.age > 130) {
      throw FormatError("metadata: implausible age in row " +
                        std::to_string(r + 1));
    }
    rec.pathologies = detail::split_list(row[c_path], ';');
    rec.comment = row[c_comment];
    rec.file_name = detail::trim_ws(row[c_file]);
    if (rec.talker_id.empty() || rec.file_name.empty()) {
      throw FormatError("metadata: missing talker or file in row " +
                        std::to_string(r + 1));
    }
    records.push_back(std::move(rec));
  }
  return records;
}

// Rules file: CSV with header kind,value,reason. kind is one of
// file | comment_marker | singer_marker.
inline ExclusionRules read_exclusion_rules(const std::string& path) {
  const auto rows = csv::parse_file(path);
  if (rows.empty()) throw FormatError("rules: empty file " + path);
  const auto& header = rows[0];
  const std::size_t c_kind = detail::column_index(header, "kind");
  const std::size_t c_value = detail::column_index(header, "value");
  const std::size_t c_reason = detail::column_index(header, "reason");
  ExclusionRules rules;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) {
      throw FormatError("rules: row " + std::to_string(r + 1) +
                        " has wrong field count");
    }
    const std::string kind = detail::trim_ws(row[c_kind]);
    const std::string value = detail::trim_ws(row[c_value]);
    if (kind == "file") {
      rules.file_reasons[value] = row[c_reason];
    } else if (kind == "comment_marker") {
      rules.comment_markers.push_back(value);
    } else if (kind == "singer_marker") {
      rules.singer_markers.push_back(value);
    } else {
      throw FormatError("rules: unknown kind '" + kind + "'");
    }
  }
  return rules;
}

namespace detail {

inline bool contains_nocase(const std::string& haystack,
                            const std::string& needle) {
  if (needle.empty()) return false;
  auto lower = [](std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
      return static_cast<char>(std::tolower(c));
    });
    return s;
  };
  return lower(haystack).find(lower(needle)) != std::string::npos;
}

}  // namespace detail

// Drop speakers younger than 18 at recording time.
inline CuratedCorpus filter_adults(const std::vector<SessionRecord>& in) {
  CuratedCorpus out;
  for (const auto& rec : in) {
    if (rec.age < 18) {
      out.exclusions.push_back({rec.file_name, "underage",
                                "age " + std::to_string(rec.age)});
    } else {
      out.records.push_back(rec);
    }
  }
  return out;
}

// Apply file rules and marker predicates. A session whose pathology list
// consists only of singing-voice annotations is excluded; if any other
// pathology is present the session stays, with the singer annotations
// removed from its list.
inline CuratedCorpus apply_exclusions(const std::vector<SessionRecord>& in,
                                      const ExclusionRules& rules) {
  CuratedCorpus out;
  for (const auto& rec : in) {
    const auto it = rules.file_reasons.find(rec.file_name);
    if (it != rules.file_reasons.end()) {
      out.exclusions.push_back({rec.file_name, "rule", it->second});
      continue;
    }
    bool bad_comment = false;
    for (const auto& m : rules.comment_markers) {
      if (detail::contains_nocase(rec.comment, m)) {
        bad_comment = true;
        break;
      }
    }
    if (bad_comment) {
      out.exclusions.push_back(
          {rec.file_name, "comment_artifact", rec.comment});
      continue;
    }
    SessionRecord kept = rec;
    if (!rec.pathologies.empty() && !rules.singer_markers.empty()) {
      std::vector<std::string> non_singer;
      for (const auto& p : rec.pathologies) {
        bool singer = false;
        for (const auto& m : rules.singer_markers) {
          if (detail::contains_nocase(p, m)) {
            singer = true;
            break;
          }
        }
        if (!singer) non_singer.push_back(p);
      }
      if (non_singer.empty()) {
        out.exclusions.push_back(
            {rec.file_name, "singer_only", "singing-voice annotation only"});
        continue;
      }
      kept.pathologies = std::move(non_singer);
    }
    out.records.push_back(std::move(kept));
  }
  return out;
}

// Keep the oldest session per talker and class; ties break on session id
// then file name. Afterwards every talker contributes at most one healthy
// and one pathological recording.
inline CuratedCorpus deduplicate(const std::vector<SessionRecord>& in) {
  std::map<std::pair<std::string, int>, std::size_t> keep;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const auto key = std::make_pair(in[i].talker_id, in[i].label());
    const auto it = keep.find(key);
    if (it == keep.end()) {
      keep[key] = i;
      continue;
    }
    const SessionRecord& cur = in[it->second];
    const auto rank = [](const SessionRecord& r) {
      return std::tie(r.date, r.session_id, r.file_name);
    };
    if (rank(in[i]) < rank(cur)) keep[key] = i;
  }
  std::vector<bool> kept(in.size(), false);
  for (const auto& [key, idx] : keep) kept[idx] = true;
  CuratedCorpus out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (kept[i]) {
      out.records.push_back(in[i]);
    } else {
      out.exclusions.push_back({in[i].file_name, "duplicate_session",
                                "talker " + in[i].talker_id +
                                    " has an older session of this class"});
    }
  }
  return out;
}

// Full curation chain: adults only, then rule and marker exclusions, then
// one session per talker and class.
inline CuratedCorpus curate(const std::vector<SessionRecord>& in,
                            const ExclusionRules& rules) {
  CuratedCorpus adults = filter_adults(in);
  CuratedCorpus ruled = apply_exclusions(adults.records, rules);
  CuratedCorpus deduped = deduplicate(ruled.records);
  CuratedCorpus out;
  out.records = std::move(deduped.records);
  out.exclusions = std::move(adults.exclusions);
  out.exclusions.insert(out.exclusions.end(), ruled.exclusions.begin(),
                        ruled.exclusions.end());
  out.exclusions.insert(out.exclusions.end(), deduped.exclusions.begin(),
                        deduped.exclusions.end());
  return out;
}

struct CorpusCounts {
  int healthy_female = 0;
  int pathological_female = 0;
  int healthy_male = 0;
  int pathological_male = 0;

  int healthy() const { return healthy_female + healthy_male; }
  int pathological() const {
    return pathological_female + pathological_male;
  }
  int total() const { return healthy() + pathological(); }
};

inline CorpusCounts count_corpus(const std::vector<SessionRecord>& records) {
  CorpusCounts c;
  for (const auto& rec : records) {
    if (rec.sex == Sex::female) {
      (rec.label() == 1 ? c.pathological_female : c.healthy_female) += 1;
    } else {
      (rec.label() == 1 ? c.pathological_male : c.healthy_male) += 1;
    }
  }
  return c;
}

// Manifest verification. The manifest holds one "<sha256-hex>  <name>" line
// per file, relative to the corpus root.
struct ManifestEntry {
  std::string file_name;
  std::string expected;
  std::string actual;   // empty when missing
  std::string status;   // ok | missing | mismatch
};

struct ManifestReport {
  std::vector<ManifestEntry> entries;

  bool ok() const {
    for (const auto& e : entries) {
      if (e.status != "ok") return false;
    }
    return true;
  }
};

inline std::vector<std::pair<std::string, std::string>> read_manifest(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path);
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::trim_ws(line).empty()) continue;
    if (line.size() < 66 || line[64] != ' ' || line[65] != ' ') {
      throw FormatError("manifest: bad line " + std::to_string(line_no));
    }
    const std::string hash = line.substr(0, 64);
    for (const char c : hash) {
      if (!std::isxdigit(static_cast<unsigned char>(c))) {
        throw FormatError("manifest: bad digest on line " +
                          std::to_string(line_no));
      }
    }
    entries.emplace_back(hash, line.substr(66));
  }
  return entries;
}

inline ManifestReport verify_manifest(const std::string& manifest_path,
                                      const std::string& root) {
  ManifestReport report;
  for (const auto& [hash, name] : read_manifest(manifest_path)) {
    ManifestEntry e;
    e.file_name = name;
    e.expected = hash;
    const std::filesystem::path p =
        std::filesystem::path(root) / name;
    if (!std::filesystem::exists(p)) {
      e.status = "missing";
    } else {
      e.actual = sha256_file_hex(p.string());
      e.status = (e.actual == e.expected) ? "ok" : "mismatch";
    }
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace vpd
