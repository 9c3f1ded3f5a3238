#pragma once

// Block-file (de)serialization and the corpus-filtering stages used to turn a
// crawl manifest into exam candidates for manual review.

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accsams/model.hpp"

namespace accsams {

/// Parses a UTF-8 JSON block file. Throws SyntaxError, SchemaError or
/// ValidationError (the latter when validate_document() reports anything).
ExamDocument parse_block_file(std::string_view bytes);

/// Canonical serialization: every schema field is written, two-space indent,
/// trailing newline. parse_block_file(serialize_block_file(d)) == d.
std::string serialize_block_file(const ExamDocument& doc);

ExamDocument load_block_file(const std::string& path);

// --- corpus filtering ------------------------------------------------------

struct ManifestEntry {
  std::string url;
  std::optional<std::string> path;
  std::optional<std::string> text;
  /// Set by filter_false_positives() when no text layer was available.
  bool needs_text = false;

  bool operator==(const ManifestEntry&) const = default;
};

struct WeightedKeyword {
  std::string keyword;
  double weight = 1.0;

  bool operator==(const WeightedKeyword&) const = default;
};

struct FilterConfig {
  std::vector<std::string> include_keywords{"exam", "klausur"};
  std::vector<std::string> false_positive_phrases{"exam schedule"};
  std::map<std::string, std::vector<WeightedKeyword>> field_keywords;

  /// Defaults plus a seed keyword map for the study fields of the exam corpus.
  static FilterConfig defaults();
};

/// Throws ConfigError on an empty include list or non-lowercase entries.
void check_filter_config(const FilterConfig& cfg);
FilterConfig parse_filter_config(std::string_view json);
FilterConfig load_filter_config(const std::string& path);

/// One ManifestEntry per non-blank line. Throws ManifestError naming the line.
std::vector<ManifestEntry> parse_manifest(std::istream& in);
std::string serialize_manifest_entry(const ManifestEntry& entry);

/// Keeps entries whose lowercased URL contains an include keyword.
std::vector<ManifestEntry> filter_urls(const std::vector<ManifestEntry>& entries, const FilterConfig& cfg);

/// Drops entries whose lowercased text contains a false-positive phrase.
/// Entries without text are kept with needs_text set.
std::vector<ManifestEntry> filter_false_positives(const std::vector<ManifestEntry>& entries,
                                                  const FilterConfig& cfg);

struct FieldSuggestion {
  std::optional<std::string> field;
  double score = 0.0;

  bool operator==(const FieldSuggestion&) const = default;
};

/// score(field) = sum over keywords of occurrences * weight; argmax with ties
/// going to the lexicographically smaller field; no field when all are zero.
FieldSuggestion suggest_study_field(std::string_view text, const FilterConfig& cfg);

}  // namespace accsams
