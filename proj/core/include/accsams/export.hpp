#pragma once

// Accessible Markdown and HTML emission.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accsams/model.hpp"
#include "accsams/solutions.hpp"
#include "accsams/structure.hpp"

namespace accsams {

enum class ExportFormat { markdown, html };

std::string_view to_string(ExportFormat format);
std::optional<ExportFormat> parse_format(std::string_view name);
/// "md" or "html".
std::string_view file_extension(ExportFormat format);

struct ExportOptions {
  ExportFormat format = ExportFormat::markdown;
  ExportLayout layout = ExportLayout::inline_solutions;
  /// Relative directory the document links figure assets from.
  std::string asset_dir = "assets";
  /// Clamped to [1, 6].
  int max_heading_depth = 6;
  SolutionConfig solutions;
};

struct ExportResult {
  /// The whole document, or the questions part for separate_solutions.
  std::string primary;
  /// Present only for separate_solutions with at least one solution.
  std::optional<std::string> solutions;
  std::vector<Diagnostic> warnings;
};

/// Figure, formula and table blocks in the tree that lack alt text.
std::vector<std::string> missing_alt_text(const DocTree& tree, const ExamDocument& doc);

/// "<Category> <k> on page <p>", k and p 1-based, with an adjacent caption
/// appended after a spaced U+2014 dash when one is found. Never empty.
std::string placeholder_alt_text(const std::string& block_id, const ExamDocument& doc);

/// Fills every visual block without alt text with its placeholder.
/// Returns the ids that were filled.
std::vector<std::string> fill_placeholder_alt_text(ExamDocument& doc);

/// Asset file name for a figure: "p<page>-fig<k>.<ext>" with the extension
/// taken from the page raster. nullopt when the page has no raster.
std::optional<std::string> figure_asset_name(const std::string& block_id, const ExamDocument& doc);

/// Repositions `tree` (which must already carry solution flags) and renders it.
/// Throws MissingAltText.
ExportResult to_markdown(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts);
ExportResult to_html(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts);
/// Dispatches on opts.format.
ExportResult export_document(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts);

}  // namespace accsams
