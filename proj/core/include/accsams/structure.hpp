#pragma once

// Reading order, enumeration markers, heading levels and the hierarchy tree.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "accsams/model.hpp"

namespace accsams {

enum class MarkerStyle {
  decimal_dot,         // "3."
  decimal_paren,       // "3)" or "(3)"
  multilevel_decimal,  // "2.1", "2.1.3", or a bare "2"
  alpha_lower,         // "a)", "b.", "(c)"
  alpha_upper,
  roman_lower,  // "iv)", "ii."
  roman_upper,
  bullet,
  keyword_heading,  // "Aufgabe 3", "Question 2"
  none,
};

std::string_view to_string(MarkerStyle style);
std::optional<MarkerStyle> parse_marker_style(std::string_view name);

/// Styles that count up (everything except bullet, keyword_heading, none and
/// multilevel_decimal, which carries its own depth).
bool is_flat_ordinal(MarkerStyle style);

struct Marker {
  MarkerStyle style = MarkerStyle::none;
  std::optional<int> value;
  int depth = 1;
  std::string literal;

  bool operator==(const Marker&) const = default;
};

struct StructureConfig {
  /// Lowercase words that, followed by a number, open a question heading.
  std::vector<std::string> heading_keywords{"aufgabe", "teilaufgabe", "frage",   "question",
                                            "exercise", "problem",     "task",    "part"};
};

/// Throws ConfigError on empty or non-lowercase keywords.
void check_structure_config(const StructureConfig& cfg);
/// Reads a JSON list of keywords.
StructureConfig parse_heading_keywords(std::string_view json);

/// Parses the leading enumeration marker. Total: unparseable text yields
/// style none. A lone "i", "v" or "x" defaults to roman; see
/// resolve_marker_runs() for run-aware disambiguation.
Marker classify_marker(std::optional<std::string_view> text, const StructureConfig& cfg = {});

/// Re-labels ambiguous single-letter roman markers as alphabetic when the
/// preceding marker in the sequence is the alphabetic predecessor ("h." then "i.").
void resolve_marker_runs(std::vector<Marker>& sequence);

/// Fraction of the smaller height two boxes must share to sit in one line band.
inline constexpr double kBandOverlap = 0.5;

struct BandedBlock {
  std::size_t index;  // into the input span
  int band;           // page-local band number, top to bottom
};

/// Canonical geometric order with line-band assignment. Independent of the
/// input permutation.
std::vector<BandedBlock> banded_order(std::span<const ContentBlock> blocks);

/// Block ids sorted by (page, band, x0, id).
std::vector<std::string> reading_order(std::span<const ContentBlock> blocks);

struct HeadingCue {
  std::string block_id;
  Marker marker;
  std::optional<double> font_size;
  int page = 0;
};

struct Diagnostic {
  std::string code;
  std::optional<std::string> block_id;
  std::string message;

  bool operator==(const Diagnostic&) const = default;
};

namespace diagnostic {
inline constexpr std::string_view kDanglingListSymbol = "DANGLING_LIST_SYMBOL";
inline constexpr std::string_view kFontLevelConflict = "FONT_LEVEL_CONFLICT";
inline constexpr std::string_view kSynthesizedHeading = "SYNTHESIZED_HEADING";
inline constexpr std::string_view kNoSolutionsFound = "NO_SOLUTIONS_FOUND";
}  // namespace diagnostic

struct LevelAssignment {
  std::map<std::string, int> levels;
  std::vector<Diagnostic> diagnostics;
};

/// Headings must be given in reading order.
LevelAssignment assign_heading_levels(std::span<const HeadingCue> headings);

struct TreeNode {
  /// Empty for synthetic nodes (the root and generated headings).
  std::string block_id;
  /// The list_symbol block merged into this node, if any.
  std::optional<std::string> symbol_id;
  BlockCategory category = BlockCategory::paragraph;
  int level = 0;
  bool is_solution = false;
  Marker marker;
  /// Heading text for synthetic nodes.
  std::optional<std::string> label;
  std::vector<TreeNode> children;

  bool synthetic() const { return block_id.empty(); }
  bool is_heading() const { return category == BlockCategory::heading; }
  bool is_list_item() const { return symbol_id.has_value() && category != BlockCategory::heading; }

  bool operator==(const TreeNode&) const = default;
};

struct DocTree {
  /// Synthetic root at level -1.
  TreeNode root = make_root();
  /// Preorder block ids, synthetic nodes excluded.
  std::vector<std::string> ordered;
  std::vector<Diagnostic> diagnostics;

  bool operator==(const DocTree&) const = default;

  static TreeNode make_root() {
    TreeNode n;
    n.category = BlockCategory::heading;
    n.level = -1;
    return n;
  }
};

/// Preorder of block ids (primary ids only; merged symbols are not listed).
std::vector<std::string> preorder_ids(const TreeNode& root);

/// Every block id the tree covers, merged list symbols included.
std::vector<std::string> covered_block_ids(const TreeNode& root);

/// Recomputes tree.ordered from the tree.
void refresh_order(DocTree& tree);

/// Runs reading order, list-symbol merging, marker classification, heading
/// levels and the stack-based nesting.
DocTree build_tree(const ExamDocument& doc, const StructureConfig& cfg = {});

/// Checks a (possibly user-edited) tree against the document: each block
/// covered exactly once, heading levels strictly increasing along heading
/// chains, levels non-negative. Throws InvalidTree.
void check_tree(const DocTree& tree, const ExamDocument& doc);

/// Per-block hierarchy level (merged list symbols share their item's level).
std::map<std::string, int> block_levels(const DocTree& tree);

}  // namespace accsams
