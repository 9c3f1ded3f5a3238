#pragma once

// Core domain types shared by the whole pipeline.
//
// Coordinates are page units with a top-left origin and y growing downward.
// Producers that emit bottom-left coordinates must flip before writing a
// block file.

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace accsams {

enum class BlockCategory { heading, paragraph, list_symbol, figure, formula, table };

inline constexpr std::array<BlockCategory, 6> kAllCategories = {
    BlockCategory::heading, BlockCategory::paragraph, BlockCategory::list_symbol,
    BlockCategory::figure,  BlockCategory::formula,   BlockCategory::table};

/// Wire name ("heading", "list_symbol", ...).
std::string_view to_string(BlockCategory category);

/// Inverse of to_string(); nullopt for anything outside the closed set.
std::optional<BlockCategory> parse_category(std::string_view name);

/// True for categories that need alt text before export.
constexpr bool is_visual(BlockCategory c) {
  return c == BlockCategory::figure || c == BlockCategory::formula || c == BlockCategory::table;
}

struct BBox {
  int page = 0;
  double x0 = 0;
  double y0 = 0;
  double x1 = 0;
  double y1 = 0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  double area() const { return width() * height(); }

  bool operator==(const BBox&) const = default;
};

struct ContentBlock {
  std::string id;
  BBox bbox;
  BlockCategory category = BlockCategory::paragraph;
  std::optional<std::string> text;
  std::optional<double> confidence;
  bool color_accent = false;
  std::optional<double> font_size;
  std::optional<std::string> alt_text;
  bool is_solution = false;

  bool operator==(const ContentBlock&) const = default;
};

struct Page {
  int index = 0;
  double width = 0;
  double height = 0;
  std::optional<std::string> image;

  bool operator==(const Page&) const = default;
};

struct Source {
  std::string filename;
  std::string language;

  bool operator==(const Source&) const = default;
};

/// Gold reading order and hierarchy levels for evaluation fixtures.
struct Annotations {
  std::map<std::string, int> order;
  std::map<std::string, int> level;

  bool operator==(const Annotations&) const = default;
};

struct ExamDocument {
  int version = 1;
  Source source;
  std::vector<Page> pages;
  std::vector<ContentBlock> blocks;
  std::optional<Annotations> annotations;

  const ContentBlock* find_block(std::string_view id) const;
  ContentBlock* find_block(std::string_view id);
  const Page* find_page(int index) const;

  bool operator==(const ExamDocument&) const = default;
};

/// Stable violation codes reported by validate_document().
namespace violation {
inline constexpr std::string_view kDuplicateId = "DUP_ID";
inline constexpr std::string_view kBBoxRange = "BBOX_RANGE";
inline constexpr std::string_view kBadPageRef = "BAD_PAGE_REF";
inline constexpr std::string_view kBadGoldOrder = "BAD_GOLD_ORDER";
inline constexpr std::string_view kBadGoldLevel = "BAD_GOLD_LEVEL";
inline constexpr std::string_view kBadPage = "BAD_PAGE";
}  // namespace violation

struct Violation {
  std::string code;
  std::optional<std::string> block_id;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Tolerance, in page units, for boxes that overflow the page edge.
inline constexpr double kPageExtentTolerance = 1.0;

/// Collects every structural violation. Never throws and never mutates.
std::vector<Violation> validate_document(const ExamDocument& doc);

}  // namespace accsams
