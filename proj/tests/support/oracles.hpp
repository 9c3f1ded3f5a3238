#pragma once

// Slow, direct re-implementations of the evaluation metrics. They share no
// code with the library and follow the textbook definitions literally.

#include <string>
#include <vector>

#include "accsams/metrics.hpp"
#include "accsams/structure.hpp"

namespace accsams::testing {

/// Sum of |gold index - predicted index| by linear search; missing ids cost n.
double oracle_ard_sum(const std::vector<std::string>& gold, const std::vector<std::string>& predicted);

struct OracleRow {
  BlockCategory category;
  std::size_t instances = 0;
  double precision = 0.0;
  double recall = 0.0;
  double ap50 = 0.0;
  double ap50_95 = 0.0;
};

/// AP by sweeping every recall sample point over every cut-off.
double oracle_average_precision(const std::vector<Detection>& preds, const std::vector<BBox>& gts, double thr);

/// Per-category rows (categories in enum order with predictions or ground
/// truth), then the macro mean over categories with ground truth.
std::vector<OracleRow> oracle_detection_rows(const std::vector<Detection>& preds, const std::vector<GroundTruth>& gts,
                                             OracleRow& all);

// --- Markdown re-reading ---------------------------------------------------

struct MarkdownScan {
  /// '#' count of each ATX heading, in order.
  std::vector<int> heading_levels;
  std::vector<std::string> heading_texts;
  /// Lines that present a visual block ("![..](..)" or "*Figure: ..*" etc).
  std::vector<std::string> visual_lines;
  /// Alt text extracted from each visual line.
  std::vector<std::string> alt_texts;
  bool has_double_blank = false;
};

/// Skips fenced code and $$ display math when looking for headings.
MarkdownScan scan_markdown(const std::string& md);

/// Heading levels of a tree in preorder, mapped to '#' counts.
std::vector<int> expected_heading_hashes(const DocTree& tree, int max_depth = 6);

}  // namespace accsams::testing
