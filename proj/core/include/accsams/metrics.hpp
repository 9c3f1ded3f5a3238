#pragma once

// Evaluation harness: detection precision/recall/AP, reading-order ARD and
// hierarchy level distances.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "accsams/model.hpp"

namespace accsams {

struct Detection {
  std::string id;
  BBox bbox;
  BlockCategory category = BlockCategory::paragraph;
  double confidence = 1.0;
};

struct GroundTruth {
  std::string id;
  BBox bbox;
  BlockCategory category = BlockCategory::paragraph;
};

/// Throws DifferentPage when the boxes sit on different pages.
double iou(const BBox& a, const BBox& b);

/// Recall sample points for interpolated AP: 0, 0.01, ..., 1.00.
inline constexpr int kRecallPoints = 101;

/// Single-category AP. Predictions are ranked by confidence (ties by id) and
/// greedily matched to the unmatched ground truth of highest IoU at or above
/// the threshold. AP is the mean of the precision envelope at 101 recall
/// points. No ground truth: 1.0 without predictions, 0.0 with.
double average_precision(std::span<const Detection> preds, std::span<const BBox> gts, double iou_threshold);

/// Precision/recall at the confidence cut-off that maximizes F1 at IoU 0.5.
struct OperatingPoint {
  double precision = 0.0;
  double recall = 0.0;
  std::optional<double> confidence_threshold;
};
OperatingPoint best_f1_point(std::span<const Detection> preds, std::span<const BBox> gts, double iou_threshold = 0.5);

struct CategoryRow {
  std::string name;
  std::size_t instances = 0;
  double precision = 0.0;
  double recall = 0.0;
  double ap50 = 0.0;
  double ap50_95 = 0.0;
};

struct SummaryStat {
  double mean = 0.0;
  double std = 0.0;
};

struct EvalReport {
  /// One row per category present in predictions or ground truth, then "All".
  std::vector<CategoryRow> rows;
  std::optional<SummaryStat> ard;
  std::optional<SummaryStat> ard_raw;
  std::optional<SummaryStat> level_abs;
  std::optional<SummaryStat> level_rel;
  std::size_t documents = 0;
};

/// Table-style display name ("Headings", "List symbols", ...).
std::string category_display_name(BlockCategory c);

/// IoU thresholds 0.50, 0.55, ..., 0.95.
std::vector<double> coco_iou_thresholds();

/// Per-category AP50, AP50-95 and max-F1 precision/recall; the "All" row is
/// the unweighted mean over categories that have ground truth.
EvalReport detection_report(std::span<const Detection> preds, std::span<const GroundTruth> gts);

struct OrderAnnotation {
  std::vector<std::string> gold;
  std::vector<std::string> predicted;
};

/// Sum of |gold index - predicted index|; ids missing from the prediction
/// cost n. Throws UnknownId for ids not in gold (or repeated in predicted).
double ard_sum(const OrderAnnotation& a);
/// ard_sum / n; 0 for an empty gold list.
double ard(const OrderAnnotation& a);

struct LevelAnnotation {
  std::map<std::string, int> gold;
  std::map<std::string, int> predicted;
  /// Reading order for the relative metric; must cover the same ids.
  std::vector<std::string> order;
};

struct HierarchyDistances {
  double abs_mean = 0.0;
  double rel_mean = 0.0;
};

/// Throws MismatchedIdSets.
HierarchyDistances hierarchy_distances(const LevelAnnotation& a);

/// Population mean and standard deviation; zeros for an empty sample.
SummaryStat summarize(std::span<const double> values);

/// Table-style text: Classes, # Instances, Precision, Recall, mAP50, mAP50-95,
/// followed by any document-level order/hierarchy statistics.
std::string format_report_table(const EvalReport& report);
std::string report_to_json(const EvalReport& report);

}  // namespace accsams
