#include "accsams/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_map>

#include "accsams/errors.hpp"
#include "json_io.hpp"

namespace accsams {

namespace {

std::vector<const Detection*> ranked(std::span<const Detection> preds) {
  std::vector<const Detection*> out;
  out.reserve(preds.size());
  for (const auto& p : preds) out.push_back(&p);
  std::stable_sort(out.begin(), out.end(), [](const Detection* a, const Detection* b) {
    if (a->confidence != b->confidence) return a->confidence > b->confidence;
    return a->id < b->id;
  });
  return out;
}

// True-positive flag per ranked prediction.
std::vector<bool> greedy_match(const std::vector<const Detection*>& ranked_preds, std::span<const BBox> gts,
                               double threshold) {
  std::vector<bool> taken(gts.size(), false);
  std::vector<bool> tp(ranked_preds.size(), false);
  for (std::size_t i = 0; i < ranked_preds.size(); ++i) {
    const BBox& p = ranked_preds[i]->bbox;
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g] || gts[g].page != p.page) continue;
      const double o = iou(p, gts[g]);
      if (o >= threshold && o > best_iou) {
        best = g;
        best_iou = o;
      }
    }
    if (best) {
      taken[*best] = true;
      tp[i] = true;
    }
  }
  return tp;
}

std::string fmt3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  if (a.page != b.page) {
    throw DifferentPage("boxes on pages " + std::to_string(a.page) + " and " + std::to_string(b.page));
  }
  const double iw = std::max(0.0, std::min(a.x1, b.x1) - std::max(a.x0, b.x0));
  const double ih = std::max(0.0, std::min(a.y1, b.y1) - std::max(a.y0, b.y0));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double average_precision(std::span<const Detection> preds, std::span<const BBox> gts, double iou_threshold) {
  if (gts.empty()) return preds.empty() ? 1.0 : 0.0;
  const auto order = ranked(preds);
  const auto tp = greedy_match(order, gts, iou_threshold);
  const double n = static_cast<double>(gts.size());

  std::vector<double> precision(order.size());
  std::vector<double> recall(order.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    hits += tp[i] ? 1 : 0;
    precision[i] = static_cast<double>(hits) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(hits) / n;
  }
  // Precision envelope: max precision at any recall >= this point's.
  for (std::size_t i = precision.size(); i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double sum = 0.0;
  for (int k = 0; k < kRecallPoints; ++k) {
    const double r = static_cast<double>(k) / static_cast<double>(kRecallPoints - 1);
    auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / kRecallPoints;
}

OperatingPoint best_f1_point(std::span<const Detection> preds, std::span<const BBox> gts, double iou_threshold) {
  OperatingPoint best;
  if (preds.empty()) return best;
  const auto order = ranked(preds);
  const auto tp = greedy_match(order, gts, iou_threshold);
  double best_f1 = -1.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    hits += tp[i] ? 1 : 0;
    // Only cut between distinct confidences.
    if (i + 1 < order.size() && order[i + 1]->confidence == order[i]->confidence) continue;
    const double p = static_cast<double>(hits) / static_cast<double>(i + 1);
    const double r = gts.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(gts.size());
    const double f1 = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
    if (f1 > best_f1) {
      best_f1 = f1;
      best = {p, r, order[i]->confidence};
    }
  }
  return best;
}

std::string category_display_name(BlockCategory c) {
  switch (c) {
    case BlockCategory::heading:
      return "Headings";
    case BlockCategory::paragraph:
      return "Paragraphs";
    case BlockCategory::list_symbol:
      return "List symbols";
    case BlockCategory::figure:
      return "Figures";
    case BlockCategory::formula:
      return "Formulas";
    case BlockCategory::table:
      return "Tables";
  }
  return "Unknown";
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int i = 0; i < 10; ++i) t.push_back(0.5 + 0.05 * i);
  return t;
}

EvalReport detection_report(std::span<const Detection> preds, std::span<const GroundTruth> gts) {
  EvalReport report;
  CategoryRow all{"All"};
  std::size_t with_gt = 0;
  const auto thresholds = coco_iou_thresholds();
  for (BlockCategory c : kAllCategories) {
    std::vector<Detection> cp;
    std::vector<BBox> cg;
    for (const auto& p : preds) {
      if (p.category == c) cp.push_back(p);
    }
    for (const auto& g : gts) {
      if (g.category == c) cg.push_back(g.bbox);
    }
    if (cp.empty() && cg.empty()) continue;

    CategoryRow row{category_display_name(c), cg.size()};
    if (!cg.empty()) {
      row.ap50 = average_precision(cp, cg, 0.5);
      double acc = 0.0;
      for (double t : thresholds) acc += average_precision(cp, cg, t);
      row.ap50_95 = acc / static_cast<double>(thresholds.size());
    }
    const OperatingPoint op = best_f1_point(cp, cg, 0.5);
    row.precision = op.precision;
    row.recall = op.recall;
    report.rows.push_back(row);

    all.instances += row.instances;
    if (!cg.empty()) {
      ++with_gt;
      all.precision += row.precision;
      all.recall += row.recall;
      all.ap50 += row.ap50;
      all.ap50_95 += row.ap50_95;
    }
  }
  if (with_gt > 0) {
    const double k = static_cast<double>(with_gt);
    all.precision /= k;
    all.recall /= k;
    all.ap50 /= k;
    all.ap50_95 /= k;
  }
  report.rows.push_back(all);
  return report;
}

double ard_sum(const OrderAnnotation& a) {
  std::unordered_map<std::string, std::size_t> gold_pos;
  for (std::size_t i = 0; i < a.gold.size(); ++i) {
    if (!gold_pos.emplace(a.gold[i], i).second) throw UnknownId("gold order repeats id '" + a.gold[i] + "'");
  }
  std::unordered_map<std::string, std::size_t> pred_pos;
  for (std::size_t j = 0; j < a.predicted.size(); ++j) {
    const auto& id = a.predicted[j];
    if (!gold_pos.count(id)) throw UnknownId("predicted order names unknown id '" + id + "'");
    if (!pred_pos.emplace(id, j).second) throw UnknownId("predicted order repeats id '" + id + "'");
  }
  const double n = static_cast<double>(a.gold.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.gold.size(); ++i) {
    auto it = pred_pos.find(a.gold[i]);
    sum += it == pred_pos.end() ? n : std::abs(static_cast<double>(i) - static_cast<double>(it->second));
  }
  return sum;
}

double ard(const OrderAnnotation& a) {
  if (a.gold.empty()) {
    if (!a.predicted.empty()) throw UnknownId("predicted order names ids absent from an empty gold order");
    return 0.0;
  }
  return ard_sum(a) / static_cast<double>(a.gold.size());
}

HierarchyDistances hierarchy_distances(const LevelAnnotation& a) {
  auto keys = [](const std::map<std::string, int>& m) {
    std::set<std::string> s;
    for (const auto& [k, v] : m) s.insert(k);
    return s;
  };
  const auto gold_ids = keys(a.gold);
  if (gold_ids != keys(a.predicted)) throw MismatchedIdSets("gold and predicted levels cover different blocks");
  const std::set<std::string> order_ids(a.order.begin(), a.order.end());
  if (order_ids != gold_ids || a.order.size() != gold_ids.size()) {
    throw MismatchedIdSets("reading order does not cover exactly the annotated blocks");
  }
  HierarchyDistances d;
  const std::size_t n = a.order.size();
  if (n == 0) return d;
  double abs_sum = 0.0;
  for (const auto& id : a.order) abs_sum += std::abs(a.predicted.at(id) - a.gold.at(id));
  d.abs_mean = abs_sum / static_cast<double>(n);
  if (n > 1) {
    double rel_sum = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      const int dg = a.gold.at(a.order[i]) - a.gold.at(a.order[i - 1]);
      const int dp = a.predicted.at(a.order[i]) - a.predicted.at(a.order[i - 1]);
      rel_sum += std::abs(dp - dg);
    }
    d.rel_mean = rel_sum / static_cast<double>(n - 1);
  }
  return d;
}

SummaryStat summarize(std::span<const double> values) {
  SummaryStat s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / n);
  return s;
}

std::string format_report_table(const EvalReport& report) {
  std::string out;
  if (!report.rows.empty()) {
    char line[160];
    std::snprintf(line, sizeof line, "%-14s %11s %9s %7s %7s %9s\n", "Classes", "# Instances", "Precision", "Recall",
                  "mAP50", "mAP50-95");
    out += line;
    for (const auto& r : report.rows) {
      std::snprintf(line, sizeof line, "%-14s %11zu %9s %7s %7s %9s\n", r.name.c_str(), r.instances,
                    fmt3(r.precision).c_str(), fmt3(r.recall).c_str(), fmt3(r.ap50).c_str(), fmt3(r.ap50_95).c_str());
      out += line;
    }
  }
  auto stat = [&](const char* name, const std::optional<SummaryStat>& s) {
    if (!s) return;
    char line[128];
    std::snprintf(line, sizeof line, "%-22s mean %.4f  std %.4f\n", name, s->mean, s->std);
    out += line;
  };
  stat("ARD", report.ard);
  stat("ARD (raw sum)", report.ard_raw);
  stat("Level distance (abs)", report.level_abs);
  stat("Level distance (rel)", report.level_rel);
  if (report.documents > 0) out += "Documents: " + std::to_string(report.documents) + "\n";
  return out;
}

std::string report_to_json(const EvalReport& report) {
  using json_io::json;
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"class", r.name},
                    {"instances", r.instances},
                    {"precision", r.precision},
                    {"recall", r.recall},
                    {"map50", r.ap50},
                    {"map50_95", r.ap50_95}});
  }
  auto stat = [](const std::optional<SummaryStat>& s) {
    return s ? json{{"mean", s->mean}, {"std", s->std}} : json(nullptr);
  };
  json j = {{"rows", rows},
            {"ard", stat(report.ard)},
            {"ard_raw", stat(report.ard_raw)},
            {"level_abs", stat(report.level_abs)},
            {"level_rel", stat(report.level_rel)},
            {"documents", report.documents}};
  return j.dump(2) + "\n";
}

}  // namespace accsams
