#include "properties.hpp"

#include <algorithm>

#include "accsams/export.hpp"
#include "accsams/pipeline.hpp"
#include "accsams/solutions.hpp"
#include "oracles.hpp"

namespace accsams::testing {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
  return out;
}

void collect_flags(const TreeNode& n, std::vector<std::string>& flagged) {
  if (!n.synthetic() && n.is_solution) {
    flagged.push_back(n.block_id);
    if (n.symbol_id) flagged.push_back(*n.symbol_id);
  }
  for (const auto& c : n.children) collect_flags(c, flagged);
}

// Preorder of (block id, flagged) over every covered block.
void flagged_preorder(const TreeNode& n, bool inside, std::vector<std::pair<std::string, bool>>& out) {
  const bool sol = inside || n.is_solution;
  if (!n.synthetic()) {
    if (n.symbol_id) out.emplace_back(*n.symbol_id, sol);
    out.emplace_back(n.block_id, sol);
  }
  for (const auto& c : n.children) flagged_preorder(c, sol, out);
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::vector<std::string> input_ids(const ExamDocument& doc) {
  std::vector<std::string> ids;
  for (const auto& b : doc.blocks) ids.push_back(b.id);
  return sorted(ids);
}

}  // namespace

std::vector<std::string> check_structure(const SyntheticExam& ex) {
  std::vector<std::string> f;
  const auto order = reading_order(ex.doc.blocks);
  if (order != ex.gold_order) f.push_back("reading order differs from gold: " + join(order));
  const DocTree t = build_tree(ex.doc);
  if (covered_block_ids(t.root) != order) f.push_back("tree preorder differs from reading order");
  if (t.ordered != preorder_ids(t.root)) f.push_back("tree.ordered is stale");
  const auto levels = block_levels(t);
  if (levels != ex.gold_levels) {
    for (const auto& [id, lvl] : ex.gold_levels) {
      auto it = levels.find(id);
      if (it == levels.end() || it->second != lvl) {
        f.push_back("level of " + id + " is " + (it == levels.end() ? "missing" : std::to_string(it->second)) +
                    ", gold " + std::to_string(lvl));
      }
    }
  }
  return f;
}

std::vector<std::string> check_solutions(const SyntheticExam& ex) {
  std::vector<std::string> f;
  std::vector<std::string> flagged;
  collect_flags(run_pipeline(ex.doc).root, flagged);
  std::vector<std::string> gold(ex.gold_solutions.begin(), ex.gold_solutions.end());
  if (sorted(flagged) != sorted(gold)) f.push_back("flags " + join(sorted(flagged)) + " != seeded " + join(gold));
  for (const auto& id : flagged) {
    if (ex.distractors.count(id)) f.push_back("blank-answer prompt flagged: " + id);
  }
  return f;
}

std::vector<std::string> check_reposition(const SyntheticExam& ex) {
  std::vector<std::string> f;
  const DocTree t = run_pipeline(ex.doc);
  const auto want = input_ids(ex.doc);
  for (auto layout :
       {ExportLayout::inline_solutions, ExportLayout::solutions_at_end, ExportLayout::separate_solutions}) {
    const auto r = reposition(t, ex.doc, layout);
    std::vector<std::string> got;
    for (const auto& tree : r.trees) {
      auto ids = covered_block_ids(tree.root);
      got.insert(got.end(), ids.begin(), ids.end());
    }
    if (sorted(got) != want) f.push_back(std::string(to_string(layout)) + " changed the block multiset");
    if (layout == ExportLayout::separate_solutions && r.trees.size() == 2) {
      std::vector<std::pair<std::string, bool>> seq;
      flagged_preorder(r.trees[0].root, false, seq);
      for (const auto& [id, sol] : seq) {
        if (sol) f.push_back("solution block " + id + " left in the questions part");
      }
    }
    if (layout == ExportLayout::solutions_at_end) {
      std::vector<std::pair<std::string, bool>> seq;
      flagged_preorder(r.trees[0].root, false, seq);
      bool seen_solution = false;
      for (const auto& [id, sol] : seq) {
        if (sol) seen_solution = true;
        if (!sol && seen_solution) {
          f.push_back("question block " + id + " follows a solution block");
          break;
        }
      }
    }
  }
  return f;
}

std::vector<std::string> check_markdown_round_trip(const SyntheticExam& ex) {
  std::vector<std::string> f;
  ExamDocument doc = ex.doc;
  fill_placeholder_alt_text(doc);
  const DocTree t = run_pipeline(doc);
  std::size_t visuals = 0;
  for (const auto& b : doc.blocks) visuals += is_visual(b.category) ? 1 : 0;
  for (auto layout :
       {ExportLayout::inline_solutions, ExportLayout::solutions_at_end, ExportLayout::separate_solutions}) {
    ExportOptions o;
    o.layout = layout;
    const auto out = to_markdown(t, doc, o);
    const auto trees = reposition(t, doc, layout).trees;
    std::vector<int> want;
    std::vector<int> got;
    std::size_t visual_lines = 0;
    std::vector<std::string> parts{out.primary};
    if (out.solutions) parts.push_back(*out.solutions);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto scan = scan_markdown(parts[i]);
      got.insert(got.end(), scan.heading_levels.begin(), scan.heading_levels.end());
      if (scan.has_double_blank) f.push_back(std::string(to_string(layout)) + ": double blank line");
      for (const auto& alt : scan.alt_texts) {
        if (alt.empty()) f.push_back(std::string(to_string(layout)) + ": visual line without alt text");
      }
      visual_lines += scan.visual_lines.size();
    }
    for (const auto& tree : trees) {
      const auto h = expected_heading_hashes(tree);
      want.insert(want.end(), h.begin(), h.end());
    }
    if (got != want) f.push_back(std::string(to_string(layout)) + ": heading levels differ after re-reading");
    if (visual_lines != visuals) {
      f.push_back(std::string(to_string(layout)) + ": " + std::to_string(visual_lines) + " visual lines for " +
                  std::to_string(visuals) + " visual blocks");
    }
  }
  return f;
}

std::vector<std::string> check_all(const SyntheticExam& ex) {
  std::vector<std::string> f;
  for (auto part : {check_structure(ex), check_solutions(ex), check_reposition(ex), check_markdown_round_trip(ex)}) {
    f.insert(f.end(), part.begin(), part.end());
  }
  return f;
}

}  // namespace accsams::testing
