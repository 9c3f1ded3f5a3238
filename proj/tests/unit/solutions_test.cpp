#include <gtest/gtest.h>

#include <algorithm>

#include "accsams/errors.hpp"
#include "accsams/pipeline.hpp"
#include "accsams/solutions.hpp"
#include "helpers.hpp"

namespace accsams {
namespace {

using testing::heading;
using testing::make_doc;
using testing::para;

std::vector<std::string> flagged(const DocTree& t) {
  std::vector<std::string> out;
  const auto walk = [&](const auto& self, const TreeNode& n) -> void {
    if (n.is_solution && !n.synthetic()) out.push_back(n.block_id);
    for (const auto& c : n.children) self(self, c);
  };
  for (const auto& c : t.root.children) walk(walk, c);
  return out;
}

// Preorder with synthetic headings shown by label.
std::vector<std::string> preorder_labels(const DocTree& t) {
  std::vector<std::string> out;
  const auto walk = [&](const auto& self, const TreeNode& n) -> void {
    out.push_back(n.synthetic() ? "[" + n.label.value_or("") + "]" : n.block_id);
    for (const auto& c : n.children) self(self, c);
  };
  for (const auto& c : t.root.children) walk(walk, c);
  return out;
}

TEST(BlankPrompt, Examples) {
  EXPECT_TRUE(is_blank_answer_prompt("Your answer: ______"));
  EXPECT_FALSE(is_blank_answer_prompt("Answer: 42"));
  EXPECT_FALSE(is_blank_answer_prompt("Lösung:"));
  EXPECT_TRUE(is_blank_answer_prompt("Antwort: ........"));
  EXPECT_TRUE(is_blank_answer_prompt("Answer ---"));
  EXPECT_TRUE(is_blank_answer_prompt("Answer: …………"));
  EXPECT_TRUE(is_blank_answer_prompt("Answer:   "));
  EXPECT_FALSE(is_blank_answer_prompt("Answer: __"));
  EXPECT_FALSE(is_blank_answer_prompt("Solution"));
  EXPECT_FALSE(is_blank_answer_prompt("Write your name: ____"));
}

TEST(DetectSolutions, KeywordHeadingFlagsSubtree) {
  const auto doc = make_doc({heading("q", "Aufgabe 1", 50), para("qp", "Question text", 80),
                             heading("s", "Lösung zu Aufgabe 1", 110), para("s1", "Step one", 140),
                             para("s2", "Step two", 170)},
                            1, "de");
  const DocTree t = run_pipeline(doc);
  EXPECT_EQ(flagged(t), (std::vector<std::string>{"s", "s1", "s2"}));
}

TEST(DetectSolutions, ColorFlagsOnlyThatNode) {
  auto doc = make_doc({heading("q", "Question 1", 50), para("a", "Plain", 80), para("b", "Colored", 110),
                       para("c", "Plain again", 140)});
  doc.blocks[2].color_accent = true;
  EXPECT_EQ(flagged(run_pipeline(doc)), (std::vector<std::string>{"b"}));
}

TEST(DetectSolutions, BlankPromptIsNotASolution) {
  const auto doc = make_doc({heading("q", "Question 1", 50), heading("y", "Your answer: ______", 80),
                             para("w", "(space)", 110)});
  EXPECT_TRUE(flagged(run_pipeline(doc)).empty());
}

TEST(DetectSolutions, SeedsAndOverrides) {
  auto doc = make_doc({heading("q", "Question 1", 50), para("a", "x", 80), heading("s", "Solution", 110),
                       para("s1", "y", 140)});
  doc.blocks[1].is_solution = true;
  const DocTree base = build_tree(doc);
  EXPECT_EQ(flagged(detect_solutions(base, doc)), (std::vector<std::string>{"a", "s", "s1"}));

  // Overrides beat both rules; a heading pinned false no longer spreads.
  const SolutionOverrides ov = {{"s", false}, {"a", false}, {"q", true}};
  EXPECT_EQ(flagged(detect_solutions(base, doc, {}, ov)), (std::vector<std::string>{"q"}));
  EXPECT_EQ(flagged(detect_solutions(base, doc, {}, {{"q", true}})), (std::vector<std::string>{"q", "a", "s", "s1"}));
}

TEST(DetectSolutions, Idempotent) {
  auto doc = make_doc({heading("q", "Question 1", 50), heading("s", "Answer", 80), para("s1", "y", 110)});
  const DocTree once = run_pipeline(doc);
  EXPECT_EQ(detect_solutions(once, doc), once);
}

TEST(DetectSolutions, KeywordsAreConfigurable) {
  const auto doc = make_doc({heading("q", "Question 1", 50), heading("s", "Key", 80), para("s1", "y", 110)});
  SolutionConfig cfg;
  cfg.keywords = {"key"};
  EXPECT_EQ(flagged(detect_solutions(build_tree(doc), doc, cfg)), (std::vector<std::string>{"s", "s1"}));
  EXPECT_THROW(parse_solution_config(R"({"keywords": []})"), ConfigError);
  EXPECT_THROW(parse_solution_config(R"({"keywords": ["Upper"]})"), ConfigError);
  EXPECT_EQ(parse_solution_config(R"({"synthesized_heading_label": "Answer key"})").synthesized_heading_label,
            "Answer key");
}

ExamDocument two_questions() {
  return make_doc({heading("q1", "Aufgabe 1", 50), para("b1", "Body one", 80), heading("s1", "Lösung", 110),
                   para("t1", "Sol one", 140), heading("q2", "Aufgabe 2", 170), para("b2", "Body two", 200),
                   heading("s2", "Lösung", 230), para("t2", "Sol two", 260)},
                  1, "de");
}

TEST(Reposition, InlineKeepsOrder) {
  const auto doc = two_questions();
  const DocTree t = run_pipeline(doc);
  const auto r = reposition(t, doc, ExportLayout::inline_solutions);
  ASSERT_EQ(r.trees.size(), 1u);
  EXPECT_EQ(covered_block_ids(r.trees[0].root), covered_block_ids(t.root));
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Reposition, AtEndConsolidates) {
  const auto doc = two_questions();
  const auto r = reposition(run_pipeline(doc), doc, ExportLayout::solutions_at_end);
  ASSERT_EQ(r.trees.size(), 1u);
  EXPECT_EQ(preorder_labels(r.trees[0]),
            (std::vector<std::string>{"q1", "b1", "q2", "b2", "[Solutions]", "[Solution to Aufgabe 1]", "s1", "t1",
                                      "[Solution to Aufgabe 2]", "s2", "t2"}));
  const auto& section = r.trees[0].root.children.back();
  EXPECT_EQ(section.level, 1);
  EXPECT_EQ(section.children[0].level, 2);
  EXPECT_EQ(section.children[0].children[0].level, 3);
  EXPECT_EQ(section.children[0].children[0].children[0].level, 4);
}

TEST(Reposition, AtEndUsesHeadingAncestorPath) {
  const auto doc = make_doc({heading("q", "Aufgabe 2", 50), heading("b", "b) Part", 80), para("x", "text", 110),
                             heading("s", "Lösung", 140), para("y", "sol", 170)},
                            1, "de");
  const auto r = reposition(run_pipeline(doc), doc, ExportLayout::solutions_at_end);
  const auto labels = preorder_labels(r.trees[0]);
  EXPECT_NE(std::find(labels.begin(), labels.end(), "[Solution to Aufgabe 2 > b)]"), labels.end());
}

TEST(Reposition, SeparatePartitionsBlocks) {
  const auto doc = two_questions();
  const DocTree t = run_pipeline(doc);
  const auto r = reposition(t, doc, ExportLayout::separate_solutions);
  ASSERT_EQ(r.trees.size(), 2u);
  auto all = covered_block_ids(r.trees[0].root);
  const auto sol = covered_block_ids(r.trees[1].root);
  EXPECT_TRUE(flagged(r.trees[0]).empty());
  all.insert(all.end(), sol.begin(), sol.end());
  auto in = covered_block_ids(t.root);
  std::sort(all.begin(), all.end());
  std::sort(in.begin(), in.end());
  EXPECT_EQ(all, in);
  EXPECT_EQ(r.trees[1].root.children.at(0).level, 0);
}

TEST(Reposition, NoSolutionsWarns) {
  const auto doc = make_doc({heading("q", "Question 1", 50), para("a", "x", 80)});
  const DocTree t = run_pipeline(doc);
  const auto r = reposition(t, doc, ExportLayout::solutions_at_end);
  ASSERT_EQ(r.trees.size(), 1u);
  EXPECT_EQ(r.trees[0], t);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, diagnostic::kNoSolutionsFound);
}

TEST(Reposition, InlineSynthesizesHeadingForBareSolutions) {
  auto doc = make_doc({heading("q", "Question 1", 50), para("a", "x", 80), para("c", "colored", 110)});
  doc.blocks[2].color_accent = true;
  const auto r = reposition(run_pipeline(doc), doc, ExportLayout::inline_solutions);
  EXPECT_EQ(preorder_labels(r.trees[0]), (std::vector<std::string>{"q", "a", "[Solution]", "c"}));
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, diagnostic::kSynthesizedHeading);
  EXPECT_NO_THROW(check_tree(r.trees[0], doc));
}

TEST(Reposition, LiftsUnflaggedDescendantsOutOfSolutions) {
  auto doc = make_doc({heading("q", "Question 1", 50), heading("h", "Worked example", 80), para("p", "plain", 110)});
  doc.blocks[1].color_accent = true;
  const auto r = reposition(run_pipeline(doc), doc, ExportLayout::solutions_at_end);
  // p stays with the questions, h moves to the consolidated section.
  const auto labels = preorder_labels(r.trees[0]);
  const auto pos = [&](const std::string& s) { return std::find(labels.begin(), labels.end(), s) - labels.begin(); };
  EXPECT_LT(pos("p"), pos("[Solutions]"));
  EXPECT_GT(pos("h"), pos("[Solutions]"));
}

TEST(HeadingReference, PrefersMarkerLiteral) {
  const auto doc = make_doc({heading("a", "b) Compute", 50), heading("n", "Notes", 80)});
  const DocTree t = build_tree(doc);
  EXPECT_EQ(heading_reference(t.root.children[0], doc), "b)");
  EXPECT_EQ(heading_reference(t.root.children[1], doc), "Notes");
}

TEST(Layout, Names) {
  EXPECT_EQ(parse_layout("inline"), ExportLayout::inline_solutions);
  EXPECT_EQ(parse_layout("end"), ExportLayout::solutions_at_end);
  EXPECT_EQ(parse_layout("separate_solutions"), ExportLayout::separate_solutions);
  EXPECT_FALSE(parse_layout("sideways"));
}

}  // namespace
}  // namespace accsams
