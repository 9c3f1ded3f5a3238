#pragma once

// Solution detection and solution repositioning.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "accsams/model.hpp"
#include "accsams/structure.hpp"

namespace accsams {

struct SolutionConfig {
  std::vector<std::string> keywords{"solution", "answer", "lösung", "antwort", "musterlösung"};
  std::string synthesized_heading_label = "Solution";
  std::string consolidated_section_label = "Solutions";
};

void check_solution_config(const SolutionConfig& cfg);
/// {"keywords": [...], "synthesized_heading_label": "...", "consolidated_section_label": "..."};
/// missing keys keep their defaults. Throws ConfigError.
SolutionConfig parse_solution_config(std::string_view json);

enum class ExportLayout { inline_solutions, solutions_at_end, separate_solutions };

std::string_view to_string(ExportLayout layout);
/// Accepts the enum names plus the short forms "inline", "end" and "separate".
std::optional<ExportLayout> parse_layout(std::string_view name);

/// A fill-in cue such as "Your answer: ______": optional leading words, a
/// keyword, an optional colon, then either a run of at least three fill
/// characters (_ . - …) or, after a colon, nothing but whitespace.
bool is_blank_answer_prompt(std::string_view text, const SolutionConfig& cfg = {});

/// Per-block user decisions that win over both rules.
using SolutionOverrides = std::map<std::string, bool>;

/// Rule 1 flags keyword headings (that are not blank-answer prompts) with their
/// whole subtree; rule 2 flags any node whose block carries color. Existing
/// flags are kept. Idempotent.
DocTree detect_solutions(DocTree tree, const ExamDocument& doc, const SolutionConfig& cfg = {},
                         const SolutionOverrides& overrides = {});

struct RepositionResult {
  /// One tree, or two (questions, solutions) for separate_solutions.
  std::vector<DocTree> trees;
  std::vector<Diagnostic> warnings;
};

RepositionResult reposition(const DocTree& tree, const ExamDocument& doc, ExportLayout layout,
                            const SolutionConfig& cfg = {});

/// Text a heading node contributes to cross-references: the marker literal
/// when it has one, else the heading text.
std::string heading_reference(const TreeNode& node, const ExamDocument& doc);

}  // namespace accsams
