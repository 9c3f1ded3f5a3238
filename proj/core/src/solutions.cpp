#include "accsams/solutions.hpp"

#include <algorithm>

#include "accsams/errors.hpp"
#include "json_io.hpp"
#include "text.hpp"

namespace accsams {

namespace {

constexpr std::string_view kEllipsis = "…";

// Length in bytes of a fill character at s[pos], or 0.
std::size_t fill_char(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  const char c = s[pos];
  if (c == '_' || c == '.' || c == '-') return 1;
  if (s.substr(pos, kEllipsis.size()) == kEllipsis) return kEllipsis.size();
  return 0;
}

bool is_blank_remainder(std::string_view rest, bool had_colon) {
  std::size_t longest = 0;
  std::size_t run = 0;
  bool only_fill = true;
  for (std::size_t i = 0; i < rest.size();) {
    if (std::size_t n = fill_char(rest, i)) {
      ++run;
      longest = std::max(longest, run);
      i += n;
    } else if (text::is_space(rest[i])) {
      run = 0;
      ++i;
    } else {
      only_fill = false;
      break;
    }
  }
  if (!only_fill) return false;
  if (longest >= 3) return true;
  return had_colon && !rest.empty() && longest == 0;
}

const std::string* text_of(const TreeNode& n, const ExamDocument& doc) {
  if (n.synthetic()) return n.label ? &*n.label : nullptr;
  const ContentBlock* b = doc.find_block(n.block_id);
  return b && b->text ? &*b->text : nullptr;
}

bool has_color(const TreeNode& n, const ExamDocument& doc) {
  if (n.synthetic()) return false;
  const ContentBlock* b = doc.find_block(n.block_id);
  if (b && b->color_accent) return true;
  if (n.symbol_id) {
    const ContentBlock* s = doc.find_block(*n.symbol_id);
    if (s && s->color_accent) return true;
  }
  return false;
}

bool producer_flag(const TreeNode& n, const ExamDocument& doc) {
  if (n.synthetic()) return false;
  const ContentBlock* b = doc.find_block(n.block_id);
  return b && b->is_solution;
}

bool has_keyword(const std::string& s, const SolutionConfig& cfg) {
  const std::string lowered = text::to_lower(s);
  return std::any_of(cfg.keywords.begin(), cfg.keywords.end(),
                     [&](const std::string& kw) { return lowered.find(kw) != std::string::npos; });
}

void mark(TreeNode& n, bool inherited, const ExamDocument& doc, const SolutionConfig& cfg,
          const SolutionOverrides& overrides) {
  const std::string* txt = text_of(n, doc);
  const bool rule1 = n.is_heading() && !n.synthetic() && txt && has_keyword(*txt, cfg) &&
                     !is_blank_answer_prompt(*txt, cfg);
  bool flag = n.is_solution || inherited || producer_flag(n, doc) || rule1 || has_color(n, doc);
  bool pinned_true = false;
  if (!n.synthetic()) {
    if (auto it = overrides.find(n.block_id); it != overrides.end()) {
      flag = it->second;
      pinned_true = it->second;
    }
  }
  n.is_solution = flag;
  const bool spreads = flag && n.is_heading() && (rule1 || pinned_true);
  for (TreeNode& c : n.children) mark(c, inherited || spreads, doc, cfg, overrides);
}

void shift_levels(TreeNode& n, int delta) {
  n.level += delta;
  for (TreeNode& c : n.children) shift_levels(c, delta);
}

bool any_flagged(const TreeNode& n) {
  if (!n.synthetic() && n.is_solution) return true;
  return std::any_of(n.children.begin(), n.children.end(), any_flagged);
}

TreeNode synthetic_heading(std::string label, int level) {
  TreeNode h;
  h.category = BlockCategory::heading;
  h.level = level;
  h.is_solution = true;
  h.label = std::move(label);
  return h;
}

// Inline layout: give every heading-less flagged run a synthesized heading.
void add_inline_headings(TreeNode& parent, const SolutionConfig& cfg, std::vector<Diagnostic>& warnings) {
  std::vector<TreeNode> out;
  auto& kids = parent.children;
  for (std::size_t i = 0; i < kids.size();) {
    if (!kids[i].is_solution || parent.is_solution) {
      if (!kids[i].is_solution) add_inline_headings(kids[i], cfg, warnings);
      out.push_back(std::move(kids[i]));
      ++i;
      continue;
    }
    std::size_t end = i;
    while (end < kids.size() && kids[end].is_solution) ++end;
    if (!kids[i].is_heading()) {
      TreeNode h = synthetic_heading(cfg.synthesized_heading_label, std::max(1, parent.level + 1));
      warnings.push_back({std::string(diagnostic::kSynthesizedHeading), kids[i].block_id,
                          "inserted heading '" + cfg.synthesized_heading_label + "' before '" + kids[i].block_id + "'"});
      for (; i < end && !kids[i].is_heading(); ++i) {
        shift_levels(kids[i], h.level + 1 - kids[i].level);
        h.children.push_back(std::move(kids[i]));
      }
      out.push_back(std::move(h));
    }
    for (; i < end; ++i) out.push_back(std::move(kids[i]));
  }
  kids = std::move(out);
}

struct Removed {
  std::string path;
  TreeNode subtree;
};

TreeNode shallow(const TreeNode& n) {
  TreeNode c = n;
  c.children.clear();
  return c;
}

// Splits `kids` into question nodes (appended to q_out) and solution nodes.
// Inside a removed region s_out points at the region's child list; unflagged
// descendants of a region are lifted into the question tree at its position.
void split(const std::vector<TreeNode>& kids, std::vector<TreeNode>& q_out, std::vector<TreeNode>* s_out,
           std::vector<Removed>& removed, std::vector<std::string>& path, const ExamDocument& doc) {
  // Latest unflagged enumerated heading among these siblings: a solution
  // heading set at its question's level answers that question.
  std::optional<std::string> sibling_question;
  for (const TreeNode& k : kids) {
    if (k.is_solution) {
      TreeNode s = shallow(k);
      if (s_out != nullptr) {
        split(k.children, q_out, &s.children, removed, path, doc);
        s_out->push_back(std::move(s));
      } else {
        std::string joined;
        for (const auto& p : path) joined += (joined.empty() ? "" : " > ") + p;
        if (k.is_heading() && sibling_question) joined += (joined.empty() ? "" : " > ") + *sibling_question;
        const std::size_t slot = removed.size();
        removed.push_back({std::move(joined), {}});
        split(k.children, q_out, &s.children, removed, path, doc);
        removed[slot].subtree = std::move(s);
      }
    } else {
      TreeNode q = shallow(k);
      // The document title is not part of a question's address.
      const bool pushes = k.is_heading() && k.level > 0;
      if (pushes && k.marker.style != MarkerStyle::none) sibling_question = heading_reference(k, doc);
      if (pushes) path.push_back(heading_reference(k, doc));
      split(k.children, q.children, nullptr, removed, path, doc);
      if (pushes) path.pop_back();
      q_out.push_back(std::move(q));
    }
  }
}

}  // namespace

void check_solution_config(const SolutionConfig& cfg) {
  if (cfg.keywords.empty()) throw ConfigError("solution keyword list must not be empty");
  for (const auto& kw : cfg.keywords) {
    if (kw.empty() || !text::is_lowercase(kw)) throw ConfigError("solution keyword '" + kw + "' must be non-empty lowercase");
  }
}

SolutionConfig parse_solution_config(std::string_view bytes) {
  json_io::json j;
  try {
    j = json_io::parse(bytes);
  } catch (const SyntaxError& e) {
    throw ConfigError(std::string("solution config: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("solution config must be a JSON object");
  SolutionConfig cfg;
  if (auto it = j.find("keywords"); it != j.end()) {
    if (!it->is_array()) throw ConfigError("'keywords' must be a list of strings");
    cfg.keywords.clear();
    for (const auto& v : *it) {
      if (!v.is_string()) throw ConfigError("'keywords' must be a list of strings");
      cfg.keywords.push_back(v.get<std::string>());
    }
  }
  for (auto [key, dest] : {std::pair{"synthesized_heading_label", &cfg.synthesized_heading_label},
                           std::pair{"consolidated_section_label", &cfg.consolidated_section_label}}) {
    if (auto it = j.find(key); it != j.end()) {
      if (!it->is_string()) throw ConfigError(std::string("'") + key + "' must be a string");
      *dest = it->get<std::string>();
    }
  }
  check_solution_config(cfg);
  return cfg;
}

std::string_view to_string(ExportLayout layout) {
  switch (layout) {
    case ExportLayout::inline_solutions:
      return "inline_solutions";
    case ExportLayout::solutions_at_end:
      return "solutions_at_end";
    case ExportLayout::separate_solutions:
      return "separate_solutions";
  }
  return "inline_solutions";
}

std::optional<ExportLayout> parse_layout(std::string_view name) {
  if (name == "inline_solutions" || name == "inline") return ExportLayout::inline_solutions;
  if (name == "solutions_at_end" || name == "end") return ExportLayout::solutions_at_end;
  if (name == "separate_solutions" || name == "separate") return ExportLayout::separate_solutions;
  return std::nullopt;
}

bool is_blank_answer_prompt(std::string_view input, const SolutionConfig& cfg) {
  std::size_t start = 0;
  while (start < input.size() && text::is_space(input[start])) ++start;
  const std::string lowered = text::to_lower(input.substr(start));

  for (const auto& kw : cfg.keywords) {
    for (std::size_t pos = lowered.find(kw); pos != std::string::npos; pos = lowered.find(kw, pos + 1)) {
      if (pos > 0 && !text::is_space(lowered[pos - 1])) continue;
      std::size_t after = pos + kw.size();
      if (after < lowered.size() && !text::is_space(lowered[after]) && lowered[after] != ':' &&
          fill_char(lowered, after) == 0) {
        continue;
      }
      std::size_t i = after;
      while (i < lowered.size() && text::is_space(lowered[i])) ++i;
      bool colon = false;
      if (i < lowered.size() && lowered[i] == ':') {
        colon = true;
        ++i;
      } else {
        i = after;
      }
      if (is_blank_remainder(std::string_view(lowered).substr(i), colon)) return true;
    }
  }
  return false;
}

std::string heading_reference(const TreeNode& node, const ExamDocument& doc) {
  if (node.marker.style != MarkerStyle::none && node.marker.style != MarkerStyle::bullet && !node.marker.literal.empty()) {
    return node.marker.literal;
  }
  const std::string* txt = text_of(node, doc);
  return txt ? text::collapse_whitespace(*txt) : node.block_id;
}

DocTree detect_solutions(DocTree tree, const ExamDocument& doc, const SolutionConfig& cfg,
                         const SolutionOverrides& overrides) {
  for (TreeNode& c : tree.root.children) mark(c, false, doc, cfg, overrides);
  return tree;
}

RepositionResult reposition(const DocTree& tree, const ExamDocument& doc, ExportLayout layout,
                            const SolutionConfig& cfg) {
  RepositionResult result;
  const bool flagged = any_flagged(tree.root);

  if (layout == ExportLayout::inline_solutions) {
    DocTree out = tree;
    add_inline_headings(out.root, cfg, result.warnings);
    refresh_order(out);
    result.trees.push_back(std::move(out));
    return result;
  }
  if (!flagged) {
    result.warnings.push_back({std::string(diagnostic::kNoSolutionsFound), std::nullopt,
                               "layout " + std::string(to_string(layout)) + " requested but no solutions were detected"});
    result.trees.push_back(tree);
    return result;
  }

  DocTree questions;
  questions.diagnostics = tree.diagnostics;
  std::vector<Removed> removed;
  std::vector<std::string> path;
  split(tree.root.children, questions.root.children, nullptr, removed, path, doc);
  refresh_order(questions);

  // A separate solutions document opens with its own top-level heading.
  const int base = layout == ExportLayout::separate_solutions ? 0 : 1;
  TreeNode section = synthetic_heading(cfg.consolidated_section_label, base);
  for (Removed& r : removed) {
    std::string label = cfg.synthesized_heading_label;
    if (!r.path.empty()) label += " to " + r.path;
    TreeNode ref = synthetic_heading(std::move(label), base + 1);
    shift_levels(r.subtree, ref.level + 1 - r.subtree.level);
    ref.children.push_back(std::move(r.subtree));
    section.children.push_back(std::move(ref));
  }

  if (layout == ExportLayout::solutions_at_end) {
    questions.root.children.push_back(std::move(section));
    refresh_order(questions);
    result.trees.push_back(std::move(questions));
  } else {
    DocTree solutions;
    solutions.root.children.push_back(std::move(section));
    refresh_order(solutions);
    result.trees.push_back(std::move(questions));
    result.trees.push_back(std::move(solutions));
  }
  return result;
}

}  // namespace accsams
