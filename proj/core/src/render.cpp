#include <algorithm>
#include <functional>

#include "accsams/errors.hpp"
#include "accsams/export.hpp"
#include "text.hpp"

namespace accsams {

namespace {

std::vector<const TreeNode*> flatten(const DocTree& tree) {
  std::vector<const TreeNode*> out;
  std::function<void(const TreeNode&)> walk = [&](const TreeNode& n) {
    out.push_back(&n);
    for (const TreeNode& c : n.children) walk(c);
  };
  for (const TreeNode& c : tree.root.children) walk(c);
  return out;
}

struct NodeView {
  const TreeNode& node;
  const ContentBlock* block;  // null for synthetic nodes
  std::string text;           // whitespace-collapsed
  std::string marker;         // list/heading label to print, may be empty
};

NodeView view(const TreeNode& n, const ExamDocument& doc) {
  NodeView v{n, n.synthetic() ? nullptr : doc.find_block(n.block_id), {}, {}};
  if (n.synthetic()) {
    v.text = text::collapse_whitespace(n.label.value_or(""));
  } else if (v.block && v.block->text && v.block->category != BlockCategory::list_symbol) {
    v.text = text::collapse_whitespace(*v.block->text);
  }
  const bool labelled = n.symbol_id.has_value() || n.category == BlockCategory::list_symbol;
  if (labelled && n.marker.style != MarkerStyle::bullet) {
    v.marker = n.marker.literal;
    if (v.marker.empty() && n.category == BlockCategory::list_symbol && v.block && v.block->text) {
      v.marker = text::collapse_whitespace(*v.block->text);
    }
  }
  return v;
}

std::string alt_of(const NodeView& v) { return text::collapse_whitespace(v.block->alt_text.value_or("")); }

int heading_rank(int level, int max_depth) { return std::clamp(level + 1, 1, std::clamp(max_depth, 1, 6)); }

void require_alt_text(const std::vector<DocTree>& trees, const ExamDocument& doc) {
  std::vector<std::string> missing;
  for (const auto& t : trees) {
    auto m = missing_alt_text(t, doc);
    missing.insert(missing.end(), m.begin(), m.end());
  }
  if (!missing.empty()) throw MissingAltText(std::move(missing));
}

std::vector<std::string> verbatim_lines(const std::string& raw) {
  std::vector<std::string> out;
  for (auto& line : text::split_lines(raw)) {
    while (!line.empty() && text::is_space(line.back())) line.pop_back();
    if (!text::trim(line).empty()) out.push_back(std::move(line));
  }
  return out;
}

// --- markdown --------------------------------------------------------------

std::string md_escape_inline(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '\\' || c == '*' || c == '_' || c == '[' || c == ']' || c == '`') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

// Keeps a paragraph from being read as a heading, list, quote or rule.
std::string md_escape_line_start(std::string s) {
  if (s.empty()) return s;
  if (std::string_view("#>+-*=_|`~").find(s[0]) != std::string_view::npos) return "\\" + s;
  std::size_t d = 0;
  while (d < s.size() && s[d] >= '0' && s[d] <= '9') ++d;
  if (d > 0 && d < s.size() && (s[d] == '.' || s[d] == ')')) s.insert(d, "\\");
  return s;
}

std::string md_escape_marker(std::string m) {
  std::size_t d = 0;
  while (d < m.size() && m[d] >= '0' && m[d] <= '9') ++d;
  if (d > 0 && d + 1 == m.size() && (m[d] == '.' || m[d] == ')')) m.insert(d, "\\");
  return m;
}

std::string fence_for(const std::vector<std::string>& lines) {
  std::size_t longest = 0;
  for (const auto& l : lines) {
    std::size_t run = 0;
    for (char c : l) {
      run = c == '`' ? run + 1 : 0;
      longest = std::max(longest, run);
    }
  }
  return std::string(std::max<std::size_t>(3, longest + 1), '`');
}

std::string md_placeholder(BlockCategory c, const std::string& alt) {
  std::string word = c == BlockCategory::figure ? "Figure" : c == BlockCategory::formula ? "Formula" : "Table";
  return "*" + word + ": " + md_escape_inline(alt) + "*";
}

std::string md_visual(const NodeView& v, const ExamDocument& doc, const ExportOptions& opts) {
  const std::string alt = alt_of(v);
  const BlockCategory c = v.node.category;
  if (c == BlockCategory::figure) {
    if (auto asset = figure_asset_name(v.node.block_id, doc)) {
      std::string dir = opts.asset_dir;
      if (!dir.empty() && dir.back() != '/') dir += '/';
      return "![" + md_escape_inline(alt) + "](" + dir + *asset + ")";
    }
    return md_placeholder(c, alt);
  }
  std::string out = md_placeholder(c, alt);
  if (!v.block->text) return out;
  const auto lines = verbatim_lines(*v.block->text);
  if (lines.empty()) return out;
  const std::string open = c == BlockCategory::formula ? "$$" : fence_for(lines);
  out += "\n" + open;
  for (const auto& l : lines) out += "\n" + l;
  out += "\n" + open;
  return out;
}

std::string render_markdown(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts) {
  std::vector<std::string> chunks;
  for (const TreeNode* n : flatten(tree)) {
    const NodeView v = view(*n, doc);
    if (n->is_heading()) {
      std::string line(static_cast<std::size_t>(heading_rank(n->level, opts.max_heading_depth)), '#');
      std::string content = v.text;
      if (!v.marker.empty()) content = v.marker + (content.empty() ? "" : " " + content);
      if (!content.empty()) {
        if (content.back() == '#') content.insert(content.size() - 1, "\\");
        line += " " + content;
      }
      chunks.push_back(std::move(line));
      continue;
    }
    const bool item = n->symbol_id.has_value() || n->category == BlockCategory::list_symbol;
    if (item) {
      // A bare bullet with nothing after it carries no content.
      if (v.marker.empty() && v.text.empty() && !is_visual(n->category)) continue;
      std::string line = "-";
      if (!v.marker.empty()) line += " " + md_escape_marker(v.marker);
      if (!is_visual(n->category) && !v.text.empty()) line += " " + v.text;
      chunks.push_back(std::move(line));
      if (is_visual(n->category)) chunks.push_back(md_visual(v, doc, opts));
      continue;
    }
    if (is_visual(n->category)) {
      chunks.push_back(md_visual(v, doc, opts));
    } else if (!v.text.empty()) {
      chunks.push_back(md_escape_line_start(v.text));
    }
  }
  std::string out;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (i) out += "\n\n";
    out += chunks[i];
  }
  out += "\n";
  return out;
}

// --- html ------------------------------------------------------------------

std::string html_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

std::string html_visual(const NodeView& v, const ExamDocument& doc, const ExportOptions& opts) {
  const std::string alt = html_escape(alt_of(v));
  const BlockCategory c = v.node.category;
  if (c == BlockCategory::figure) {
    if (auto asset = figure_asset_name(v.node.block_id, doc)) {
      std::string dir = opts.asset_dir;
      if (!dir.empty() && dir.back() != '/') dir += '/';
      return "<figure><img src=\"" + html_escape(dir + *asset) + "\" alt=\"" + alt + "\"></figure>";
    }
    return "<figure role=\"img\" aria-label=\"" + alt + "\"><figcaption>" + alt + "</figcaption></figure>";
  }
  std::vector<std::string> lines;
  if (v.block->text) lines = verbatim_lines(*v.block->text);
  if (c == BlockCategory::formula) {
    std::string out = "<figure><figcaption>" + alt + "</figcaption>";
    if (!lines.empty()) {
      out += "<div class=\"math\" role=\"math\" aria-label=\"" + alt + "\">\\[";
      for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + html_escape(lines[i]);
      out += "\\]</div>";
    }
    return out + "</figure>";
  }
  std::string out = "<figure><figcaption>" + alt + "</figcaption>";
  if (!lines.empty()) {
    out += "<pre>";
    for (std::size_t i = 0; i < lines.size(); ++i) out += (i ? "\n" : "") + html_escape(lines[i]);
    out += "</pre>";
  }
  return out + "</figure>";
}

std::string render_html(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts,
                        const std::string& title) {
  std::vector<std::string> body;
  bool in_list = false;
  auto close_list = [&] {
    if (in_list) body.push_back("</ul>");
    in_list = false;
  };
  for (const TreeNode* n : flatten(tree)) {
    const NodeView v = view(*n, doc);
    const bool item = !n->is_heading() && (n->symbol_id.has_value() || n->category == BlockCategory::list_symbol);
    if (!item) close_list();
    if (n->is_heading()) {
      const std::string tag = "h" + std::to_string(heading_rank(n->level, opts.max_heading_depth));
      std::string content = v.text;
      if (!v.marker.empty()) content = v.marker + (content.empty() ? "" : " " + content);
      body.push_back("<" + tag + ">" + html_escape(content) + "</" + tag + ">");
    } else if (item) {
      if (v.marker.empty() && v.text.empty() && !is_visual(n->category)) continue;
      if (!in_list) body.push_back("<ul>");
      in_list = true;
      std::string content = v.marker;
      if (is_visual(n->category)) {
        body.push_back("<li>" + html_escape(content) + (content.empty() ? "" : " ") + html_visual(v, doc, opts) + "</li>");
      } else {
        if (!v.text.empty()) content += (content.empty() ? "" : " ") + v.text;
        body.push_back("<li>" + html_escape(content) + "</li>");
      }
    } else if (is_visual(n->category)) {
      body.push_back(html_visual(v, doc, opts));
    } else if (!v.text.empty()) {
      body.push_back("<p>" + html_escape(v.text) + "</p>");
    }
  }
  close_list();

  std::string lang = doc.source.language.empty() ? "und" : doc.source.language;
  std::string out = "<!DOCTYPE html>\n<html lang=\"" + html_escape(lang) + "\">\n<head>\n<meta charset=\"utf-8\">\n<title>" +
                    html_escape(title) + "</title>\n</head>\n<body>\n";
  for (const auto& line : body) out += line + "\n";
  out += "</body>\n</html>\n";
  return out;
}

std::string document_title(const DocTree& tree, const ExamDocument& doc) {
  for (const TreeNode* n : flatten(tree)) {
    if (n->is_heading() && n->level == 0) {
      const NodeView v = view(*n, doc);
      if (!v.text.empty()) return v.text;
    }
  }
  return doc.source.filename;
}

template <typename Render>
ExportResult render_all(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts, Render render) {
  RepositionResult r = reposition(tree, doc, opts.layout, opts.solutions);
  require_alt_text(r.trees, doc);
  ExportResult out;
  out.warnings = std::move(r.warnings);
  out.primary = render(r.trees[0], false);
  if (r.trees.size() > 1) out.solutions = render(r.trees[1], true);
  return out;
}

}  // namespace

std::string_view to_string(ExportFormat format) { return format == ExportFormat::html ? "html" : "markdown"; }

std::optional<ExportFormat> parse_format(std::string_view name) {
  if (name == "markdown" || name == "md") return ExportFormat::markdown;
  if (name == "html") return ExportFormat::html;
  return std::nullopt;
}

std::string_view file_extension(ExportFormat format) { return format == ExportFormat::html ? "html" : "md"; }

ExportResult to_markdown(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts) {
  return render_all(tree, doc, opts, [&](const DocTree& t, bool) { return render_markdown(t, doc, opts); });
}

ExportResult to_html(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts) {
  const std::string title = document_title(tree, doc);
  return render_all(tree, doc, opts, [&](const DocTree& t, bool solutions) {
    return render_html(t, doc, opts, solutions ? title + " — " + opts.solutions.consolidated_section_label : title);
  });
}

ExportResult export_document(const DocTree& tree, const ExamDocument& doc, const ExportOptions& opts) {
  return opts.format == ExportFormat::html ? to_html(tree, doc, opts) : to_markdown(tree, doc, opts);
}

}  // namespace accsams
