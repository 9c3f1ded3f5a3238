#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "accsams/errors.hpp"
#include "accsams/structure.hpp"

namespace accsams {

namespace {

constexpr double kFontEps = 1e-9;

void collect_preorder(const TreeNode& n, std::vector<std::string>& out, bool with_symbols) {
  if (!n.synthetic()) {
    if (with_symbols && n.symbol_id) out.push_back(*n.symbol_id);
    out.push_back(n.block_id);
  }
  for (const TreeNode& c : n.children) collect_preorder(c, out, with_symbols);
}

struct FlatNode {
  TreeNode node;
  int parent;  // index into the flat list, -1 for the root
};

TreeNode assemble(const std::vector<FlatNode>& flat, const std::vector<std::vector<int>>& kids, int at,
                  TreeNode base) {
  for (int child : kids[static_cast<std::size_t>(at + 1)]) {
    base.children.push_back(assemble(flat, kids, child, flat[static_cast<std::size_t>(child)].node));
  }
  return base;
}

}  // namespace

LevelAssignment assign_heading_levels(std::span<const HeadingCue> headings) {
  LevelAssignment out;

  std::optional<double> max_font;
  for (const auto& h : headings) {
    if (h.page == 0 && h.font_size && (!max_font || *h.font_size > *max_font)) max_font = h.font_size;
  }
  std::optional<std::size_t> title;
  if (max_font) {
    for (std::size_t i = 0; i < headings.size(); ++i) {
      const auto& h = headings[i];
      if (h.page == 0 && h.marker.style == MarkerStyle::none && h.font_size &&
          std::abs(*h.font_size - *max_font) < kFontEps) {
        title = i;
        break;
      }
    }
  }

  std::map<MarkerStyle, int> last_by_style;
  std::optional<int> prev_level;
  std::optional<double> prev_font;
  for (std::size_t i = 0; i < headings.size(); ++i) {
    const HeadingCue& h = headings[i];
    const MarkerStyle style = h.marker.style;
    int level = 1;
    if (title && *title == i) {
      level = 0;
    } else if (style == MarkerStyle::keyword_heading) {
      level = 1;
    } else if (style == MarkerStyle::multilevel_decimal) {
      level = h.marker.depth;
    } else if (is_flat_ordinal(style) || style == MarkerStyle::bullet) {
      if (auto it = last_by_style.find(style); it != last_by_style.end()) {
        level = it->second;
      } else {
        level = prev_level ? *prev_level + 1 : 1;
      }
    } else {
      // Level 0 stays reserved for the title.
      level = std::max(1, prev_level.value_or(1));
    }

    if (prev_level && prev_font && h.font_size) {
      const bool deeper_but_larger = level > *prev_level && *h.font_size > *prev_font + kFontEps;
      const bool shallower_but_smaller = level < *prev_level && *h.font_size < *prev_font - kFontEps;
      if (deeper_but_larger || shallower_but_smaller) {
        out.diagnostics.push_back({std::string(diagnostic::kFontLevelConflict), h.block_id,
                                   "enumeration puts '" + h.block_id + "' at level " + std::to_string(level) +
                                       " although its font size suggests otherwise"});
      }
    }

    out.levels[h.block_id] = level;
    if (style != MarkerStyle::none) last_by_style[style] = level;
    prev_level = level;
    prev_font = h.font_size;
  }
  return out;
}

std::vector<std::string> preorder_ids(const TreeNode& root) {
  std::vector<std::string> out;
  collect_preorder(root, out, false);
  return out;
}

std::vector<std::string> covered_block_ids(const TreeNode& root) {
  std::vector<std::string> out;
  collect_preorder(root, out, true);
  return out;
}

void refresh_order(DocTree& tree) { tree.ordered = preorder_ids(tree.root); }

DocTree build_tree(const ExamDocument& doc, const StructureConfig& cfg) {
  DocTree tree;
  const std::span<const ContentBlock> blocks(doc.blocks);
  const auto order = banded_order(blocks);

  // Pass 1: merge list symbols and classify markers.
  std::vector<TreeNode> nodes;
  std::vector<const ContentBlock*> primary;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const ContentBlock& b = blocks[order[i].index];
    TreeNode n;
    if (b.category == BlockCategory::list_symbol) {
      const bool mergeable = i + 1 < order.size() && order[i + 1].band == order[i].band &&
                             blocks[order[i + 1].index].bbox.page == b.bbox.page &&
                             blocks[order[i + 1].index].category != BlockCategory::list_symbol;
      n.marker = classify_marker(b.text, cfg);
      if (mergeable) {
        const ContentBlock& next = blocks[order[i + 1].index];
        n.block_id = next.id;
        n.symbol_id = b.id;
        n.category = next.category;
        primary.push_back(&next);
        ++i;
      } else {
        tree.diagnostics.push_back({std::string(diagnostic::kDanglingListSymbol), b.id,
                                    "list symbol '" + b.id + "' has no same-line successor"});
        n.block_id = b.id;
        n.category = b.category;
        primary.push_back(&b);
      }
    } else {
      n.block_id = b.id;
      n.category = b.category;
      if (b.category == BlockCategory::heading) n.marker = classify_marker(b.text, cfg);
      primary.push_back(&b);
    }
    nodes.push_back(std::move(n));
  }

  // Pass 2: disambiguate lone i/v/x inside heading runs and list-item runs.
  for (bool headings : {true, false}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const bool is_heading = nodes[i].is_heading();
      const bool is_item = nodes[i].symbol_id.has_value() || nodes[i].category == BlockCategory::list_symbol;
      if (headings ? is_heading : (is_item && !is_heading)) idx.push_back(i);
    }
    std::vector<Marker> seq;
    for (auto i : idx) seq.push_back(nodes[i].marker);
    resolve_marker_runs(seq);
    for (std::size_t k = 0; k < idx.size(); ++k) nodes[idx[k]].marker = seq[k];
  }

  // Pass 3: heading levels.
  std::vector<HeadingCue> cues;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_heading()) continue;
    cues.push_back({nodes[i].block_id, nodes[i].marker, primary[i]->font_size, primary[i]->bbox.page});
  }
  LevelAssignment levels = assign_heading_levels(cues);
  tree.diagnostics.insert(tree.diagnostics.end(), levels.diagnostics.begin(), levels.diagnostics.end());

  // Pass 4: stack nesting over a flat parent list.
  std::vector<FlatNode> flat;
  std::vector<int> stack;  // flat indices; empty means the root is on top
  auto top_level = [&] { return stack.empty() ? -1 : flat[static_cast<std::size_t>(stack.back())].node.level; };
  for (TreeNode& n : nodes) {
    if (n.is_heading()) {
      n.level = levels.levels.at(n.block_id);
      while (!stack.empty() && top_level() >= n.level) stack.pop_back();
      flat.push_back({std::move(n), stack.empty() ? -1 : stack.back()});
      stack.push_back(static_cast<int>(flat.size() - 1));
    } else {
      n.level = top_level() + 1;
      flat.push_back({std::move(n), stack.empty() ? -1 : stack.back()});
    }
  }
  std::vector<std::vector<int>> kids(flat.size() + 1);
  for (std::size_t i = 0; i < flat.size(); ++i) kids[static_cast<std::size_t>(flat[i].parent + 1)].push_back(static_cast<int>(i));
  tree.root = assemble(flat, kids, -1, std::move(tree.root));
  refresh_order(tree);
  return tree;
}

void check_tree(const DocTree& tree, const ExamDocument& doc) {
  std::set<std::string> seen;
  bool heading_seen = false;
  std::function<void(const TreeNode&, int)> walk = [&](const TreeNode& n, int heading_level) {
    if (n.level < 0) throw InvalidTree("negative level");
    if (n.synthetic()) {
      if (!n.label) throw InvalidTree("synthetic node without label");
    } else {
      for (const std::string* id : {&n.block_id, n.symbol_id ? &*n.symbol_id : nullptr}) {
        if (id == nullptr) continue;
        if (doc.find_block(*id) == nullptr) throw InvalidTree("unknown block '" + *id + "'");
        if (!seen.insert(*id).second) throw InvalidTree("block '" + *id + "' appears twice");
      }
    }
    int next_heading_level = heading_level;
    if (n.is_heading()) {
      if (n.level <= heading_level) {
        throw InvalidTree("heading '" + (n.synthetic() ? *n.label : n.block_id) + "' at level " +
                          std::to_string(n.level) + " is not deeper than its parent heading");
      }
      if (n.level == 0 && heading_seen) throw InvalidTree("a level-0 title must precede every other heading");
      heading_seen = true;
      next_heading_level = n.level;
    }
    for (const TreeNode& c : n.children) walk(c, next_heading_level);
  };
  for (const TreeNode& c : tree.root.children) walk(c, -1);
  if (seen.size() != doc.blocks.size()) {
    for (const auto& b : doc.blocks) {
      if (!seen.count(b.id)) throw InvalidTree("block '" + b.id + "' is missing from the tree");
    }
  }
}

std::map<std::string, int> block_levels(const DocTree& tree) {
  std::map<std::string, int> out;
  std::function<void(const TreeNode&)> walk = [&](const TreeNode& n) {
    if (!n.synthetic()) {
      out[n.block_id] = n.level;
      if (n.symbol_id) out[*n.symbol_id] = n.level;
    }
    for (const TreeNode& c : n.children) walk(c);
  };
  for (const TreeNode& c : tree.root.children) walk(c);
  return out;
}

}  // namespace accsams
