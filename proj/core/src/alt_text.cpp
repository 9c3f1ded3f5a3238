#include <array>
#include <filesystem>
#include <functional>

#include "accsams/export.hpp"
#include "text.hpp"

namespace accsams {

namespace {

constexpr std::array<std::string_view, 5> kCaptionPrefixes = {"figure", "fig.", "abbildung", "tabelle", "table"};

std::string_view category_word(BlockCategory c) {
  switch (c) {
    case BlockCategory::figure:
      return "Figure";
    case BlockCategory::formula:
      return "Formula";
    case BlockCategory::table:
      return "Table";
    default:
      return "Block";
  }
}

bool is_caption(const ContentBlock& b) {
  if (b.category != BlockCategory::paragraph || !b.text) return false;
  const std::string t = text::to_lower(text::trim(*b.text));
  for (std::string_view p : kCaptionPrefixes) {
    if (t.compare(0, p.size(), p) != 0) continue;
    if (p.back() == '.' || t.size() == p.size()) return true;
    const char next = t[p.size()];
    if (!(next >= 'a' && next <= 'z')) return true;
  }
  return false;
}

// Per-page, per-category 1-based ordinal of `block_id` in reading order.
struct Placement {
  int ordinal = 0;
  std::optional<std::string> caption;
};

Placement locate(const std::string& block_id, const ExamDocument& doc) {
  const std::span<const ContentBlock> blocks(doc.blocks);
  const auto order = banded_order(blocks);
  Placement out;
  std::map<std::pair<int, BlockCategory>, int> counts;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const ContentBlock& b = blocks[order[i].index];
    const int k = ++counts[{b.bbox.page, b.category}];
    if (b.id != block_id) continue;
    out.ordinal = k;
    std::vector<std::size_t> candidates;
    if (i + 1 < order.size()) candidates.push_back(i + 1);
    for (std::size_t j = 0; j < order.size(); ++j) {
      if (j != i && j != i + 1 && order[j].band == order[i].band && blocks[order[j].index].bbox.page == b.bbox.page) {
        candidates.push_back(j);
      }
    }
    for (std::size_t j : candidates) {
      const ContentBlock& c = blocks[order[j].index];
      if (is_caption(c)) {
        out.caption = text::collapse_whitespace(*c.text);
        break;
      }
    }
    break;
  }
  return out;
}

bool blank(const std::optional<std::string>& s) { return !s || text::trim(*s).empty(); }

}  // namespace

std::vector<std::string> missing_alt_text(const DocTree& tree, const ExamDocument& doc) {
  std::vector<std::string> out;
  std::function<void(const TreeNode&)> walk = [&](const TreeNode& n) {
    if (!n.synthetic() && is_visual(n.category)) {
      const ContentBlock* b = doc.find_block(n.block_id);
      if (b == nullptr || blank(b->alt_text)) out.push_back(n.block_id);
    }
    for (const TreeNode& c : n.children) walk(c);
  };
  walk(tree.root);
  return out;
}

std::string placeholder_alt_text(const std::string& block_id, const ExamDocument& doc) {
  const ContentBlock* b = doc.find_block(block_id);
  if (b == nullptr) return "Block " + block_id;
  const Placement p = locate(block_id, doc);
  std::string out = std::string(category_word(b->category)) + " " + std::to_string(p.ordinal) + " on page " +
                    std::to_string(b->bbox.page + 1);
  if (p.caption) out += " — " + *p.caption;
  return out;
}

std::vector<std::string> fill_placeholder_alt_text(ExamDocument& doc) {
  std::vector<std::string> filled;
  std::vector<std::pair<std::size_t, std::string>> updates;
  for (std::size_t i = 0; i < doc.blocks.size(); ++i) {
    const ContentBlock& b = doc.blocks[i];
    if (is_visual(b.category) && blank(b.alt_text)) updates.emplace_back(i, placeholder_alt_text(b.id, doc));
  }
  for (auto& [i, alt] : updates) {
    doc.blocks[i].alt_text = std::move(alt);
    filled.push_back(doc.blocks[i].id);
  }
  return filled;
}

std::optional<std::string> figure_asset_name(const std::string& block_id, const ExamDocument& doc) {
  const ContentBlock* b = doc.find_block(block_id);
  if (b == nullptr || b->category != BlockCategory::figure) return std::nullopt;
  const Page* page = doc.find_page(b->bbox.page);
  if (page == nullptr || !page->image || page->image->empty()) return std::nullopt;
  std::string ext = text::to_lower(std::filesystem::path(*page->image).extension().string());
  if (ext.size() > 1) {
    ext = ext.substr(1);
  } else {
    ext = "png";
  }
  return "p" + std::to_string(b->bbox.page + 1) + "-fig" + std::to_string(locate(block_id, doc).ordinal) + "." + ext;
}

}  // namespace accsams
