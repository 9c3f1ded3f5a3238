#include "accsams/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <unordered_set>

#include "accsams/errors.hpp"

namespace accsams {

namespace {

constexpr std::array<std::string_view, 6> kCategoryNames = {
    "heading", "paragraph", "list_symbol", "figure", "formula", "table"};

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += ", ";
    out += id;
  }
  return out;
}

std::string summarize(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << violations.size() << " validation violation(s)";
  for (const auto& v : violations) {
    os << "; " << v.code;
    if (v.block_id) os << "(" << *v.block_id << ")";
  }
  return os.str();
}

}  // namespace

std::string_view to_string(BlockCategory category) {
  return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<BlockCategory> parse_category(std::string_view name) {
  for (std::size_t i = 0; i < kCategoryNames.size(); ++i) {
    if (kCategoryNames[i] == name) return kAllCategories[i];
  }
  return std::nullopt;
}

const ContentBlock* ExamDocument::find_block(std::string_view id) const {
  auto it = std::find_if(blocks.begin(), blocks.end(), [&](const ContentBlock& b) { return b.id == id; });
  return it == blocks.end() ? nullptr : &*it;
}

ContentBlock* ExamDocument::find_block(std::string_view id) {
  auto it = std::find_if(blocks.begin(), blocks.end(), [&](const ContentBlock& b) { return b.id == id; });
  return it == blocks.end() ? nullptr : &*it;
}

const Page* ExamDocument::find_page(int index) const {
  if (index < 0 || static_cast<std::size_t>(index) >= pages.size()) return nullptr;
  return &pages[static_cast<std::size_t>(index)];
}

std::vector<Violation> validate_document(const ExamDocument& doc) {
  std::vector<Violation> out;
  auto add = [&](std::string_view code, std::optional<std::string> id, std::string msg) {
    out.push_back(Violation{std::string(code), std::move(id), std::move(msg)});
  };

  for (std::size_t i = 0; i < doc.pages.size(); ++i) {
    const Page& p = doc.pages[i];
    if (p.index != static_cast<int>(i)) {
      add(violation::kBadPage, std::nullopt,
          "page at position " + std::to_string(i) + " has index " + std::to_string(p.index));
    }
    if (!(p.width > 0) || !(p.height > 0)) {
      add(violation::kBadPage, std::nullopt, "page " + std::to_string(i) + " has non-positive extent");
    }
  }

  std::unordered_set<std::string> seen;
  std::set<std::string> reported_dups;
  for (const ContentBlock& b : doc.blocks) {
    if (!seen.insert(b.id).second && reported_dups.insert(b.id).second) {
      add(violation::kDuplicateId, b.id, "block id '" + b.id + "' is not unique");
    }
    const Page* page = doc.find_page(b.bbox.page);
    if (page == nullptr) {
      add(violation::kBadPageRef, b.id,
          "block '" + b.id + "' references page " + std::to_string(b.bbox.page) + " of " +
              std::to_string(doc.pages.size()));
    }
    const BBox& r = b.bbox;
    if (!(r.x0 < r.x1) || !(r.y0 < r.y1)) {
      add(violation::kBBoxRange, b.id, "block '" + b.id + "' has an empty or inverted box");
    } else if (page != nullptr) {
      const double tol = kPageExtentTolerance;
      if (r.x0 < -tol || r.y0 < -tol || r.x1 > page->width + tol || r.y1 > page->height + tol) {
        add(violation::kBBoxRange, b.id, "block '" + b.id + "' lies outside its page");
      }
    }
  }

  if (doc.annotations) {
    const auto& order = doc.annotations->order;
    if (!order.empty()) {
      std::vector<bool> hit(doc.blocks.size(), false);
      bool ok = order.size() == doc.blocks.size();
      for (const auto& [id, pos] : order) {
        if (!seen.count(id)) {
          add(violation::kBadGoldOrder, id, "gold order names unknown block '" + id + "'");
          ok = false;
          continue;
        }
        if (pos < 0 || static_cast<std::size_t>(pos) >= hit.size() || hit[static_cast<std::size_t>(pos)]) {
          ok = false;
          continue;
        }
        hit[static_cast<std::size_t>(pos)] = true;
      }
      if (!ok) add(violation::kBadGoldOrder, std::nullopt, "gold order is not a permutation of 0..n-1");
    }
    for (const auto& [id, level] : doc.annotations->level) {
      if (!seen.count(id)) {
        add(violation::kBadGoldLevel, id, "gold level names unknown block '" + id + "'");
      } else if (level < 0) {
        add(violation::kBadGoldLevel, id, "gold level for '" + id + "' is negative");
      }
    }
  }
  return out;
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(summarize(violations)), violations_(std::move(violations)) {}

MissingAltText::MissingAltText(std::vector<std::string> block_ids)
    : Error("missing alt text for: " + join_ids(block_ids)), block_ids_(std::move(block_ids)) {}

}  // namespace accsams
