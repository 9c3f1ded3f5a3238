#include <algorithm>
#include <map>
#include <numeric>

#include "accsams/structure.hpp"

namespace accsams {

namespace {

bool share_band(const BBox& a, const BBox& b) {
  const double overlap = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return overlap >= kBandOverlap * std::min(a.height(), b.height());
}

}  // namespace

std::vector<BandedBlock> banded_order(std::span<const ContentBlock> blocks) {
  std::map<int, std::vector<std::size_t>> by_page;
  for (std::size_t i = 0; i < blocks.size(); ++i) by_page[blocks[i].bbox.page].push_back(i);

  std::vector<BandedBlock> out;
  out.reserve(blocks.size());
  for (auto& [page, idx] : by_page) {
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto& A = blocks[a];
      const auto& B = blocks[b];
      return std::tie(A.bbox.y0, A.bbox.y1, A.bbox.x0, A.id) < std::tie(B.bbox.y0, B.bbox.y1, B.bbox.x0, B.id);
    });

    // A block joins the open band only if it shares a band with every member;
    // pairwise overlap is not transitive, and a tall figure would otherwise
    // swallow all the lines beside it.
    std::vector<BandedBlock> page_out;
    std::vector<std::size_t> open;
    int band = -1;
    for (std::size_t i : idx) {
      const bool joins = !open.empty() && std::all_of(open.begin(), open.end(), [&](std::size_t j) {
                           return share_band(blocks[i].bbox, blocks[j].bbox);
                         });
      if (!joins) {
        open.clear();
        ++band;
      }
      open.push_back(i);
      page_out.push_back({i, band});
    }
    std::sort(page_out.begin(), page_out.end(), [&](const BandedBlock& a, const BandedBlock& b) {
      const auto& A = blocks[a.index];
      const auto& B = blocks[b.index];
      return std::tie(a.band, A.bbox.x0, A.id) < std::tie(b.band, B.bbox.x0, B.id);
    });
    out.insert(out.end(), page_out.begin(), page_out.end());
  }
  return out;
}

std::vector<std::string> reading_order(std::span<const ContentBlock> blocks) {
  std::vector<std::string> ids;
  ids.reserve(blocks.size());
  for (const BandedBlock& b : banded_order(blocks)) ids.push_back(blocks[b.index].id);
  return ids;
}

}  // namespace accsams
