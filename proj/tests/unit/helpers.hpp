#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "accsams/model.hpp"

namespace accsams::testing {

inline std::string fixture(const std::string& name) { return std::string(ACCSAMS_FIXTURE_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ContentBlock blk(std::string id, BlockCategory cat, std::optional<std::string> text, double y0, double y1,
                        double x0 = 60, double x1 = 500, int page = 0) {
  ContentBlock b;
  b.id = std::move(id);
  b.category = cat;
  b.text = std::move(text);
  b.bbox = {page, x0, y0, x1, y1};
  return b;
}

inline ContentBlock heading(std::string id, std::string text, double y, int page = 0) {
  return blk(std::move(id), BlockCategory::heading, std::move(text), y, y + 16, 60, 400, page);
}

inline ContentBlock para(std::string id, std::string text, double y, int page = 0) {
  return blk(std::move(id), BlockCategory::paragraph, std::move(text), y, y + 14, 60, 500, page);
}

inline ExamDocument make_doc(std::vector<ContentBlock> blocks, int pages = 1, std::string language = "en") {
  ExamDocument d;
  d.source = {"test.pdf", std::move(language)};
  for (int p = 0; p < pages; ++p) d.pages.push_back({p, 595, 842, std::nullopt});
  d.blocks = std::move(blocks);
  return d;
}

}  // namespace accsams::testing
