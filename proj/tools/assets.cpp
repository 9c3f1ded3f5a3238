#include <cmath>
#include <map>
#include <ostream>

#include <opencv2/imgcodecs.hpp>

#include "accsams/export.hpp"
#include "cli.hpp"

namespace accsams::cli {

namespace fs = std::filesystem;

std::vector<fs::path> write_figure_assets(const ExamDocument& doc, const fs::path& base, const fs::path& dir,
                                          std::ostream& err) {
  std::vector<fs::path> written;
  std::map<int, cv::Mat> rasters;
  for (const ContentBlock& b : doc.blocks) {
    if (b.category != BlockCategory::figure) continue;
    const auto name = figure_asset_name(b.id, doc);
    const Page* page = doc.find_page(b.bbox.page);
    if (!name || page == nullptr || !page->image) continue;

    auto it = rasters.find(page->index);
    if (it == rasters.end()) {
      fs::path src = *page->image;
      if (src.is_relative()) src = base / src;
      cv::Mat img = cv::imread(src.string(), cv::IMREAD_UNCHANGED);
      if (img.empty()) err << "warning: cannot read page raster " << src.string() << "\n";
      it = rasters.emplace(page->index, img).first;
    }
    const cv::Mat& img = it->second;
    if (img.empty() || page->width <= 0 || page->height <= 0) continue;

    const double sx = img.cols / page->width;
    const double sy = img.rows / page->height;
    const int x0 = std::clamp(static_cast<int>(std::floor(b.bbox.x0 * sx)), 0, img.cols);
    const int y0 = std::clamp(static_cast<int>(std::floor(b.bbox.y0 * sy)), 0, img.rows);
    const int x1 = std::clamp(static_cast<int>(std::ceil(b.bbox.x1 * sx)), 0, img.cols);
    const int y1 = std::clamp(static_cast<int>(std::ceil(b.bbox.y1 * sy)), 0, img.rows);
    if (x1 <= x0 || y1 <= y0) {
      err << "warning: figure " << b.id << " crops to an empty region\n";
      continue;
    }
    fs::create_directories(dir);
    const fs::path target = dir / *name;
    // imwrite picks the codec from the extension, so keep it on the temp name.
    const fs::path tmp = dir / (".tmp-" + *name);
    if (!cv::imwrite(tmp.string(), img(cv::Rect(x0, y0, x1 - x0, y1 - y0)))) {
      err << "warning: cannot write " << target.string() << "\n";
      continue;
    }
    fs::rename(tmp, target);
    written.push_back(target);
  }
  return written;
}

}  // namespace accsams::cli
