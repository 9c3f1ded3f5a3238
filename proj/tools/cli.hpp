#pragma once

// The accsams command line tool. Commands are exposed as functions so tests
// can drive them without spawning processes.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "accsams/ingest.hpp"
#include "accsams/model.hpp"
#include "accsams/pipeline.hpp"

namespace accsams::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitContent = 3;

/// Settings from the --config file. Flags given on the command line win.
struct FileConfig {
  std::optional<std::string> layout;
  std::optional<std::string> format;
  std::optional<std::filesystem::path> output_dir;
  std::optional<int> max_heading_depth;
  PipelineConfig pipeline;
  std::optional<FilterConfig> filter;
  std::optional<std::filesystem::path> data_dir;
  std::optional<std::string> bind;
  std::optional<std::size_t> max_upload;
};

/// Throws ConfigError on unknown keys or bad values.
FileConfig parse_config(std::string_view json);
FileConfig load_config(const std::filesystem::path& path);

struct ConvertOptions {
  std::vector<std::filesystem::path> inputs;
  std::optional<std::string> layout;
  std::optional<std::string> format;
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::filesystem::path> alt_text_file;
  bool placeholder_alt_text = false;
  std::optional<std::filesystem::path> heading_keywords;
  std::optional<std::filesystem::path> solution_config;
  std::optional<std::string> solution_keywords;
  std::optional<int> max_heading_depth;
  bool write_assets = true;
};

struct EvaluateOptions {
  std::vector<std::filesystem::path> preds;
  std::vector<std::filesystem::path> golds;
  std::string mode = "detection";
  std::filesystem::path json_out = "evaluation.json";
};

struct FilterOptions {
  std::filesystem::path manifest;
  std::optional<std::filesystem::path> filter_config;
  std::optional<std::filesystem::path> output;
};

int cmd_convert(const ConvertOptions& opts, const FileConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& opts, const FileConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_filter(const FilterOptions& opts, const FileConfig& cfg, std::ostream& out, std::ostream& err);

/// Full argument parsing and dispatch; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes via a temporary sibling and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Crops each figure from its page raster into dir, named by
/// figure_asset_name(). Relative raster paths resolve against base.
/// Returns the files written; unreadable rasters are reported to err.
std::vector<std::filesystem::path> write_figure_assets(const ExamDocument& doc, const std::filesystem::path& base,
                                                       const std::filesystem::path& dir, std::ostream& err);

}  // namespace accsams::cli
