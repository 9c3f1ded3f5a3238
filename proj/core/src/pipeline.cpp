#include "accsams/pipeline.hpp"

namespace accsams {

DocTree run_pipeline(const ExamDocument& doc, const PipelineConfig& cfg, const SolutionOverrides& overrides) {
  return detect_solutions(build_tree(doc, cfg.structure), doc, cfg.solutions, overrides);
}

}  // namespace accsams
