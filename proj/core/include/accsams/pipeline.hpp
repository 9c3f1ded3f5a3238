#pragma once

#include "accsams/export.hpp"
#include "accsams/model.hpp"
#include "accsams/solutions.hpp"
#include "accsams/structure.hpp"

namespace accsams {

struct PipelineConfig {
  StructureConfig structure;
  SolutionConfig solutions;
};

/// Hierarchy plus solution flags for a validated document.
DocTree run_pipeline(const ExamDocument& doc, const PipelineConfig& cfg = {}, const SolutionOverrides& overrides = {});

}  // namespace accsams
