#pragma once

#include <string>
#include <vector>

#include "pricekit/config.hpp"
#include "pricekit/filters.hpp"
#include "pricekit/panel.hpp"
#include "pricekit/report.hpp"
#include "pricekit/simgen.hpp"

namespace pricekit {

// Resolved pipeline input: a loaded or simulated panel plus the digest of
// whatever produced it (panel file bytes, or the resolved preset text).
struct PipelineInput {
  PricePanel panel;
  std::vector<GroundTruth> truth;  // non-empty only for simulated panels
  std::string input_digest;
  bool simulated = false;
};

PipelineInput prepare_input(const RunConfig& config);

// Individual stages; each adds its files to the bundle.
void stage_validate(const PipelineInput& input, Bundle& bundle);
std::vector<FilterResult> stage_filter(const PipelineInput& input, const RunConfig& config,
                                       Bundle& bundle);
void stage_rigidity(const std::vector<FilterResult>& series, Bundle& bundle);
void stage_inference(const PipelineInput& input, const std::vector<FilterResult>& series,
                     Bundle& bundle);
void stage_magnitude(const std::vector<FilterResult>& series, const RunConfig& config,
                     Bundle& bundle);
void stage_hazard(const PipelineInput& input, const std::vector<FilterResult>& series,
                  Bundle& bundle, bool efron_ties = false);
void stage_endings(const PipelineInput& input, Bundle& bundle);

// Full pipeline: prepare input, run every stage, write the bundle to
// config.out_dir. Returns the files written.
std::vector<std::string> run_pipeline(const RunConfig& config);

}  // namespace pricekit
