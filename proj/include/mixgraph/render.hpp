#pragma once

#include <vector>

#include "mixgraph/audio_buffer.hpp"
#include "mixgraph/processors.hpp"
#include "mixgraph/schedule.hpp"

namespace mixgraph {

struct RenderOptions {
  // Also return every node's output, indexed by original node row.
  bool keep_intermediates = false;
};

struct RenderResult {
  std::vector<AudioBuffer> outputs;        // one per out node, insertion order
  std::vector<AudioBuffer> intermediates;  // per original node row, if requested
};

// Batched execution of the schedule: per step, gather the upstream rows,
// sum-aggregate them into node slots, slice the parameter rows, run the
// type's batch processor and store the results into the intermediate buffer.
// params must be row-aligned with rd.flat (see RenderData::reorder_params);
// sources must match rd's input count, all with identical shape.
RenderResult render(const RenderData& rd, const ProcessorSet& processors,
                    const ParamStore& params, const std::vector<AudioBuffer>& sources,
                    const RenderOptions& options = {});

// Same, with the parameters frozen into rd.flat at conversion time.
RenderResult render(const RenderData& rd, const ProcessorSet& processors,
                    const std::vector<AudioBuffer>& sources, const RenderOptions& options = {});

}  // namespace mixgraph
