#pragma once

#include <vector>

#include "mixgraph/audio_buffer.hpp"
#include "mixgraph/processors.hpp"

namespace mixgraph {

// Slow per-node renderer used as an independent check on the batched engine:
// plain topological evaluation with direct time-domain convolutions, direct
// DFT filter construction and a recursive envelope for the dynamics
// processors. No scheduling, no FFT shortcuts. `params` is aligned with the
// graph's original node order; `processors` only supplies the configuration
// and reverb noise seed.
std::vector<AudioBuffer> render_reference(const FlatGraph& fg, const ProcessorSet& processors,
                                          const ParamStore& params,
                                          const std::vector<AudioBuffer>& sources);

}  // namespace mixgraph
