#pragma once

#include <cstdint>

#include "mixgraph/graph.hpp"

namespace mixgraph {

struct ConsoleOptions {
  // Probability of dropping each per-track delay/reverb send, emulating
  // pruned consoles.
  double send_prune_probability = 0.0;
  std::uint32_t seed = 0;
};

// A K-track mixing console. Each track runs
//   in -> eq -> compressor -> noisegate -> imager -> gain -> mix bus
// with delay and reverb sends from the track gain into the bus, and the bus
// runs mix -> eq -> compressor -> imager -> gain -> out. 8K + 6 nodes when
// nothing is pruned.
Graph generate_console(int tracks);
Graph generate_console(int tracks, const ConsoleOptions& options);

}  // namespace mixgraph
