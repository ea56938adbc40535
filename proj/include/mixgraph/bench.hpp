#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixgraph/schedule.hpp"

namespace mixgraph {

struct BenchOptions {
  std::vector<int> sizes{4, 8, 16, 32};  // console track counts
  std::vector<Strategy> strategies{Strategy::OneByOne, Strategy::Greedy, Strategy::Beam,
                                   Strategy::Optimal};
  int repeats = 3;
  double send_prune_probability = 0.0;
  long length = 1L << 17;
  double sample_rate = 44100.0;
  std::uint32_t seed = 0;
  int beam_width = 32;
};

struct BenchRow {
  Strategy strategy;
  int tracks = 0;
  int nodes = 0;
  int num_steps = 0;  // processor calls
  double median_ms = 0.0;
  double speedup = 1.0;  // one-by-one median / this median, per track count
};

struct BenchReport {
  std::vector<BenchRow> rows;

  std::string table() const;
  // strategy,K,nodes,N,median_ms,speedup
  std::string csv() const;
};

// Builds (optionally pruned) consoles, schedules them with each strategy and
// renders fixed random sources, reporting schedule length and median wall
// time per render.
BenchReport run_bench(const BenchOptions& options);

}  // namespace mixgraph
