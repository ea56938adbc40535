#pragma once

#include <functional>
#include <vector>

#include "mixgraph/render.hpp"

namespace mixgraph {

struct FitOptions {
  // Only small-parameter processors may be fitted.
  std::vector<NodeType> trainable{NodeType::Gain};
  int steps = 200;
  double learning_rate = 0.5;
  double fd_step = 1e-3;  // central-difference step per parameter
  // Called after each iteration with (step, loss).
  std::function<void(int, double)> on_step;
};

struct FitResult {
  ParamStore params;                 // aligned with the graph's node order
  std::vector<double> loss_history;  // loss before each step, then final
};

// Mean-squared-error parameter fitting by central finite differences and
// plain gradient descent. Dynamics parameters are projected back into their
// legal ranges after every step. Wide-parameter types (eq, reverb, delay)
// are rejected.
FitResult fit(const FlatGraph& fg, const ParamStore& init, const ProcessorSet& processors,
              const std::vector<AudioBuffer>& sources, const std::vector<AudioBuffer>& target,
              const FitOptions& options = {});

}  // namespace mixgraph
