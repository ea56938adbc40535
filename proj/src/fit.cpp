#include "mixgraph/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mixgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void project_legal(NodeType t, ParamMatrix& table) {
  if (t != NodeType::Compressor && t != NodeType::Noisegate) return;
  for (int r = 0; r < table.rows; ++r) {
    auto row = table.row(r);
    row[0] = std::clamp(row[0], 1e-4, 1.0 - 1e-4);  // alpha
    row[2] = std::max(row[2], 1e-3);                // knee half-width
    row[3] = std::max(row[3], 1.0);                 // ratio
  }
}

}  // namespace

FitResult fit(const FlatGraph& fg, const ParamStore& init, const ProcessorSet& processors,
              const std::vector<AudioBuffer>& sources, const std::vector<AudioBuffer>& target,
              const FitOptions& options) {
  for (NodeType t : options.trainable) {
    if (t == NodeType::Eq || t == NodeType::Reverb || t == NodeType::Delay) {
      fail(std::string("fit: '") + std::string(type_name(t)) +
           "' has too many parameters for finite differences; trainable types are "
           "gain, imager, compressor and noisegate");
    }
    if (param_width(t) == 0) {
      fail(std::string("fit: '") + std::string(type_name(t)) + "' has no parameters");
    }
  }

  RenderData rd = compute_render_data(fg);
  if (static_cast<int>(target.size()) != fg.num_outputs) {
    fail("fit: target must have one buffer per out node");
  }

  ParamStore params = init;
  auto loss_of = [&](const ParamStore& p) {
    RenderResult res = render(rd, processors, rd.reorder_params(p), sources);
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t o = 0; o < res.outputs.size(); ++o) {
      const auto& y = res.outputs[o].samples;
      const auto& t = target[o].samples;
      if (y.size() != t.size()) fail("fit: target shape mismatch");
      for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - t[i];
        acc += d * d;
      }
      count += y.size();
    }
    return acc / static_cast<double>(count);
  };

  FitResult result;
  for (int step = 0; step < options.steps; ++step) {
    const double loss = loss_of(params);
    result.loss_history.push_back(loss);
    if (options.on_step) options.on_step(step, loss);

    ParamStore grads = params;
    for (auto& [t, table] : grads.tables) std::fill(table.values.begin(), table.values.end(), 0.0);
    for (NodeType t : options.trainable) {
      if (!params.has(t)) continue;
      ParamMatrix& table = params.table(t);
      for (std::size_t i = 0; i < table.values.size(); ++i) {
        const double saved = table.values[i];
        table.values[i] = saved + options.fd_step;
        const double up = loss_of(params);
        table.values[i] = saved - options.fd_step;
        const double down = loss_of(params);
        table.values[i] = saved;
        grads.table(t).values[i] = (up - down) / (2.0 * options.fd_step);
      }
    }
    for (NodeType t : options.trainable) {
      if (!params.has(t)) continue;
      ParamMatrix& table = params.table(t);
      const ParamMatrix& grad = grads.table(t);
      for (std::size_t i = 0; i < table.values.size(); ++i) {
        table.values[i] -= options.learning_rate * grad.values[i];
      }
      project_legal(t, table);
    }
  }
  result.loss_history.push_back(loss_of(params));
  result.params = std::move(params);
  return result;
}

}  // namespace mixgraph
