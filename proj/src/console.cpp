#include "mixgraph/console.hpp"

#include <random>
#include <stdexcept>

namespace mixgraph {

Graph generate_console(int tracks) { return generate_console(tracks, ConsoleOptions{}); }

Graph generate_console(int tracks, const ConsoleOptions& options) {
  if (tracks < 1) throw std::invalid_argument("generate_console: need at least one track");
  std::mt19937 rng(options.seed);
  auto keep_send = [&] {
    if (options.send_prune_probability <= 0.0) return true;
    constexpr double scale = 1.0 / 4294967296.0;
    return static_cast<double>(rng()) * scale >= options.send_prune_probability;
  };

  Graph g;
  std::vector<int> track_gains;
  std::vector<std::pair<int, int>> sends;  // (gain, send node), wired to the bus below
  for (int k = 0; k < tracks; ++k) {
    int input = g.add_node(NodeType::In);
    auto [start, gain] = g.add_serial_chain(
        {NodeType::Eq, NodeType::Compressor, NodeType::Noisegate, NodeType::Imager, NodeType::Gain});
    g.connect(input, start);
    track_gains.push_back(gain);
    if (keep_send()) sends.emplace_back(gain, g.add_node(NodeType::Delay));
    if (keep_send()) sends.emplace_back(gain, g.add_node(NodeType::Reverb));
  }

  int bus = g.add_node(NodeType::Mix);
  for (int gain : track_gains) g.connect(gain, bus);
  for (auto [gain, send] : sends) {
    g.connect(gain, send);
    g.connect(send, bus);
  }
  auto [bus_start, bus_end] = g.add_serial_chain(
      {NodeType::Eq, NodeType::Compressor, NodeType::Imager, NodeType::Gain});
  g.connect(bus, bus_start);
  int out = g.add_node(NodeType::Out);
  g.connect(bus_end, out);
  return g;
}

}  // namespace mixgraph
