#include "support/test_util.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

namespace mixgraph::testutil {

double uniform(std::mt19937& rng, double lo, double hi) {
  constexpr double scale = 1.0 / 4294967296.0;
  return lo + (hi - lo) * (static_cast<double>(rng()) * scale);
}

Graph random_dag(std::mt19937& rng, int min_nodes, int max_nodes, bool heavy_types) {
  const int n = min_nodes + static_cast<int>(rng() % static_cast<unsigned>(max_nodes - min_nodes + 1));
  int inputs = 1 + static_cast<int>(rng() % 3);
  int outputs = 1 + static_cast<int>(rng() % 2);
  inputs = std::min(inputs, std::max(1, n - 2));
  outputs = std::min(outputs, std::max(1, n - inputs - 1));
  const int interior = n - inputs - outputs;

  // Weighted interior types; the long-kernel processors stay rare so the
  // naive reference keeps a sane runtime.
  std::vector<NodeType> pool;
  auto add = [&](NodeType t, int weight) { pool.insert(pool.end(), static_cast<std::size_t>(weight), t); };
  add(NodeType::Mix, 3);
  add(NodeType::Gain, 4);
  add(NodeType::Eq, 3);
  add(NodeType::Imager, 3);
  add(NodeType::Compressor, 2);
  add(NodeType::Noisegate, 2);
  if (heavy_types) {
    add(NodeType::Reverb, 1);
    add(NodeType::Delay, 1);
  }

  std::vector<NodeType> types;
  for (int i = 0; i < inputs; ++i) types.push_back(NodeType::In);
  for (int i = 0; i < interior; ++i) types.push_back(pool[rng() % pool.size()]);
  std::shuffle(types.begin(), types.end(), rng);  // interleave ins with interior
  for (int i = 0; i < outputs; ++i) types.push_back(NodeType::Out);

  Graph g;
  for (NodeType t : types) g.add_node(t);
  for (int v = 0; v < n; ++v) {
    if (types[static_cast<std::size_t>(v)] == NodeType::In) continue;
    std::vector<int> eligible;
    for (int u = 0; u < v; ++u) {
      if (types[static_cast<std::size_t>(u)] != NodeType::Out) eligible.push_back(u);
    }
    if (eligible.empty()) continue;  // fed by silence
    const int degree = 1 + static_cast<int>(rng() % 3);
    for (int d = 0; d < degree; ++d) {
      g.connect(eligible[rng() % eligible.size()], v);
    }
  }
  return g;
}

ParamStore random_legal_params(const FlatGraph& fg, std::mt19937& rng) {
  ParamStore store = default_params(fg.node_types);
  for (auto& [t, table] : store.tables) {
    for (int r = 0; r < table.rows; ++r) {
      auto row = table.row(r);
      switch (t) {
        case NodeType::Gain:
          row[0] = uniform(rng, -1.0, 1.0);
          row[1] = uniform(rng, -1.0, 1.0);
          break;
        case NodeType::Imager:
          row[0] = uniform(rng, -1.0, 1.0);
          break;
        case NodeType::Eq:
          for (auto& v : row) v = uniform(rng, -0.5, 0.5);
          break;
        case NodeType::Reverb:
          for (int k = 0; k < kReverbNumBins; ++k) {
            row[static_cast<std::size_t>(k)] = uniform(rng, -2.0, 0.0);
            row[static_cast<std::size_t>(kReverbNumBins + k)] = uniform(rng, -1.5, -0.02);
            row[static_cast<std::size_t>(2 * kReverbNumBins + k)] = uniform(rng, -2.0, 0.0);
            row[static_cast<std::size_t>(3 * kReverbNumBins + k)] = uniform(rng, -1.5, -0.02);
          }
          break;
        case NodeType::Compressor:
        case NodeType::Noisegate:
          row[0] = uniform(rng, 0.9, 0.9995);
          row[1] = uniform(rng, -3.0, 0.5);
          row[2] = uniform(rng, 0.1, 1.0);
          row[3] = uniform(rng, 1.0, 8.0);
          break;
        case NodeType::Delay:
          for (int tap = 0; tap < 2 * kDelayTapsPerChannel; ++tap) {
            auto sub = row.subspan(static_cast<std::size_t>(tap) * kDelayTapStride, kDelayTapStride);
            const double radius = uniform(rng, 0.7, 1.0);
            const double angle = uniform(rng, -std::numbers::pi, std::numbers::pi);
            sub[0] = radius * std::cos(angle);
            sub[1] = radius * std::sin(angle);
            const bool active = rng() % 5 != 0;
            for (int k = 0; k < kDelayFirBins; ++k) {
              sub[static_cast<std::size_t>(2 + k)] = active ? uniform(rng, -1.0, 0.5) : -80.0;
            }
          }
          break;
        default:
          break;
      }
    }
  }
  return store;
}

std::vector<AudioBuffer> random_sources(int count, int batch, long length, double sample_rate,
                                        std::mt19937& rng) {
  std::vector<AudioBuffer> sources;
  for (int k = 0; k < count; ++k) {
    AudioBuffer s(batch, 2, length, sample_rate);
    for (auto& v : s.samples) v = uniform(rng, -1.0, 1.0);
    sources.push_back(std::move(s));
  }
  return sources;
}

double rel_linf(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / std::max(scale, 1e-12);
}

double rel_linf(const AudioBuffer& a, const AudioBuffer& b) { return rel_linf(a.samples, b.samples); }

int exhaustive_min_schedule_steps(const FlatGraph& fg) {
  const int n = fg.num_nodes();
  std::vector<int> interior_index(static_cast<std::size_t>(n), -1);
  std::vector<int> rows;
  int outs = 0;
  for (int v = 0; v < n; ++v) {
    const NodeType t = fg.node_types[static_cast<std::size_t>(v)];
    if (t == NodeType::Out) {
      ++outs;
    } else if (t != NodeType::In) {
      interior_index[static_cast<std::size_t>(v)] = static_cast<int>(rows.size());
      rows.push_back(v);
    }
  }
  const int interior = static_cast<int>(rows.size());
  std::vector<std::vector<int>> preds(static_cast<std::size_t>(interior));
  for (const Edge& e : fg.edges) {
    const int si = interior_index[static_cast<std::size_t>(e.src)];
    const int di = interior_index[static_cast<std::size_t>(e.dst)];
    if (si >= 0 && di >= 0) preds[static_cast<std::size_t>(di)].push_back(si);
  }

  std::vector<char> done(static_cast<std::size_t>(interior), 0);
  int best = std::numeric_limits<int>::max();
  std::function<void(int, int)> dfs = [&](int count, int depth) {
    if (count == interior) {
      best = std::min(best, depth);
      return;
    }
    if (depth + 1 >= best) return;
    std::map<NodeType, std::vector<int>> computable;
    for (int j = 0; j < interior; ++j) {
      if (done[static_cast<std::size_t>(j)]) continue;
      bool ready = true;
      for (int p : preds[static_cast<std::size_t>(j)]) {
        if (!done[static_cast<std::size_t>(p)]) {
          ready = false;
          break;
        }
      }
      if (ready) computable[fg.node_types[static_cast<std::size_t>(rows[static_cast<std::size_t>(j)])]].push_back(j);
    }
    for (const auto& [t, subset] : computable) {
      for (int j : subset) done[static_cast<std::size_t>(j)] = 1;
      dfs(count + static_cast<int>(subset.size()), depth + 1);
      for (int j : subset) done[static_cast<std::size_t>(j)] = 0;
    }
  };
  dfs(0, 0);
  if (interior == 0) best = 0;
  return best + (outs > 0 ? 1 : 0);
}

Graph four_track_mix_snippet() {
  Graph g;
  std::vector<int> ins;
  for (int k = 0; k < 4; ++k) ins.push_back(g.add_node(NodeType::In));
  std::vector<int> track_ends;
  for (int k = 0; k < 3; ++k) {
    auto [start, end] = g.add_serial_chain({NodeType::Eq, NodeType::Compressor, NodeType::Gain});
    g.connect(ins[static_cast<std::size_t>(k)], start);
    track_ends.push_back(end);
  }
  auto [short_start, short_end] = g.add_serial_chain({NodeType::Eq, NodeType::Gain});
  g.connect(ins[3], short_start);
  track_ends.push_back(short_end);
  int bus = g.add_node(NodeType::Mix);
  for (int end : track_ends) g.connect(end, bus);
  auto [master_start, master_end] = g.add_serial_chain(
      {NodeType::Reverb, NodeType::Eq, NodeType::Gain, NodeType::Reverb});
  g.connect(bus, master_start);
  int out = g.add_node(NodeType::Out);
  g.connect(master_end, out);
  return g;
}

std::vector<double> naive_convolve_causal(const std::vector<double>& x,
                                          const std::vector<double>& h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t kmax = std::min(i, h.size() - 1);
    for (std::size_t k = 0; k <= kmax; ++k) y[i] += h[k] * x[i - k];
  }
  return y;
}

std::vector<double> naive_convolve_zero_phase(const std::vector<double>& x,
                                              const std::vector<double>& h) {
  const long half = (static_cast<long>(h.size()) - 1) / 2;
  const long length = static_cast<long>(x.size());
  std::vector<double> y(x.size(), 0.0);
  for (long i = 0; i < length; ++i) {
    for (long j = -half; j <= half; ++j) {
      const long idx = i - j;
      if (idx < 0 || idx >= length) continue;
      y[static_cast<std::size_t>(i)] += h[static_cast<std::size_t>(half + j)] * x[static_cast<std::size_t>(idx)];
    }
  }
  return y;
}

}  // namespace mixgraph::testutil
