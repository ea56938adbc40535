#include "mixgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mixgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

int Graph::add_node(NodeType t) {
  nodes_.push_back(t);
  return static_cast<int>(nodes_.size()) - 1;
}

std::pair<int, int> Graph::add_serial_chain(const std::vector<NodeType>& types) {
  if (types.empty()) fail("add_serial_chain: empty type list");
  int first = add_node(types.front());
  int prev = first;
  for (std::size_t i = 1; i < types.size(); ++i) {
    int id = add_node(types[i]);
    connect(prev, id);
    prev = id;
  }
  return {first, prev};
}

void Graph::connect(int src, int dst, int outlet, int inlet) {
  auto check_id = [this](int id) {
    if (id < 0 || id >= num_nodes()) {
      fail("connect: unknown node id " + std::to_string(id));
    }
  };
  check_id(src);
  check_id(dst);
  if (node_type(dst) == NodeType::In) fail("connect: in nodes take no incoming edges");
  if (node_type(src) == NodeType::Out) fail("connect: out nodes have no outgoing edges");
  edges_.push_back(Edge{src, dst, outlet, inlet});
}

void Graph::validate() const {
  const int n = num_nodes();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> successors(n);
  for (const Edge& e : edges_) {
    if (e.src < 0 || e.src >= n || e.dst < 0 || e.dst >= n) {
      fail("validate: edge references unknown node id");
    }
    if (e.outlet != 0 || e.inlet != 0) {
      std::ostringstream os;
      os << "validate: edge " << e.src << "->" << e.dst << " uses channel (" << e.outlet << ","
         << e.inlet << "); all processors are single-channel, only (0,0) is accepted";
      fail(os.str());
    }
    if (node_type(e.dst) == NodeType::In) fail("validate: in node " + std::to_string(e.dst) + " has an incoming edge");
    if (node_type(e.src) == NodeType::Out) fail("validate: out node " + std::to_string(e.src) + " has an outgoing edge");
    indegree[e.dst]++;
    successors[e.src].push_back(e.dst);
  }

  // Kahn's algorithm; whatever it cannot consume lies on a cycle.
  std::queue<int> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  int consumed = 0;
  std::vector<int> remaining = indegree;
  while (!ready.empty()) {
    int v = ready.front();
    ready.pop();
    ++consumed;
    for (int w : successors[v]) {
      if (--remaining[w] == 0) ready.push(w);
    }
  }
  if (consumed == n) return;

  // Walk successors among the leftover nodes until one repeats.
  std::vector<char> leftover(n, 0);
  int start = -1;
  for (int v = 0; v < n; ++v) {
    if (remaining[v] > 0) {
      leftover[v] = 1;
      if (start < 0) start = v;
    }
  }
  std::vector<int> path;
  std::vector<int> seen_at(n, -1);
  int v = start;
  while (seen_at[v] < 0) {
    seen_at[v] = static_cast<int>(path.size());
    path.push_back(v);
    for (int w : successors[v]) {
      if (leftover[w]) {
        v = w;
        break;
      }
    }
  }
  std::ostringstream os;
  os << "validate: cycle found:";
  for (std::size_t i = static_cast<std::size_t>(seen_at[v]); i < path.size(); ++i) {
    os << " " << path[i] << " ->";
  }
  os << " " << v;
  fail(os.str());
}

Graph disjoint_union(const std::vector<Graph>& graphs) {
  Graph out;
  int offset = 0;
  for (const Graph& g : graphs) {
    g.validate();
    for (int v = 0; v < g.num_nodes(); ++v) out.add_node(g.node_type(v));
    for (const Edge& e : g.edges()) {
      out.connect(e.src + offset, e.dst + offset, e.outlet, e.inlet);
    }
    offset += g.num_nodes();
  }
  return out;
}

void default_param_row(NodeType t, std::span<double> row) {
  std::fill(row.begin(), row.end(), 0.0);
  switch (t) {
    case NodeType::Compressor:
    case NodeType::Noisegate:
      row[0] = 0.995;  // alpha
      row[1] = -1.0;   // threshold, natural-log energy
      row[2] = 0.5;    // half knee width
      row[3] = 4.0;    // ratio
      break;
    case NodeType::Delay: {
      // One unit-circle angular frequency per tap, aimed at the center of the
      // tap's 100 ms window: d/N_d = (m + 0.5) / 20 * 0.1 / 2.
      for (int tap = 0; tap < 2 * kDelayTapsPerChannel; ++tap) {
        int m = tap % kDelayTapsPerChannel;
        double frac = (m + 0.5) * kDelayWindowSeconds / kDelaySeconds;
        double angle = -2.0 * std::numbers::pi * frac;
        row[tap * kDelayTapStride + 0] = std::cos(angle);
        row[tap * kDelayTapStride + 1] = std::sin(angle);
      }
      break;
    }
    default:
      break;
  }
}

ParamStore default_params(const std::vector<NodeType>& node_types) {
  std::map<NodeType, int> counts;
  for (NodeType t : node_types) {
    if (param_width(t) > 0) counts[t]++;
  }
  ParamStore store;
  for (const auto& [t, count] : counts) {
    ParamMatrix m(count, param_width(t));
    for (int r = 0; r < count; ++r) default_param_row(t, m.row(r));
    store.tables.emplace(t, std::move(m));
  }
  return store;
}

ParamStore concat_params(const std::vector<const ParamStore*>& stores) {
  ParamStore out;
  for (const ParamStore* s : stores) {
    for (const auto& [t, m] : s->tables) {
      auto it = out.tables.find(t);
      if (it == out.tables.end()) {
        out.tables.emplace(t, m);
      } else {
        if (it->second.cols != m.cols) fail("concat_params: column mismatch");
        it->second.values.insert(it->second.values.end(), m.values.begin(), m.values.end());
        it->second.rows += m.rows;
      }
    }
  }
  return out;
}

FlatGraph to_flat(const Graph& g) {
  g.validate();
  FlatGraph fg;
  fg.node_types = g.node_types();
  fg.edges = g.edges();
  fg.params = default_params(fg.node_types);
  for (NodeType t : fg.node_types) {
    if (t == NodeType::In) fg.num_inputs++;
    if (t == NodeType::Out) fg.num_outputs++;
  }
  return fg;
}

}  // namespace mixgraph
