#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "mixgraph/types.hpp"

namespace mixgraph {

// One directed connection. outlet/inlet are the source output channel and
// destination input channel; all shipped processors are SISO, so validate()
// rejects anything but (0, 0).
struct Edge {
  int src = 0;
  int dst = 0;
  int outlet = 0;
  int inlet = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Mutable builder-facing multigraph. Node ids are dense indices in insertion
// order; parallel edges are allowed and sum at render time.
class Graph {
 public:
  int add_node(NodeType t);
  // Creates the nodes in order and connects consecutive pairs with (0, 0)
  // channels. Returns the first and last ids.
  std::pair<int, int> add_serial_chain(const std::vector<NodeType>& types);
  void connect(int src, int dst, int outlet = 0, int inlet = 0);

  // Throws std::invalid_argument if the graph has a cycle, an in node with
  // incoming edges, an out node with outgoing edges, or a nonzero channel
  // index.
  void validate() const;

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  NodeType node_type(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const std::vector<NodeType>& node_types() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

 private:
  std::vector<NodeType> nodes_;
  std::vector<Edge> edges_;
};

// Ids of the second and following graphs are offset so the components stay
// disjoint; input order is the concatenation of the member input orders.
Graph disjoint_union(const std::vector<Graph>& graphs);

// Row-major matrix of per-node parameter rows for one type.
struct ParamMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> values;

  ParamMatrix() = default;
  ParamMatrix(int r, int c) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, 0.0) {}

  std::span<double> row(int r) {
    return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  std::span<const double> row(int r) const {
    return {values.data() + static_cast<std::size_t>(r) * cols, static_cast<std::size_t>(cols)};
  }
  double& at(int r, int c) { return values[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

// Per-type parameter tables. Row l of tables[t] belongs to the l-th
// occurrence of type t in the node order it was built against.
struct ParamStore {
  std::map<NodeType, ParamMatrix> tables;

  bool has(NodeType t) const { return tables.count(t) != 0; }
  ParamMatrix& table(NodeType t) { return tables.at(t); }
  const ParamMatrix& table(NodeType t) const { return tables.at(t); }
};

// Defaults that keep every processor legal: zeros for gain/imager/eq/reverb
// (identity responses), (alpha, T, W, R) = (0.995, -1, 0.5, 4) for dynamics,
// and window-centered unit-circle angular frequencies for the delay.
ParamStore default_params(const std::vector<NodeType>& node_types);
void default_param_row(NodeType t, std::span<double> row);

// Per-type row concatenation, aligned with disjoint_union's node order.
ParamStore concat_params(const std::vector<const ParamStore*>& stores);

// Immutable array form consumed by scheduling and rendering.
struct FlatGraph {
  std::vector<NodeType> node_types;  // insertion order
  std::vector<Edge> edges;
  ParamStore params;
  int num_inputs = 0;
  int num_outputs = 0;

  int num_nodes() const { return static_cast<int>(node_types.size()); }
};

// Validates, then freezes the graph into arrays with default-initialized
// parameter rows.
FlatGraph to_flat(const Graph& g);

}  // namespace mixgraph
