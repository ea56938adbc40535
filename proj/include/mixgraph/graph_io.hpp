#pragma once

#include <string>
#include <utility>

#include "mixgraph/graph.hpp"

namespace mixgraph {

// Graph document format (JSON):
//   {
//     "version": 1,
//     "nodes": [{"id": 0, "type": "in"}, ...],        // ids dense, 0..N-1
//     "edges": [{"src": 0, "dst": 1, "outlet": 0, "inlet": 0}, ...],
//     "params": {"gain": [[0.0, 0.0], ...], ...}      // optional, per type
//   }
// Delay rows store each tap as [re(z), im(z), 20 log-magnitudes] flattened.
// Numbers round-trip bit-exactly. Types absent from "params" get defaults.
std::string graph_to_json(const Graph& g, const ParamStore& params);
std::pair<Graph, ParamStore> graph_from_json(const std::string& text);

void save_graph(const Graph& g, const ParamStore& params, const std::string& path);
std::pair<Graph, ParamStore> load_graph(const std::string& path);

// Deterministic DOT document, one node per graph node labeled with its
// single-letter code.
std::string export_dot(const Graph& g);

}  // namespace mixgraph
