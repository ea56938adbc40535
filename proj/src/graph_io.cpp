#include "mixgraph/graph_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mixgraph {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

std::string graph_to_json(const Graph& g, const ParamStore& params) {
  json doc;
  doc["version"] = 1;
  json nodes = json::array();
  for (int v = 0; v < g.num_nodes(); ++v) {
    nodes.push_back({{"id", v}, {"type", std::string(type_name(g.node_type(v)))}});
  }
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const Edge& e : g.edges()) {
    json je = {{"src", e.src}, {"dst", e.dst}};
    if (e.outlet != 0) je["outlet"] = e.outlet;
    if (e.inlet != 0) je["inlet"] = e.inlet;
    edges.push_back(std::move(je));
  }
  doc["edges"] = std::move(edges);
  if (!params.tables.empty()) {
    json jp = json::object();
    for (const auto& [t, table] : params.tables) {
      json rows = json::array();
      for (int r = 0; r < table.rows; ++r) {
        auto row = table.row(r);
        rows.push_back(json(std::vector<double>(row.begin(), row.end())));
      }
      jp[std::string(type_name(t))] = std::move(rows);
    }
    doc["params"] = std::move(jp);
  }
  return doc.dump(2) + "\n";
}

std::pair<Graph, ParamStore> graph_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("graph document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes")) fail("graph document: missing 'nodes'");

  Graph g;
  const json& nodes = doc["nodes"];
  if (!nodes.is_array()) fail("graph document: 'nodes' must be an array");
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const json& jn = nodes[i];
    if (!jn.contains("type")) fail("graph document: node " + std::to_string(i) + " missing 'type'");
    const std::string name = jn["type"].get<std::string>();
    auto t = type_from_name(name);
    if (!t) fail("graph document: unknown node type '" + name + "'");
    int id = jn.value("id", static_cast<int>(i));
    if (id != static_cast<int>(i)) {
      fail("graph document: node ids must be dense 0..N-1 in order (node " + std::to_string(i) +
           " has id " + std::to_string(id) + ")");
    }
    g.add_node(*t);
  }
  if (doc.contains("edges")) {
    const json& edges = doc["edges"];
    if (!edges.is_array()) fail("graph document: 'edges' must be an array");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      const json& je = edges[i];
      if (!je.contains("src") || !je.contains("dst")) {
        fail("graph document: edge " + std::to_string(i) + " missing 'src' or 'dst'");
      }
      g.connect(je["src"].get<int>(), je["dst"].get<int>(), je.value("outlet", 0),
                je.value("inlet", 0));
    }
  }
  g.validate();

  ParamStore params = default_params(g.node_types());
  if (doc.contains("params")) {
    const json& jp = doc["params"];
    if (!jp.is_object()) fail("graph document: 'params' must be an object");
    for (const auto& [name, rows] : jp.items()) {
      auto t = type_from_name(name);
      if (!t) fail("graph document: unknown parameter type '" + name + "'");
      if (param_width(*t) == 0) fail("graph document: type '" + name + "' takes no parameters");
      if (!params.has(*t)) fail("graph document: no '" + name + "' nodes in the graph");
      ParamMatrix& table = params.table(*t);
      if (static_cast<int>(rows.size()) != table.rows) {
        fail("graph document: '" + name + "' has " + std::to_string(rows.size()) +
             " rows, expected " + std::to_string(table.rows));
      }
      for (int r = 0; r < table.rows; ++r) {
        const json& row = rows[static_cast<std::size_t>(r)];
        if (static_cast<int>(row.size()) != table.cols) {
          fail("graph document: '" + name + "' row " + std::to_string(r) + " has width " +
               std::to_string(row.size()) + ", expected " + std::to_string(table.cols));
        }
        for (int c = 0; c < table.cols; ++c) table.at(r, c) = row[static_cast<std::size_t>(c)].get<double>();
      }
    }
  }
  return {std::move(g), std::move(params)};
}

void save_graph(const Graph& g, const ParamStore& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail("save_graph: cannot open '" + path + "' for writing");
  out << graph_to_json(g, params);
  if (!out) fail("save_graph: write to '" + path + "' failed");
}

std::pair<Graph, ParamStore> load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("load_graph: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return graph_from_json(buf.str());
}

std::string export_dot(const Graph& g) {
  std::ostringstream os;
  os << "digraph {\n";
  os << "  rankdir=LR;\n";
  for (int v = 0; v < g.num_nodes(); ++v) {
    os << "  n" << v << " [label=\"" << type_code(g.node_type(v)) << "\"];\n";
  }
  for (const Edge& e : g.edges()) {
    os << "  n" << e.src << " -> n" << e.dst << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace mixgraph
