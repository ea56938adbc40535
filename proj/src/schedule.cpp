#include "mixgraph/schedule.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <deque>
#include <map>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mixgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Scheduling only looks at interior nodes: inputs are processed "for free" in
// V_0 and outputs are pinned to the final subset.
struct Analysis {
  int num_nodes = 0;
  int interior_count = 0;
  std::vector<NodeType> types;            // per row
  std::vector<int> interior_index;        // row -> dense interior index, -1 otherwise
  std::vector<int> interior_rows;         // interior index -> row
  std::vector<int> in_rows;
  std::vector<int> out_rows;
  std::vector<std::vector<int>> preds;    // per interior index: unique interior preds
  std::vector<std::vector<int>> succs;    // per interior index: interior successors
};

Analysis analyze(const FlatGraph& fg) {
  Analysis a;
  a.num_nodes = fg.num_nodes();
  a.types = fg.node_types;
  a.interior_index.assign(a.num_nodes, -1);
  for (int r = 0; r < a.num_nodes; ++r) {
    switch (a.types[r]) {
      case NodeType::In:
        a.in_rows.push_back(r);
        break;
      case NodeType::Out:
        a.out_rows.push_back(r);
        break;
      default:
        a.interior_index[r] = static_cast<int>(a.interior_rows.size());
        a.interior_rows.push_back(r);
    }
  }
  a.interior_count = static_cast<int>(a.interior_rows.size());
  a.preds.resize(a.interior_count);
  a.succs.resize(a.interior_count);
  for (const Edge& e : fg.edges) {
    int si = a.interior_index[e.src];
    int di = a.interior_index[e.dst];
    if (di >= 0 && si >= 0) {
      a.preds[di].push_back(si);
      a.succs[si].push_back(di);
    }
  }
  for (auto& p : a.preds) {
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
  return a;
}

using Bits = std::vector<std::uint64_t>;

Bits make_bits(int n) { return Bits(static_cast<std::size_t>((n + 63) / 64), 0); }
bool test_bit(const Bits& b, int i) { return (b[i >> 6] >> (i & 63)) & 1u; }
void set_bit(Bits& b, int i) { b[i >> 6] |= std::uint64_t{1} << (i & 63); }

int popcount(const Bits& b) {
  int c = 0;
  for (auto w : b) c += std::popcount(w);
  return c;
}

struct BitsHash {
  std::size_t operator()(const Bits& b) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto w : b) {
      h ^= w;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Maximal computable subset per type: every interior node whose predecessors
// are all done. Map order is enum order.
std::map<NodeType, std::vector<int>> computable_by_type(const Analysis& a, const Bits& done) {
  std::map<NodeType, std::vector<int>> out;
  for (int j = 0; j < a.interior_count; ++j) {
    if (test_bit(done, j)) continue;
    bool ready = true;
    for (int p : a.preds[j]) {
      if (!test_bit(done, p)) {
        ready = false;
        break;
      }
    }
    if (ready) out[a.types[a.interior_rows[j]]].push_back(a.interior_rows[j]);
  }
  return out;
}

// Candidate iteration order for the search strategies: by letter code, so the
// returned strings are stable across runs and graphs.
std::vector<std::pair<NodeType, std::vector<int>>> computable_by_letter(const Analysis& a,
                                                                        const Bits& done) {
  auto by_type = computable_by_type(a, done);
  std::vector<std::pair<NodeType, std::vector<int>>> out(by_type.begin(), by_type.end());
  std::sort(out.begin(), out.end(),
            [](const auto& x, const auto& y) { return type_code(x.first) < type_code(y.first); });
  return out;
}

void apply_subset(const Analysis& a, Bits& done, const std::vector<int>& rows) {
  for (int r : rows) set_bit(done, a.interior_index[r]);
}

Schedule assemble(const Analysis& a,
                  const std::vector<std::pair<NodeType, std::vector<int>>>& interior_steps) {
  Schedule s;
  s.type_string.push_back(NodeType::In);
  s.subsets.push_back(a.in_rows);
  for (const auto& [t, rows] : interior_steps) {
    s.type_string.push_back(t);
    s.subsets.push_back(rows);
  }
  if (!a.out_rows.empty()) {
    s.type_string.push_back(NodeType::Out);
    s.subsets.push_back(a.out_rows);
  }
  return s;
}

std::vector<std::pair<NodeType, std::vector<int>>> replay(const Analysis& a,
                                                          const std::vector<NodeType>& steps) {
  Bits done = make_bits(a.interior_count);
  std::vector<std::pair<NodeType, std::vector<int>>> out;
  int remaining = a.interior_count;
  for (NodeType t : steps) {
    if (t == NodeType::In || t == NodeType::Out) {
      fail("type string steps must be interior types");
    }
    auto by_type = computable_by_type(a, done);
    auto it = by_type.find(t);
    if (it == by_type.end()) {
      fail(std::string("type string step '") + type_code(t) + "' has no computable node");
    }
    apply_subset(a, done, it->second);
    remaining -= static_cast<int>(it->second.size());
    out.emplace_back(t, std::move(it->second));
  }
  if (remaining != 0) fail("type string leaves interior nodes unprocessed");
  return out;
}

std::vector<std::pair<NodeType, std::vector<int>>> greedy_steps(const Analysis& a) {
  Bits done = make_bits(a.interior_count);
  std::vector<std::pair<NodeType, std::vector<int>>> steps;
  int remaining = a.interior_count;
  while (remaining > 0) {
    auto by_type = computable_by_type(a, done);
    // Largest computable subset; ties go to the lowest enum index, which is
    // the map's iteration order.
    const std::vector<int>* best = nullptr;
    NodeType best_type = NodeType::Mix;
    for (const auto& [t, rows] : by_type) {
      if (!best || rows.size() > best->size()) {
        best = &rows;
        best_type = t;
      }
    }
    apply_subset(a, done, *best);
    remaining -= static_cast<int>(best->size());
    steps.emplace_back(best_type, *best);
  }
  return steps;
}

std::vector<std::pair<NodeType, std::vector<int>>> one_by_one_steps(const Analysis& a) {
  std::vector<int> indegree(a.interior_count, 0);
  for (int j = 0; j < a.interior_count; ++j) indegree[j] = static_cast<int>(a.preds[j].size());
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int j = 0; j < a.interior_count; ++j) {
    if (indegree[j] == 0) ready.push(a.interior_rows[j]);
  }
  std::vector<std::pair<NodeType, std::vector<int>>> steps;
  while (!ready.empty()) {
    int row = ready.top();
    ready.pop();
    steps.emplace_back(a.types[row], std::vector<int>{row});
    for (int w : a.succs[a.interior_index[row]]) {
      if (--indegree[w] == 0) ready.push(a.interior_rows[w]);
    }
  }
  return steps;
}

bool lex_less(const std::vector<NodeType>& x, const std::vector<NodeType>& y) {
  return std::lexicographical_compare(
      x.begin(), x.end(), y.begin(), y.end(),
      [](NodeType p, NodeType q) { return type_code(p) < type_code(q); });
}

std::vector<NodeType> beam_steps(const Analysis& a, int width) {
  if (width < 1) fail("beam width must be >= 1");
  if (a.interior_count == 0) return {};

  struct Cand {
    Bits done;
    std::vector<NodeType> types;
    int count = 0;
  };
  std::vector<Cand> beam{Cand{make_bits(a.interior_count), {}, 0}};

  for (int iter = 0; iter < a.interior_count; ++iter) {
    std::vector<Cand> expanded;
    for (const Cand& c : beam) {
      for (const auto& [t, rows] : computable_by_letter(a, c.done)) {
        Cand nc;
        nc.done = c.done;
        apply_subset(a, nc.done, rows);
        nc.types = c.types;
        nc.types.push_back(t);
        nc.count = c.count + static_cast<int>(rows.size());
        expanded.push_back(std::move(nc));
      }
    }
    // Candidates covering the same node set are interchangeable; keep one.
    std::unordered_map<Bits, std::size_t, BitsHash> seen;
    std::vector<Cand> unique;
    for (auto& c : expanded) {
      auto [it, inserted] = seen.emplace(c.done, unique.size());
      if (inserted) {
        unique.push_back(std::move(c));
      } else if (lex_less(c.types, unique[it->second].types)) {
        unique[it->second] = std::move(c);
      }
    }
    std::sort(unique.begin(), unique.end(), [](const Cand& x, const Cand& y) {
      if (x.count != y.count) return x.count > y.count;
      if (x.types.size() != y.types.size()) return x.types.size() < y.types.size();
      return lex_less(x.types, y.types);
    });
    if (static_cast<int>(unique.size()) > width) unique.resize(static_cast<std::size_t>(width));
    beam = std::move(unique);
    if (beam.front().count == a.interior_count) return beam.front().types;
  }
  fail("beam search failed to cover the graph");  // unreachable on a DAG
}

std::vector<NodeType> optimal_steps(const Analysis& a, int node_cap) {
  if (a.num_nodes > node_cap) {
    std::ostringstream os;
    os << "optimal scheduling is capped at " << node_cap << " nodes (graph has " << a.num_nodes
       << "); use the beam strategy or raise the cap";
    fail(os.str());
  }
  if (a.interior_count == 0) return {};

  std::vector<Bits> states{make_bits(a.interior_count)};
  std::vector<std::pair<int, NodeType>> parent{{-1, NodeType::In}};
  std::unordered_map<Bits, int, BitsHash> index{{states[0], 0}};
  std::deque<int> queue{0};

  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    Bits done = states[s];
    for (const auto& [t, rows] : computable_by_letter(a, done)) {
      Bits next = done;
      apply_subset(a, next, rows);
      if (index.count(next)) continue;
      int id = static_cast<int>(states.size());
      index.emplace(next, id);
      states.push_back(next);
      parent.emplace_back(s, t);
      if (popcount(states[id]) == a.interior_count) {
        std::vector<NodeType> steps;
        for (int cur = id; parent[cur].first >= 0; cur = parent[cur].first) {
          steps.push_back(parent[cur].second);
        }
        std::reverse(steps.begin(), steps.end());
        return steps;
      }
      queue.push_back(id);
    }
  }
  fail("optimal search failed to cover the graph");  // unreachable on a DAG
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::OneByOne: return "one-by-one";
    case Strategy::Greedy: return "greedy";
    case Strategy::Beam: return "beam";
    case Strategy::Optimal: return "optimal";
  }
  return "?";
}

std::optional<Strategy> strategy_from_name(std::string_view name) {
  if (name == "one-by-one" || name == "one_by_one") return Strategy::OneByOne;
  if (name == "greedy") return Strategy::Greedy;
  if (name == "beam") return Strategy::Beam;
  if (name == "optimal") return Strategy::Optimal;
  return std::nullopt;
}

std::string Schedule::type_codes() const {
  std::string s;
  s.reserve(type_string.size());
  for (NodeType t : type_string) s.push_back(type_code(t));
  return s;
}

Schedule make_schedule(const FlatGraph& fg, const ScheduleOptions& options) {
  Analysis a = analyze(fg);
  switch (options.strategy) {
    case Strategy::OneByOne:
      return assemble(a, one_by_one_steps(a));
    case Strategy::Greedy:
      return assemble(a, greedy_steps(a));
    case Strategy::Beam:
      return assemble(a, replay(a, beam_steps(a, options.beam_width)));
    case Strategy::Optimal:
      return assemble(a, replay(a, optimal_steps(a, options.optimal_node_cap)));
  }
  fail("unknown strategy");
}

Schedule make_schedule(const FlatGraph& fg, Strategy strategy) {
  ScheduleOptions options;
  options.strategy = strategy;
  return make_schedule(fg, options);
}

Schedule schedule_from_type_string(const FlatGraph& fg, const std::vector<NodeType>& steps) {
  Analysis a = analyze(fg);
  return assemble(a, replay(a, steps));
}

void validate_schedule(const FlatGraph& fg, const Schedule& s) {
  const int n = fg.num_nodes();
  if (s.subsets.size() != s.type_string.size() || s.subsets.empty()) {
    fail("schedule: type string and subsets disagree");
  }
  if (s.type_string[0] != NodeType::In) fail("schedule: type string must start with in");

  std::vector<int> step_of(n, -1);
  for (std::size_t k = 0; k < s.subsets.size(); ++k) {
    if (k > 0 && s.subsets[k].empty()) {
      fail("schedule: empty subset at step " + std::to_string(k));
    }
    for (int r : s.subsets[k]) {
      if (r < 0 || r >= n) fail("schedule: partition violated: unknown node " + std::to_string(r));
      if (step_of[r] >= 0) {
        fail("schedule: partition violated: node " + std::to_string(r) + " appears twice");
      }
      step_of[r] = static_cast<int>(k);
      if (fg.node_types[r] != s.type_string[k]) {
        std::ostringstream os;
        os << "schedule: homogeneity violated: node " << r << " of type "
           << type_name(fg.node_types[r]) << " in a " << type_name(s.type_string[k]) << " step "
           << k;
        fail(os.str());
      }
    }
  }
  for (int r = 0; r < n; ++r) {
    if (step_of[r] < 0) fail("schedule: partition violated: node " + std::to_string(r) + " missing");
    if (fg.node_types[r] == NodeType::In && step_of[r] != 0) {
      fail("schedule: in node " + std::to_string(r) + " must be in V_0");
    }
    if (fg.node_types[r] == NodeType::Out && step_of[r] != static_cast<int>(s.subsets.size()) - 1) {
      fail("schedule: out node " + std::to_string(r) + " must be in the final subset");
    }
  }
  for (const Edge& e : fg.edges) {
    if (step_of[e.src] >= step_of[e.dst]) {
      std::ostringstream os;
      os << "schedule: causality violated: edge " << e.src << "->" << e.dst << " goes from step "
         << step_of[e.src] << " to step " << step_of[e.dst];
      fail(os.str());
    }
  }
}

std::vector<int> optimize_node_order(const FlatGraph& fg, const Schedule& s) {
  const int n = fg.num_nodes();
  std::vector<int> step_of(n, -1);
  for (std::size_t k = 0; k < s.subsets.size(); ++k) {
    for (int r : s.subsets[k]) step_of[r] = static_cast<int>(k);
  }
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) {
    if (step_of[r] < 0) fail("optimize_node_order: schedule does not cover node " + std::to_string(r));
    order[static_cast<std::size_t>(r)] = r;
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return step_of[x] < step_of[y]; });
  std::vector<int> sigma(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) sigma[static_cast<std::size_t>(order[j])] = j;
  return sigma;
}

std::vector<int> inverse_permutation(const std::vector<int>& sigma) {
  std::vector<int> inv(sigma.size());
  for (std::size_t i = 0; i < sigma.size(); ++i) inv[static_cast<std::size_t>(sigma[i])] = static_cast<int>(i);
  return inv;
}

FlatGraph reorder_flat(const FlatGraph& fg, const std::vector<int>& sigma) {
  const int n = fg.num_nodes();
  FlatGraph out;
  out.node_types.resize(static_cast<std::size_t>(n));
  for (int r = 0; r < n; ++r) out.node_types[static_cast<std::size_t>(sigma[r])] = fg.node_types[r];
  out.edges.reserve(fg.edges.size());
  for (const Edge& e : fg.edges) {
    out.edges.push_back(Edge{sigma[e.src], sigma[e.dst], e.outlet, e.inlet});
  }
  out.num_inputs = fg.num_inputs;
  out.num_outputs = fg.num_outputs;

  // Parameter rows follow their nodes: row l of P[t] belongs to the l-th
  // occurrence of t, in both the old and the new node order.
  std::vector<int> inv = inverse_permutation(sigma);
  std::vector<int> occ_of_row(static_cast<std::size_t>(n), -1);
  std::map<NodeType, int> counters;
  for (int r = 0; r < n; ++r) occ_of_row[static_cast<std::size_t>(r)] = counters[fg.node_types[r]]++;
  for (const auto& [t, table] : fg.params.tables) {
    ParamMatrix m(table.rows, table.cols);
    int new_occ = 0;
    for (int j = 0; j < n; ++j) {
      int old_row = inv[static_cast<std::size_t>(j)];
      if (fg.node_types[old_row] != t) continue;
      auto src = table.row(occ_of_row[static_cast<std::size_t>(old_row)]);
      std::copy(src.begin(), src.end(), m.row(new_occ).begin());
      ++new_occ;
    }
    out.params.tables.emplace(t, std::move(m));
  }
  return out;
}

ParamStore RenderData::reorder_params(const ParamStore& original) const {
  ParamStore out;
  for (const auto& [t, source_rows] : param_source_rows) {
    auto it = original.tables.find(t);
    if (it == original.tables.end() || it->second.rows != static_cast<int>(source_rows.size()) ||
        it->second.cols != param_width(t)) {
      fail(std::string("reorder_params: missing or misshaped table for ") +
           std::string(type_name(t)));
    }
    ParamMatrix m(it->second.rows, it->second.cols);
    for (std::size_t j = 0; j < source_rows.size(); ++j) {
      auto src = it->second.row(source_rows[j]);
      std::copy(src.begin(), src.end(), m.row(static_cast<int>(j)).begin());
    }
    out.tables.emplace(t, std::move(m));
  }
  return out;
}

RenderData compute_render_data(const FlatGraph& fg, const ScheduleOptions& options) {
  RenderData rd;
  rd.schedule = make_schedule(fg, options);
  rd.sigma = optimize_node_order(fg, rd.schedule);
  rd.flat = reorder_flat(fg, rd.sigma);
  rd.num_inputs = fg.num_inputs;
  rd.buffer_rows = fg.num_nodes();
  rd.output_begin = fg.num_nodes() - fg.num_outputs;

  // Occurrence index per reordered row; sigma makes these consecutive within
  // each step, so parameter reads become slices.
  const int n = fg.num_nodes();
  std::vector<int> occ(static_cast<std::size_t>(n), 0);
  std::map<NodeType, int> counters;
  for (int j = 0; j < n; ++j) occ[static_cast<std::size_t>(j)] = counters[rd.flat.node_types[j]]++;

  std::vector<std::vector<int>> incoming(static_cast<std::size_t>(n));
  for (const Edge& e : rd.flat.edges) incoming[static_cast<std::size_t>(e.dst)].push_back(e.src);

  int row0 = static_cast<int>(rd.schedule.subsets[0].size());
  for (std::size_t k = 1; k < rd.schedule.subsets.size(); ++k) {
    StepIndex si;
    si.type = rd.schedule.type_string[k];
    int size = static_cast<int>(rd.schedule.subsets[k].size());
    si.store_begin = row0;
    si.store_end = row0 + size;
    if (param_width(si.type) > 0) {
      si.param_begin = occ[static_cast<std::size_t>(row0)];
      si.param_end = si.param_begin + size;
    }
    for (int slot = 0; slot < size; ++slot) {
      for (int src : incoming[static_cast<std::size_t>(row0 + slot)]) {
        si.gather.push_back(src);
        si.aggregate.push_back(slot);
      }
    }
    rd.steps.push_back(std::move(si));
    row0 += size;
  }

  // Map from reordered parameter rows back to rows of a store aligned with
  // the original node order.
  std::vector<int> inv = inverse_permutation(rd.sigma);
  std::vector<int> old_occ(static_cast<std::size_t>(n), 0);
  std::map<NodeType, int> old_counters;
  for (int r = 0; r < n; ++r) old_occ[static_cast<std::size_t>(r)] = old_counters[fg.node_types[r]]++;
  for (int j = 0; j < n; ++j) {
    NodeType t = rd.flat.node_types[static_cast<std::size_t>(j)];
    if (param_width(t) == 0) continue;
    rd.param_source_rows[t].push_back(old_occ[static_cast<std::size_t>(inv[static_cast<std::size_t>(j)])]);
  }
  return rd;
}

}  // namespace mixgraph
