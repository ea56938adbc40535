#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mixgraph/graph.hpp"

namespace mixgraph {

enum class Strategy {
  OneByOne,  // one singleton step per non-input node
  Greedy,    // largest computable type first
  Beam,      // beam search over partial type strings
  Optimal,   // BFS over processed-node frontier sets
};

std::string_view strategy_name(Strategy s);
std::optional<Strategy> strategy_from_name(std::string_view name);

// A batched processing plan: node subsets V_0..V_N with one type per subset.
// V_0 holds all inputs and is never processed; V_N holds all outputs.
struct Schedule {
  std::vector<NodeType> type_string;      // length N+1, type_string[0] == In
  std::vector<std::vector<int>> subsets;  // node rows, aligned with type_string

  int num_steps() const { return static_cast<int>(subsets.size()) - 1; }
  // Letter form, e.g. "iecgmregro".
  std::string type_codes() const;
};

struct ScheduleOptions {
  Strategy strategy = Strategy::Greedy;
  int beam_width = 32;
  // Optimal search refuses graphs above this node count.
  int optimal_node_cap = 256;
};

Schedule make_schedule(const FlatGraph& fg, const ScheduleOptions& options);
Schedule make_schedule(const FlatGraph& fg, Strategy strategy);

// Replays a type string over the graph, taking the maximal computable subset
// at each step. Throws if some step has nothing to compute or nodes remain.
Schedule schedule_from_type_string(const FlatGraph& fg, const std::vector<NodeType>& steps);

// Checks partition, causality, homogeneity and the V_0/V_N composition;
// throws std::invalid_argument naming the violated condition and a witness.
void validate_schedule(const FlatGraph& fg, const Schedule& s);

// Permutation (old row -> new row) that sorts nodes by (step, original row),
// making every step's buffer rows and parameter rows contiguous slices.
std::vector<int> optimize_node_order(const FlatGraph& fg, const Schedule& s);
std::vector<int> inverse_permutation(const std::vector<int>& sigma);

// Relabels nodes, edges and parameter rows with sigma (old row -> new row).
FlatGraph reorder_flat(const FlatGraph& fg, const std::vector<int>& sigma);

// Read/write indices for one processing step (n >= 1).
struct StepIndex {
  NodeType type = NodeType::Mix;
  std::vector<int> gather;     // source buffer row per incoming edge
  std::vector<int> aggregate;  // step-local destination slot per gathered row
  int param_begin = 0;         // contiguous row range into params[type]
  int param_end = 0;
  int store_begin = 0;  // contiguous row range into the intermediate buffer
  int store_end = 0;
};

// Everything the renderer needs: the schedule, the reordering, the reordered
// graph and the per-step gather/aggregate/param/store indices.
struct RenderData {
  Schedule schedule;       // in original row space
  std::vector<int> sigma;  // old row -> new row
  FlatGraph flat;          // reordered
  std::vector<StepIndex> steps;
  int buffer_rows = 0;
  int num_inputs = 0;
  int output_begin = 0;  // out-node rows [output_begin, buffer_rows)
  // Per type: original-store row feeding each reordered parameter row.
  std::map<NodeType, std::vector<int>> param_source_rows;

  // Maps parameter tables aligned with the original node order into the
  // reordered row order used by render().
  ParamStore reorder_params(const ParamStore& original) const;
};

RenderData compute_render_data(const FlatGraph& fg, const ScheduleOptions& options = {});

}  // namespace mixgraph
