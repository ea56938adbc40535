#include <doctest.h>

#include <algorithm>
#include <random>

#include "mixgraph/console.hpp"
#include "mixgraph/schedule.hpp"
#include "support/test_util.hpp"

using namespace mixgraph;

namespace {

const std::vector<Strategy> kAllStrategies{Strategy::OneByOne, Strategy::Greedy, Strategy::Beam,
                                           Strategy::Optimal};

FlatGraph chain_graph() {
  Graph g;
  g.add_serial_chain({NodeType::In, NodeType::Gain, NodeType::Out});
  return to_flat(g);
}

FlatGraph parallel_eq_graph() {
  Graph g;
  int in1 = g.add_node(NodeType::In);
  int in2 = g.add_node(NodeType::In);
  int eq1 = g.add_node(NodeType::Eq);
  int eq2 = g.add_node(NodeType::Eq);
  int mix = g.add_node(NodeType::Mix);
  int out = g.add_node(NodeType::Out);
  g.connect(in1, eq1);
  g.connect(in2, eq2);
  g.connect(eq1, mix);
  g.connect(eq2, mix);
  g.connect(mix, out);
  return to_flat(g);
}

}  // namespace

TEST_CASE("forced chain schedules identically under every strategy") {
  FlatGraph fg = chain_graph();
  for (Strategy strategy : kAllStrategies) {
    Schedule s = make_schedule(fg, strategy);
    CHECK(s.num_steps() == 2);
    CHECK(s.type_codes() == "igo");
    CHECK(s.subsets == std::vector<std::vector<int>>{{0}, {1}, {2}});
    CHECK_NOTHROW(validate_schedule(fg, s));
  }
}

TEST_CASE("parallel equalizers batch into one step") {
  FlatGraph fg = parallel_eq_graph();
  CHECK(make_schedule(fg, Strategy::Optimal).num_steps() == 3);
  CHECK(make_schedule(fg, Strategy::Greedy).num_steps() == 3);
  CHECK(make_schedule(fg, Strategy::Optimal).type_codes() == "iemo");
  CHECK(make_schedule(fg, Strategy::OneByOne).num_steps() == 4);
}

TEST_CASE("four-track mix snippet has the forced optimal string") {
  FlatGraph fg = to_flat(testutil::four_track_mix_snippet());
  REQUIRE(fg.num_nodes() == 21);
  Schedule s = make_schedule(fg, Strategy::Optimal);
  CHECK(s.num_steps() == 9);
  CHECK(s.type_codes() == "iecgmregro");
  CHECK(testutil::exhaustive_min_schedule_steps(fg) == 9);
}

TEST_CASE("schedules from every strategy validate on random graphs") {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    FlatGraph fg = to_flat(testutil::random_dag(rng, 5, 40));
    for (Strategy strategy : kAllStrategies) {
      Schedule s = make_schedule(fg, strategy);
      CHECK_NOTHROW(validate_schedule(fg, s));
      int covered = 0;
      for (const auto& subset : s.subsets) covered += static_cast<int>(subset.size());
      CHECK(covered == fg.num_nodes());
    }
  }
}

TEST_CASE("validate_schedule names the violated condition") {
  FlatGraph fg = chain_graph();
  Schedule s = make_schedule(fg, Strategy::Greedy);

  Schedule reversed = s;
  std::swap(reversed.subsets[1], reversed.subsets[2]);
  CHECK_THROWS_WITH_AS(validate_schedule(fg, reversed), doctest::Contains("homogeneity"),
                       std::invalid_argument);

  Graph g2;
  g2.add_serial_chain({NodeType::In, NodeType::Eq, NodeType::Gain, NodeType::Out});
  FlatGraph fg2 = to_flat(g2);
  Schedule bad;
  bad.type_string = {NodeType::In, NodeType::Gain, NodeType::Eq, NodeType::Out};
  bad.subsets = {{0}, {2}, {1}, {3}};  // gain before its eq predecessor
  CHECK_THROWS_WITH_AS(validate_schedule(fg2, bad), doctest::Contains("causality"),
                       std::invalid_argument);

  Schedule mixed;
  mixed.type_string = {NodeType::In, NodeType::Eq, NodeType::Out};
  mixed.subsets = {{0}, {1, 2}, {3}};  // eq and gain in one subset
  CHECK_THROWS_WITH_AS(validate_schedule(fg2, mixed), doctest::Contains("homogeneity"),
                       std::invalid_argument);

  Schedule missing;
  missing.type_string = {NodeType::In, NodeType::Eq, NodeType::Gain, NodeType::Out};
  missing.subsets = {{0}, {1}, {2}, {}};
  missing.subsets[3] = {};
  CHECK_THROWS_WITH_AS(validate_schedule(fg2, missing), doctest::Contains("empty"),
                       std::invalid_argument);
}

TEST_CASE("optimal matches the exhaustive oracle on small graphs") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    FlatGraph fg = to_flat(testutil::random_dag(rng, 5, 12));
    CHECK(make_schedule(fg, Strategy::Optimal).num_steps() ==
          testutil::exhaustive_min_schedule_steps(fg));
  }
}

TEST_CASE("strategy quality is ordered on every random graph") {
  std::mt19937 rng(37);
  for (int trial = 0; trial < 60; ++trial) {
    FlatGraph fg = to_flat(testutil::random_dag(rng, 5, 40));
    const int optimal = make_schedule(fg, Strategy::Optimal).num_steps();
    ScheduleOptions beam_options;
    beam_options.strategy = Strategy::Beam;
    const int beam = make_schedule(fg, beam_options).num_steps();
    const int greedy = make_schedule(fg, Strategy::Greedy).num_steps();
    const int one_by_one = make_schedule(fg, Strategy::OneByOne).num_steps();
    CHECK(optimal <= beam);
    CHECK(beam <= greedy);
    CHECK(greedy <= one_by_one);
  }
}

TEST_CASE("beam width never hurts on a fixed suite") {
  std::mt19937 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    FlatGraph fg = to_flat(testutil::random_dag(rng, 8, 32));
    const int optimal = make_schedule(fg, Strategy::Optimal).num_steps();
    int previous = 1 << 20;
    for (int width : {1, 2, 4, 8, 16, 32}) {
      ScheduleOptions options;
      options.strategy = Strategy::Beam;
      options.beam_width = width;
      const int steps = make_schedule(fg, options).num_steps();
      CHECK(steps >= optimal);
      CHECK(steps <= previous);
      previous = steps;
    }
  }
}

TEST_CASE("one_by_one emits singletons with outputs merged") {
  FlatGraph fg = to_flat(generate_console(3));
  Schedule s = make_schedule(fg, Strategy::OneByOne);
  const int expected = fg.num_nodes() - fg.num_inputs - fg.num_outputs + 1;
  CHECK(s.num_steps() == expected);
  for (int n = 1; n < s.num_steps(); ++n) CHECK(s.subsets[static_cast<std::size_t>(n)].size() == 1);
  CHECK(s.subsets.back().size() == static_cast<std::size_t>(fg.num_outputs));
}

TEST_CASE("optimal refuses graphs above the node cap") {
  Graph g;
  int in = g.add_node(NodeType::In);
  int mix = g.add_node(NodeType::Mix);
  g.connect(in, mix);
  for (int i = 0; i < 300; ++i) {
    int gain = g.add_node(NodeType::Gain);
    g.connect(mix, gain);
  }
  FlatGraph fg = to_flat(g);
  CHECK_THROWS_WITH_AS(make_schedule(fg, Strategy::Optimal), doctest::Contains("beam"),
                       std::invalid_argument);
  ScheduleOptions raised;
  raised.strategy = Strategy::Optimal;
  raised.optimal_node_cap = 512;
  CHECK_NOTHROW(make_schedule(fg, raised));
}

TEST_CASE("node reordering is the identity on step-sorted graphs") {
  FlatGraph fg = chain_graph();
  Schedule s = make_schedule(fg, Strategy::Greedy);
  CHECK(optimize_node_order(fg, s) == std::vector<int>{0, 1, 2});
}

TEST_CASE("sigma composed with its inverse is the identity") {
  std::mt19937 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    FlatGraph fg = to_flat(testutil::random_dag(rng, 5, 40));
    Schedule s = make_schedule(fg, Strategy::Greedy);
    std::vector<int> sigma = optimize_node_order(fg, s);
    std::vector<int> inv = inverse_permutation(sigma);
    for (int r = 0; r < fg.num_nodes(); ++r) CHECK(inv[static_cast<std::size_t>(sigma[static_cast<std::size_t>(r)])] == r);
  }
}

TEST_CASE("reordering preserves the graph up to relabeling") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    FlatGraph fg = to_flat(testutil::random_dag(rng, 5, 40));
    Schedule s = make_schedule(fg, Strategy::Optimal);
    std::vector<int> sigma = optimize_node_order(fg, s);
    FlatGraph reordered = reorder_flat(fg, sigma);

    for (int r = 0; r < fg.num_nodes(); ++r) {
      CHECK(reordered.node_types[static_cast<std::size_t>(sigma[static_cast<std::size_t>(r)])] ==
            fg.node_types[static_cast<std::size_t>(r)]);
    }
    REQUIRE(reordered.edges.size() == fg.edges.size());
    for (std::size_t i = 0; i < fg.edges.size(); ++i) {
      CHECK(reordered.edges[i].src == sigma[static_cast<std::size_t>(fg.edges[i].src)]);
      CHECK(reordered.edges[i].dst == sigma[static_cast<std::size_t>(fg.edges[i].dst)]);
    }
  }
}

TEST_CASE("render data for a chain uses the documented indices") {
  FlatGraph fg = chain_graph();
  RenderData rd = compute_render_data(fg);
  REQUIRE(rd.steps.size() == 2);
  CHECK(rd.steps[0].gather == std::vector<int>{0});
  CHECK(rd.steps[0].aggregate == std::vector<int>{0});
  CHECK(rd.steps[0].store_begin == 1);
  CHECK(rd.steps[0].store_end == 2);
  CHECK(rd.steps[0].param_begin == 0);
  CHECK(rd.steps[0].param_end == 1);
  CHECK(rd.steps[1].gather == std::vector<int>{1});
  CHECK(rd.steps[1].store_begin == 2);
  CHECK(rd.steps[1].store_end == 3);
  CHECK(rd.buffer_rows == 3);
}

TEST_CASE("two edges into one mix aggregate into a single slot") {
  Graph g;
  int in = g.add_node(NodeType::In);
  int mix = g.add_node(NodeType::Mix);
  int out = g.add_node(NodeType::Out);
  g.connect(in, mix);
  g.connect(in, mix);
  g.connect(mix, out);
  RenderData rd = compute_render_data(to_flat(g));
  REQUIRE(!rd.steps.empty());
  CHECK(rd.steps[0].gather == std::vector<int>{0, 0});
  CHECK(rd.steps[0].aggregate == std::vector<int>{0, 0});
}

TEST_CASE("render data ranges are contiguous and tile the buffer") {
  std::mt19937 rng(53);
  std::vector<FlatGraph> graphs;
  graphs.push_back(to_flat(generate_console(4)));
  for (int trial = 0; trial < 20; ++trial) graphs.push_back(to_flat(testutil::random_dag(rng, 5, 40)));

  for (const FlatGraph& fg : graphs) {
    for (Strategy strategy : kAllStrategies) {
      ScheduleOptions options;
      options.strategy = strategy;
      RenderData rd = compute_render_data(fg, options);
      int next_row = rd.num_inputs;
      std::map<NodeType, int> param_cursor;
      for (const StepIndex& step : rd.steps) {
        CHECK(step.store_begin == next_row);  // disjoint ranges tiling 0..rows
        CHECK(step.store_end > step.store_begin);
        next_row = step.store_end;
        if (param_width(step.type) > 0) {
          auto [it, inserted] = param_cursor.emplace(step.type, 0);
          CHECK(step.param_begin == it->second);
          CHECK(step.param_end - step.param_begin == step.store_end - step.store_begin);
          it->second = step.param_end;
        }
        for (int row : step.gather) CHECK(row < step.store_begin);  // written earlier
        for (int slot : step.aggregate) {
          CHECK(slot >= 0);
          CHECK(slot < step.store_end - step.store_begin);
        }
      }
      CHECK(next_row == rd.buffer_rows);
      for (const auto& [t, cursor] : param_cursor) {
        CHECK(cursor == rd.flat.params.table(t).rows);
      }
    }
  }
}
