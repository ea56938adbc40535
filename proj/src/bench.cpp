#include "mixgraph/bench.hpp"

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <sstream>

#include "mixgraph/console.hpp"
#include "mixgraph/dsp.hpp"
#include "mixgraph/render.hpp"

namespace mixgraph {

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

BenchReport run_bench(const BenchOptions& options) {
  BenchReport report;
  for (int tracks : options.sizes) {
    ConsoleOptions console_options;
    console_options.send_prune_probability = options.send_prune_probability;
    console_options.seed = options.seed + static_cast<std::uint32_t>(tracks);
    Graph g = generate_console(tracks, console_options);
    FlatGraph fg = to_flat(g);

    std::vector<AudioBuffer> sources;
    for (int k = 0; k < fg.num_inputs; ++k) {
      AudioBuffer s(1, 2, options.length, options.sample_rate);
      auto noise = dsp::uniform_noise(2 * options.length,
                                      options.seed + static_cast<std::uint32_t>(1000 + k));
      std::copy(noise.begin(), noise.end(), s.samples.begin());
      sources.push_back(std::move(s));
    }
    ProcessorConfig config;
    config.sample_rate = options.sample_rate;
    ProcessorSet processors(config);

    double baseline_ms = 0.0;
    std::vector<BenchRow> rows;
    for (Strategy strategy : options.strategies) {
      ScheduleOptions schedule_options;
      schedule_options.strategy = strategy;
      schedule_options.beam_width = options.beam_width;
      schedule_options.optimal_node_cap = std::max(256, fg.num_nodes());
      RenderData rd = compute_render_data(fg, schedule_options);

      std::vector<double> times;
      for (int rep = 0; rep < std::max(1, options.repeats); ++rep) {
        const auto start = std::chrono::steady_clock::now();
        RenderResult result = render(rd, processors, sources);
        const auto stop = std::chrono::steady_clock::now();
        (void)result;
        times.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
      }

      BenchRow row;
      row.strategy = strategy;
      row.tracks = tracks;
      row.nodes = fg.num_nodes();
      row.num_steps = rd.schedule.num_steps();
      row.median_ms = median(times);
      if (strategy == Strategy::OneByOne) baseline_ms = row.median_ms;
      rows.push_back(row);
    }
    for (BenchRow& row : rows) {
      row.speedup = baseline_ms > 0.0 && row.median_ms > 0.0 ? baseline_ms / row.median_ms : 1.0;
      report.rows.push_back(row);
    }
  }
  return report;
}

std::string BenchReport::table() const {
  std::ostringstream os;
  os << std::left << std::setw(12) << "strategy" << std::right << std::setw(6) << "K"
     << std::setw(8) << "nodes" << std::setw(6) << "N" << std::setw(12) << "median_ms"
     << std::setw(10) << "speedup" << "\n";
  for (const BenchRow& r : rows) {
    os << std::left << std::setw(12) << strategy_name(r.strategy) << std::right << std::setw(6)
       << r.tracks << std::setw(8) << r.nodes << std::setw(6) << r.num_steps << std::setw(12)
       << std::fixed << std::setprecision(2) << r.median_ms << std::setw(10)
       << std::setprecision(2) << r.speedup << "\n";
  }
  return os.str();
}

std::string BenchReport::csv() const {
  std::ostringstream os;
  os << "strategy,K,nodes,N,median_ms,speedup\n";
  for (const BenchRow& r : rows) {
    os << strategy_name(r.strategy) << "," << r.tracks << "," << r.nodes << "," << r.num_steps
       << "," << r.median_ms << "," << r.speedup << "\n";
  }
  return os.str();
}

}  // namespace mixgraph
