#include "mixgraph/render.hpp"

#include <cstring>
#include <stdexcept>

namespace mixgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

RenderResult render(const RenderData& rd, const ProcessorSet& processors,
                    const ParamStore& params, const std::vector<AudioBuffer>& sources,
                    const RenderOptions& options) {
  if (static_cast<int>(sources.size()) != rd.num_inputs) {
    fail("render: expected " + std::to_string(rd.num_inputs) + " sources, got " +
         std::to_string(sources.size()));
  }
  if (sources.empty()) fail("render: graph has no input nodes to take signal shape from");
  const int batch = sources[0].batch;
  const long length = sources[0].length;
  const double sample_rate = sources[0].sample_rate;
  for (const AudioBuffer& s : sources) {
    if (s.channels != 2) fail("render: sources must be stereo");
    if (s.batch != batch || s.length != length || s.sample_rate != sample_rate) {
      fail("render: sources must share batch, length and sample rate");
    }
  }

  const long stride = static_cast<long>(batch) * 2 * length;
  std::vector<double> buffer(static_cast<std::size_t>(rd.buffer_rows) * stride, 0.0);
  for (int k = 0; k < rd.num_inputs; ++k) {
    std::memcpy(buffer.data() + static_cast<std::size_t>(k) * stride, sources[static_cast<std::size_t>(k)].samples.data(),
                sizeof(double) * static_cast<std::size_t>(stride));
  }

  std::vector<double> step_in, step_out;
  for (const StepIndex& step : rd.steps) {
    const int slots = step.store_end - step.store_begin;
    step_in.assign(static_cast<std::size_t>(slots) * stride, 0.0);
    step_out.assign(static_cast<std::size_t>(slots) * stride, 0.0);
    for (std::size_t i = 0; i < step.gather.size(); ++i) {
      const double* src = buffer.data() + static_cast<std::size_t>(step.gather[i]) * stride;
      double* dst = step_in.data() + static_cast<std::size_t>(step.aggregate[i]) * stride;
      for (long j = 0; j < stride; ++j) dst[j] += src[j];
    }
    const ParamMatrix* table = nullptr;
    if (param_width(step.type) > 0) {
      auto it = params.tables.find(step.type);
      if (it == params.tables.end()) {
        fail(std::string("render: missing parameter table for ") + std::string(type_name(step.type)));
      }
      table = &it->second;
    }
    processors.process(step.type, step_in.data(), step_out.data(), slots, batch, length, table,
                       step.param_begin);
    std::memcpy(buffer.data() + static_cast<std::size_t>(step.store_begin) * stride, step_out.data(),
                sizeof(double) * static_cast<std::size_t>(slots) * stride);
  }

  RenderResult result;
  for (int row = rd.output_begin; row < rd.buffer_rows; ++row) {
    AudioBuffer out(batch, 2, length, sample_rate);
    std::memcpy(out.samples.data(), buffer.data() + static_cast<std::size_t>(row) * stride,
                sizeof(double) * static_cast<std::size_t>(stride));
    result.outputs.push_back(std::move(out));
  }
  if (options.keep_intermediates) {
    result.intermediates.reserve(static_cast<std::size_t>(rd.buffer_rows));
    for (int row = 0; row < rd.buffer_rows; ++row) {
      AudioBuffer tap(batch, 2, length, sample_rate);
      std::memcpy(tap.samples.data(),
                  buffer.data() + static_cast<std::size_t>(rd.sigma[static_cast<std::size_t>(row)]) * stride,
                  sizeof(double) * static_cast<std::size_t>(stride));
      result.intermediates.push_back(std::move(tap));
    }
  }
  return result;
}

RenderResult render(const RenderData& rd, const ProcessorSet& processors,
                    const std::vector<AudioBuffer>& sources, const RenderOptions& options) {
  return render(rd, processors, rd.flat.params, sources, options);
}

}  // namespace mixgraph
