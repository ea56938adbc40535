#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mixgraph/audio_buffer.hpp"
#include "mixgraph/dsp.hpp"
#include "mixgraph/graph.hpp"
#include "mixgraph/types.hpp"

namespace mixgraph {

struct ProcessorConfig {
  double sample_rate = 44100.0;
  std::uint32_t reverb_seed = 0;
  // The dynamics envelope one-pole is realized as an FIR truncated to this
  // many taps; with alpha <= 0.9995 the dropped tail is below 1e-7.
  int envelope_taps = 32768;
  // Floor applied to the energy envelope before the log.
  double energy_floor = 1e-7;
};

// The batched processors. Stateless apart from the cached reverb noise,
// which is fixed at construction; safe to share across threads.
class ProcessorSet {
 public:
  explicit ProcessorSet(const ProcessorConfig& config = {});

  const ProcessorConfig& config() const { return config_; }
  long delay_span() const { return delay_span_; }      // 2 s in samples
  int delay_window() const { return delay_window_; }   // 100 ms in samples
  long reverb_length() const { return reverb_length_; }
  const std::vector<double>& reverb_noise_mid() const { return noise_mid_; }
  const std::vector<double>& reverb_noise_side() const { return noise_side_; }

  // Batched entry point used by the renderer. in/out hold `slots` node
  // signals of shape batch x 2 x length, slot-major. Parameter rows
  // [param_offset, param_offset + slots) align with the slots; pass nullptr
  // for parameterless types.
  void process(NodeType type, const double* in, double* out, int slots, int batch, long length,
               const ParamMatrix* params, int param_offset) const;

  // Single-node form of the same computation.
  AudioBuffer process_node(NodeType type, const AudioBuffer& input,
                           std::span<const double> params) const;

  // Stereo impulse response of one reverb parameter row: (left, right),
  // reverb_length() samples each.
  std::pair<std::vector<double>, std::vector<double>> reverb_kernel(
      std::span<const double> params) const;

  // Multitap FIR of one delay row for one channel, delay_span() samples.
  std::vector<double> delay_kernel(std::span<const double> params, int channel) const;
  // Integer tap delays after window clamping; disabled taps are -1.
  std::vector<long> delay_positions(std::span<const double> params, int channel) const;

 private:
  ProcessorConfig config_;
  long delay_span_ = 0;
  int delay_window_ = 0;
  long reverb_length_ = 0;
  std::vector<double> noise_mid_, noise_side_;
  dsp::Spectrogram noise_stft_mid_, noise_stft_side_;
};

// Compressed log-energy G_y for a given envelope log-energy G_u: identity
// below the knee, slope 1/R above it, quadratic interpolation inside.
double compressor_gain_log(double g_u, double threshold, double knee_half_width, double ratio);
// Noisegate counterpart: identity above the knee, slope R below it.
double noisegate_gain_log(double g_u, double threshold, double knee_half_width, double ratio);

// Throw std::invalid_argument on rows violating 0 < alpha < 1, W > 0, R >= 1
// (dynamics) or |z| > 1 (delay), or on non-finite values anywhere.
void check_param_row(NodeType type, std::span<const double> row);

}  // namespace mixgraph
