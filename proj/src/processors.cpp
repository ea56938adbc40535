#include "mixgraph/processors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <numbers>
#include <stdexcept>

namespace mixgraph {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

long stride_of(int batch, long length) { return static_cast<long>(batch) * 2 * length; }

void copy_slot(const double* in, double* out, int batch, long length) {
  std::memcpy(out, in, sizeof(double) * static_cast<std::size_t>(stride_of(batch, length)));
}

void gain_slot(const double* in, double* out, int batch, long length,
               std::span<const double> p) {
  const double scale[2] = {std::exp(p[0]), std::exp(p[1])};
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < 2; ++c) {
      const double* u = in + (static_cast<long>(b) * 2 + c) * length;
      double* y = out + (static_cast<long>(b) * 2 + c) * length;
      for (long i = 0; i < length; ++i) y[i] = scale[c] * u[i];
    }
  }
}

void imager_slot(const double* in, double* out, int batch, long length,
                 std::span<const double> p) {
  const double side_scale = std::exp(p[0]);
  for (int b = 0; b < batch; ++b) {
    const double* ul = in + static_cast<long>(b) * 2 * length;
    const double* ur = ul + length;
    double* yl = out + static_cast<long>(b) * 2 * length;
    double* yr = yl + length;
    for (long i = 0; i < length; ++i) {
      const double mid = ul[i] + ur[i];
      const double side = side_scale * (ul[i] - ur[i]);
      yl[i] = 0.5 * (mid + side);
      yr[i] = 0.5 * (mid - side);
    }
  }
}

void convolve_each_channel(const double* in, double* out, int batch, long length,
                           std::span<const double> kernel_l, std::span<const double> kernel_r,
                           dsp::ConvMode mode) {
  for (int b = 0; b < batch; ++b) {
    for (int c = 0; c < 2; ++c) {
      const double* u = in + (static_cast<long>(b) * 2 + c) * length;
      double* y = out + (static_cast<long>(b) * 2 + c) * length;
      auto kernel = c == 0 ? kernel_l : kernel_r;
      auto conv = dsp::fft_convolve({u, static_cast<std::size_t>(length)}, kernel, mode);
      std::copy(conv.begin(), conv.end(), y);
    }
  }
}

void eq_slot(const double* in, double* out, int batch, long length, std::span<const double> p) {
  dsp::ZeroPhaseFir fir = dsp::zero_phase_fir(p, kEqFirLength);
  convolve_each_channel(in, out, batch, length, fir.taps, fir.taps, dsp::ConvMode::ZeroPhase);
}

// Shared dynamics core: smoothed mid-channel energy envelope in natural log.
template <typename GainFn>
void dynamics_slot(const double* in, double* out, int batch, long length,
                   std::span<const double> p, const ProcessorConfig& config, GainFn&& gain_log) {
  const double alpha = p[0];
  const double threshold = p[1];
  const double knee = p[2];
  const double ratio = p[3];

  const long env_len = std::min<long>(config.envelope_taps, length);
  std::vector<double> envelope_fir(static_cast<std::size_t>(env_len));
  double pow_alpha = 1.0 - alpha;
  for (long k = 0; k < env_len; ++k) {
    envelope_fir[static_cast<std::size_t>(k)] = pow_alpha;
    pow_alpha *= alpha;
  }

  std::vector<double> energy(static_cast<std::size_t>(length));
  for (int b = 0; b < batch; ++b) {
    const double* ul = in + static_cast<long>(b) * 2 * length;
    const double* ur = ul + length;
    double* yl = out + static_cast<long>(b) * 2 * length;
    double* yr = yl + length;
    for (long i = 0; i < length; ++i) {
      const double mid = ul[i] + ur[i];
      energy[static_cast<std::size_t>(i)] = mid * mid;
    }
    auto smoothed = dsp::fft_convolve(energy, envelope_fir, dsp::ConvMode::Causal);
    for (long i = 0; i < length; ++i) {
      const double g_u = std::log(std::max(smoothed[static_cast<std::size_t>(i)], config.energy_floor));
      const double g_y = gain_log(g_u, threshold, knee, ratio);
      const double gain = std::exp(g_y - g_u);
      yl[i] = gain * ul[i];
      yr[i] = gain * ur[i];
    }
  }
}

}  // namespace

double compressor_gain_log(double g_u, double threshold, double knee_half_width, double ratio) {
  if (g_u >= threshold + knee_half_width) {
    return threshold + (g_u - threshold) / ratio;
  }
  if (g_u < threshold - knee_half_width) {
    return g_u;
  }
  const double d = g_u - threshold + knee_half_width;
  return g_u + (1.0 / ratio - 1.0) * d * d / (4.0 * knee_half_width);
}

double noisegate_gain_log(double g_u, double threshold, double knee_half_width, double ratio) {
  if (g_u >= threshold + knee_half_width) {
    return g_u;
  }
  if (g_u < threshold - knee_half_width) {
    return threshold + ratio * (g_u - threshold);
  }
  const double d = g_u - threshold - knee_half_width;
  return g_u + (1.0 - ratio) * d * d / (4.0 * knee_half_width);
}

void check_param_row(NodeType type, std::span<const double> row) {
  for (double v : row) {
    if (!std::isfinite(v)) fail(std::string(type_name(type)) + ": non-finite parameter value");
  }
  if (type == NodeType::Compressor || type == NodeType::Noisegate) {
    if (!(row[0] > 0.0 && row[0] < 1.0)) fail(std::string(type_name(type)) + ": alpha must be in (0, 1)");
    if (!(row[2] > 0.0)) fail(std::string(type_name(type)) + ": knee half-width must be positive");
    if (!(row[3] >= 1.0)) fail(std::string(type_name(type)) + ": ratio must be >= 1");
  } else if (type == NodeType::Delay) {
    for (int tap = 0; tap < 2 * kDelayTapsPerChannel; ++tap) {
      const double re = row[static_cast<std::size_t>(tap) * kDelayTapStride];
      const double im = row[static_cast<std::size_t>(tap) * kDelayTapStride + 1];
      if (std::hypot(re, im) > 1.0 + 1e-9) {
        fail("delay: angular frequency outside the unit disk");
      }
    }
  }
}

ProcessorSet::ProcessorSet(const ProcessorConfig& config) : config_(config) {
  if (!(config_.sample_rate > 0)) fail("sample rate must be positive");
  delay_span_ = std::lround(kDelaySeconds * config_.sample_rate);
  delay_window_ = static_cast<int>(std::lround(kDelayWindowSeconds * config_.sample_rate));
  reverb_length_ = std::lround(kReverbSeconds * config_.sample_rate);
  noise_mid_ = dsp::uniform_noise(reverb_length_, config_.reverb_seed);
  noise_side_ = dsp::uniform_noise(reverb_length_, config_.reverb_seed + 1);
  noise_stft_mid_ = dsp::stft(noise_mid_, kReverbStftLength, kReverbStftHop);
  noise_stft_side_ = dsp::stft(noise_side_, kReverbStftLength, kReverbStftHop);
}

std::pair<std::vector<double>, std::vector<double>> ProcessorSet::reverb_kernel(
    std::span<const double> params) const {
  auto masked = [&](const dsp::Spectrogram& noise, int which) {
    std::span<const double> color = params.subspan(static_cast<std::size_t>(which) * 2 * kReverbNumBins, kReverbNumBins);
    std::span<const double> decay =
        params.subspan(static_cast<std::size_t>(which) * 2 * kReverbNumBins + kReverbNumBins, kReverbNumBins);
    dsp::Spectrogram spec = noise;
    for (int m = 0; m < spec.num_frames; ++m) {
      for (int k = 0; k < spec.num_bins; ++k) {
        // 193 one-sided bins but 192 parameters; the Nyquist bin reuses the
        // top parameterized bin.
        const int bin = std::min(k, kReverbNumBins - 1);
        spec.at(m, k) *= std::exp(color[static_cast<std::size_t>(bin)] + m * decay[static_cast<std::size_t>(bin)]);
      }
    }
    return dsp::istft(spec, reverb_length_);
  };
  std::vector<double> mid = masked(noise_stft_mid_, 0);
  std::vector<double> side = masked(noise_stft_side_, 1);
  std::vector<double> left(mid.size()), right(mid.size());
  for (std::size_t i = 0; i < mid.size(); ++i) {
    left[i] = 0.5 * (mid[i] + side[i]);
    right[i] = 0.5 * (mid[i] - side[i]);
  }
  return {std::move(left), std::move(right)};
}

std::vector<long> ProcessorSet::delay_positions(std::span<const double> params, int channel) const {
  std::vector<long> positions(kDelayTapsPerChannel, -1);
  for (int m = 0; m < kDelayTapsPerChannel; ++m) {
    const std::size_t base =
        static_cast<std::size_t>(channel * kDelayTapsPerChannel + m) * kDelayTapStride;
    std::span<const double> mags = params.subspan(base + 2, kDelayFirBins);
    if (std::ranges::max(mags) <= kDelayDisabledLogMag) continue;
    const std::complex<double> z{params[base], params[base + 1]};
    // Delay encoded in the angle; snap to the grid, then clamp into the tap's
    // 100 ms window.
    double frac = -std::arg(z) / (2.0 * std::numbers::pi);
    long d = std::lround(frac * static_cast<double>(delay_span_));
    d %= delay_span_;
    if (d < 0) d += delay_span_;
    const long lo = static_cast<long>(m) * delay_window_;
    const long hi = std::min(static_cast<long>(m + 1) * delay_window_, delay_span_) - 1;
    positions[static_cast<std::size_t>(m)] = std::clamp(d, lo, hi);
  }
  return positions;
}

std::vector<double> ProcessorSet::delay_kernel(std::span<const double> params, int channel) const {
  std::vector<double> kernel(static_cast<std::size_t>(delay_span_), 0.0);
  const std::vector<long> positions = delay_positions(params, channel);
  for (int m = 0; m < kDelayTapsPerChannel; ++m) {
    const long d = positions[static_cast<std::size_t>(m)];
    if (d < 0) continue;
    const std::size_t base =
        static_cast<std::size_t>(channel * kDelayTapsPerChannel + m) * kDelayTapStride;
    dsp::ZeroPhaseFir fir = dsp::zero_phase_fir(params.subspan(base + 2, kDelayFirBins), kDelayFirLength);
    const int half = fir.half();
    for (int j = -half; j <= half; ++j) {
      const long idx = d + j;
      if (idx < 0 || idx >= delay_span_) continue;
      kernel[static_cast<std::size_t>(idx)] += fir.taps[static_cast<std::size_t>(half + j)];
    }
  }
  return kernel;
}

void ProcessorSet::process(NodeType type, const double* in, double* out, int slots, int batch,
                           long length, const ParamMatrix* params, int param_offset) const {
  const long stride = stride_of(batch, length);
  const int width = param_width(type);
  if (width > 0) {
    if (params == nullptr) fail(std::string(type_name(type)) + ": missing parameters");
    if (params->cols != width) fail(std::string(type_name(type)) + ": parameter row width mismatch");
    if (param_offset < 0 || param_offset + slots > params->rows) {
      fail(std::string(type_name(type)) + ": parameter rows out of range");
    }
  }
  for (int slot = 0; slot < slots; ++slot) {
    const double* u = in + static_cast<long>(slot) * stride;
    double* y = out + static_cast<long>(slot) * stride;
    std::span<const double> row;
    if (width > 0) {
      row = params->row(param_offset + slot);
      check_param_row(type, row);
    }
    switch (type) {
      case NodeType::In:
      case NodeType::Out:
      case NodeType::Mix:
        copy_slot(u, y, batch, length);
        break;
      case NodeType::Gain:
        gain_slot(u, y, batch, length, row);
        break;
      case NodeType::Imager:
        imager_slot(u, y, batch, length, row);
        break;
      case NodeType::Eq:
        eq_slot(u, y, batch, length, row);
        break;
      case NodeType::Compressor:
        dynamics_slot(u, y, batch, length, row, config_, compressor_gain_log);
        break;
      case NodeType::Noisegate:
        dynamics_slot(u, y, batch, length, row, config_, noisegate_gain_log);
        break;
      case NodeType::Reverb: {
        auto [left, right] = reverb_kernel(row);
        convolve_each_channel(u, y, batch, length, left, right, dsp::ConvMode::Causal);
        break;
      }
      case NodeType::Delay: {
        std::vector<double> left = delay_kernel(row, 0);
        std::vector<double> right = delay_kernel(row, 1);
        convolve_each_channel(u, y, batch, length, left, right, dsp::ConvMode::Causal);
        break;
      }
    }
  }
}

AudioBuffer ProcessorSet::process_node(NodeType type, const AudioBuffer& input,
                                       std::span<const double> params) const {
  if (input.channels != 2) fail("process_node: processors are stereo (2 channels)");
  const int width = param_width(type);
  if (static_cast<int>(params.size()) != width) {
    fail(std::string(type_name(type)) + ": expected " + std::to_string(width) + " parameters");
  }
  AudioBuffer out(input.batch, 2, input.length, input.sample_rate);
  ParamMatrix table(width > 0 ? 1 : 0, width);
  if (width > 0) std::copy(params.begin(), params.end(), table.row(0).begin());
  process(type, input.samples.data(), out.samples.data(), 1, input.batch, input.length,
          width > 0 ? &table : nullptr, 0);
  return out;
}

}  // namespace mixgraph
