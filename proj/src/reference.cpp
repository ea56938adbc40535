#include "mixgraph/reference.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <queue>
#include <stdexcept>

#include "mixgraph/dsp.hpp"

namespace mixgraph {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> direct_convolve_causal(std::span<const double> x, std::span<const double> h) {
  const long length = static_cast<long>(x.size());
  const long taps = static_cast<long>(h.size());
  std::vector<double> y(static_cast<std::size_t>(length), 0.0);
  for (long i = 0; i < length; ++i) {
    const long kmax = std::min(i, taps - 1);
    double acc = 0.0;
    for (long k = 0; k <= kmax; ++k) acc += h[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(i - k)];
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

std::vector<double> direct_convolve_zero_phase(std::span<const double> x,
                                               std::span<const double> h) {
  const long length = static_cast<long>(x.size());
  const long half = (static_cast<long>(h.size()) - 1) / 2;
  std::vector<double> y(static_cast<std::size_t>(length), 0.0);
  for (long i = 0; i < length; ++i) {
    double acc = 0.0;
    for (long j = -half; j <= half; ++j) {
      const long idx = i - j;
      if (idx < 0 || idx >= length) continue;
      acc += h[static_cast<std::size_t>(half + j)] * x[static_cast<std::size_t>(idx)];
    }
    y[static_cast<std::size_t>(i)] = acc;
  }
  return y;
}

// Frequency-sampling FIR via a direct cosine sum (real even spectrum).
std::vector<double> direct_zero_phase_fir(std::span<const double> log_mags, int fir_length) {
  const int half = (fir_length - 1) / 2;
  std::vector<double> mags(static_cast<std::size_t>(fir_length));
  for (int k = 0; k < fir_length; ++k) {
    mags[static_cast<std::size_t>(k)] = std::exp(log_mags[static_cast<std::size_t>(std::min(k, fir_length - k))]);
  }
  std::vector<double> taps(static_cast<std::size_t>(fir_length), 0.0);
  for (int n = -half; n <= half; ++n) {
    double acc = 0.0;
    for (int k = 0; k < fir_length; ++k) {
      acc += mags[static_cast<std::size_t>(k)] * std::cos(2.0 * kPi * k * n / fir_length);
    }
    double window = fir_length > 1 ? 0.5 - 0.5 * std::cos(2.0 * kPi * (half + n) / (fir_length - 1)) : 1.0;
    taps[static_cast<std::size_t>(half + n)] = window * acc / fir_length;
  }
  return taps;
}

// Reverb impulse response with per-frame direct DFTs instead of the FFT path.
std::pair<std::vector<double>, std::vector<double>> direct_reverb_kernel(
    const ProcessorSet& processors, std::span<const double> params) {
  const long length = processors.reverb_length();
  const int fft_length = kReverbStftLength;
  const int hop = kReverbStftHop;
  const int frames = static_cast<int>((length + hop - 1) / hop);

  auto build = [&](const std::vector<double>& noise, int which) {
    std::span<const double> color = params.subspan(static_cast<std::size_t>(which) * 2 * kReverbNumBins, kReverbNumBins);
    std::span<const double> decay =
        params.subspan(static_cast<std::size_t>(which) * 2 * kReverbNumBins + kReverbNumBins, kReverbNumBins);
    std::vector<double> out(static_cast<std::size_t>(length), 0.0);
    std::vector<double> cover(static_cast<std::size_t>(length), 0.0);
    std::vector<std::complex<double>> spectrum(static_cast<std::size_t>(fft_length));
    for (int m = 0; m < frames; ++m) {
      const long start = static_cast<long>(m) * hop;
      for (int k = 0; k < fft_length; ++k) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < fft_length; ++i) {
          const long idx = start + i;
          if (idx >= length) break;
          const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * i / fft_length);
          const double phase = -2.0 * kPi * k * i / fft_length;
          acc += noise[static_cast<std::size_t>(idx)] * w * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        const int bin = std::min(std::min(k, fft_length - k), kReverbNumBins - 1);
        spectrum[static_cast<std::size_t>(k)] = acc * std::exp(color[static_cast<std::size_t>(bin)] + m * decay[static_cast<std::size_t>(bin)]);
      }
      for (int i = 0; i < fft_length; ++i) {
        const long idx = start + i;
        if (idx >= length) break;
        std::complex<double> acc = 0.0;
        for (int k = 0; k < fft_length; ++k) {
          const double phase = 2.0 * kPi * k * i / fft_length;
          acc += spectrum[static_cast<std::size_t>(k)] * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        out[static_cast<std::size_t>(idx)] += acc.real() / fft_length;
        cover[static_cast<std::size_t>(idx)] += 0.5 - 0.5 * std::cos(2.0 * kPi * i / fft_length);
      }
    }
    for (long i = 0; i < length; ++i) {
      const double c = cover[static_cast<std::size_t>(i)];
      out[static_cast<std::size_t>(i)] = c > 1e-8 ? out[static_cast<std::size_t>(i)] / c : 0.0;
    }
    return out;
  };

  std::vector<double> mid = build(processors.reverb_noise_mid(), 0);
  std::vector<double> side = build(processors.reverb_noise_side(), 1);
  std::vector<double> left(mid.size()), right(mid.size());
  for (std::size_t i = 0; i < mid.size(); ++i) {
    left[i] = 0.5 * (mid[i] + side[i]);
    right[i] = 0.5 * (mid[i] - side[i]);
  }
  return {std::move(left), std::move(right)};
}

std::vector<double> direct_delay_kernel(const ProcessorSet& processors,
                                        std::span<const double> params, int channel) {
  const long span = processors.delay_span();
  const int window = processors.delay_window();
  std::vector<double> kernel(static_cast<std::size_t>(span), 0.0);
  for (int m = 0; m < kDelayTapsPerChannel; ++m) {
    const std::size_t base =
        static_cast<std::size_t>(channel * kDelayTapsPerChannel + m) * kDelayTapStride;
    std::span<const double> mags = params.subspan(base + 2, kDelayFirBins);
    if (std::ranges::max(mags) <= kDelayDisabledLogMag) continue;
    const std::complex<double> z{params[base], params[base + 1]};
    long d = std::lround(-std::arg(z) / (2.0 * kPi) * static_cast<double>(span));
    d %= span;
    if (d < 0) d += span;
    const long lo = static_cast<long>(m) * window;
    const long hi = std::min(static_cast<long>(m + 1) * window, span) - 1;
    d = std::clamp(d, lo, hi);
    std::vector<double> taps = direct_zero_phase_fir(mags, kDelayFirLength);
    const long half = (kDelayFirLength - 1) / 2;
    for (long j = -half; j <= half; ++j) {
      const long idx = d + j;
      if (idx < 0 || idx >= span) continue;
      kernel[static_cast<std::size_t>(idx)] += taps[static_cast<std::size_t>(half + j)];
    }
  }
  return kernel;
}

}  // namespace

std::vector<AudioBuffer> render_reference(const FlatGraph& fg, const ProcessorSet& processors,
                                          const ParamStore& params,
                                          const std::vector<AudioBuffer>& sources) {
  const int n = fg.num_nodes();
  if (static_cast<int>(sources.size()) != fg.num_inputs) {
    throw std::invalid_argument("render_reference: source count mismatch");
  }
  if (sources.empty()) throw std::invalid_argument("render_reference: graph has no inputs");
  const int batch = sources[0].batch;
  const long length = sources[0].length;
  const double sample_rate = sources[0].sample_rate;

  std::vector<std::vector<int>> incoming(static_cast<std::size_t>(n));
  std::vector<std::vector<int>> successors(static_cast<std::size_t>(n));
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  for (const Edge& e : fg.edges) {
    incoming[static_cast<std::size_t>(e.dst)].push_back(e.src);
    successors[static_cast<std::size_t>(e.src)].push_back(e.dst);
    indegree[static_cast<std::size_t>(e.dst)]++;
  }
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[static_cast<std::size_t>(v)] == 0) ready.push(v);
  }

  std::vector<int> occurrence(static_cast<std::size_t>(n), 0);
  std::map<NodeType, int> counters;
  for (int v = 0; v < n; ++v) occurrence[static_cast<std::size_t>(v)] = counters[fg.node_types[static_cast<std::size_t>(v)]]++;

  const ProcessorConfig& config = processors.config();
  std::vector<AudioBuffer> value(static_cast<std::size_t>(n));
  int input_index = 0;
  int processed = 0;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    ++processed;
    const NodeType type = fg.node_types[static_cast<std::size_t>(v)];

    AudioBuffer input(batch, 2, length, sample_rate);
    for (int src : incoming[static_cast<std::size_t>(v)]) {
      for (std::size_t i = 0; i < input.samples.size(); ++i) {
        input.samples[i] += value[static_cast<std::size_t>(src)].samples[i];
      }
    }

    std::span<const double> row;
    if (param_width(type) > 0) {
      row = params.table(type).row(occurrence[static_cast<std::size_t>(v)]);
      check_param_row(type, row);
    }

    AudioBuffer out(batch, 2, length, sample_rate);
    switch (type) {
      case NodeType::In:
        out = sources[static_cast<std::size_t>(input_index++)];
        break;
      case NodeType::Out:
      case NodeType::Mix:
        out = input;
        break;
      case NodeType::Gain:
        for (int b = 0; b < batch; ++b) {
          for (int c = 0; c < 2; ++c) {
            const double scale = std::exp(row[static_cast<std::size_t>(c)]);
            const double* u = input.channel(b, c);
            double* y = out.channel(b, c);
            for (long i = 0; i < length; ++i) y[i] = scale * u[i];
          }
        }
        break;
      case NodeType::Imager:
        for (int b = 0; b < batch; ++b) {
          const double scale = std::exp(row[0]);
          const double* ul = input.channel(b, 0);
          const double* ur = input.channel(b, 1);
          double* yl = out.channel(b, 0);
          double* yr = out.channel(b, 1);
          for (long i = 0; i < length; ++i) {
            const double mid = ul[i] + ur[i];
            const double side = scale * (ul[i] - ur[i]);
            yl[i] = 0.5 * (mid + side);
            yr[i] = 0.5 * (mid - side);
          }
        }
        break;
      case NodeType::Eq: {
        std::vector<double> taps = direct_zero_phase_fir(row, kEqFirLength);
        for (int b = 0; b < batch; ++b) {
          for (int c = 0; c < 2; ++c) {
            auto y = direct_convolve_zero_phase({input.channel(b, c), static_cast<std::size_t>(length)}, taps);
            std::copy(y.begin(), y.end(), out.channel(b, c));
          }
        }
        break;
      }
      case NodeType::Compressor:
      case NodeType::Noisegate: {
        const double alpha = row[0], threshold = row[1], knee = row[2], ratio = row[3];
        for (int b = 0; b < batch; ++b) {
          const double* ul = input.channel(b, 0);
          const double* ur = input.channel(b, 1);
          double* yl = out.channel(b, 0);
          double* yr = out.channel(b, 1);
          double state = 0.0;  // g_u[-1] = 0
          for (long i = 0; i < length; ++i) {
            const double mid = ul[i] + ur[i];
            state = alpha * state + (1.0 - alpha) * mid * mid;
            const double g_u = std::log(std::max(state, config.energy_floor));
            double g_y;
            if (type == NodeType::Compressor) {
              if (g_u >= threshold + knee) {
                g_y = threshold + (g_u - threshold) / ratio;
              } else if (g_u < threshold - knee) {
                g_y = g_u;
              } else {
                const double d = g_u - threshold + knee;
                g_y = g_u + (1.0 / ratio - 1.0) * d * d / (4.0 * knee);
              }
            } else {
              if (g_u >= threshold + knee) {
                g_y = g_u;
              } else if (g_u < threshold - knee) {
                g_y = threshold + ratio * (g_u - threshold);
              } else {
                const double d = g_u - threshold - knee;
                g_y = g_u + (1.0 - ratio) * d * d / (4.0 * knee);
              }
            }
            const double gain = std::exp(g_y - g_u);
            yl[i] = gain * ul[i];
            yr[i] = gain * ur[i];
          }
        }
        break;
      }
      case NodeType::Reverb: {
        auto [left, right] = direct_reverb_kernel(processors, row);
        for (int b = 0; b < batch; ++b) {
          for (int c = 0; c < 2; ++c) {
            auto y = direct_convolve_causal({input.channel(b, c), static_cast<std::size_t>(length)},
                                            c == 0 ? left : right);
            std::copy(y.begin(), y.end(), out.channel(b, c));
          }
        }
        break;
      }
      case NodeType::Delay: {
        for (int c = 0; c < 2; ++c) {
          std::vector<double> kernel = direct_delay_kernel(processors, row, c);
          for (int b = 0; b < batch; ++b) {
            auto y = direct_convolve_causal({input.channel(b, c), static_cast<std::size_t>(length)}, kernel);
            std::copy(y.begin(), y.end(), out.channel(b, c));
          }
        }
        break;
      }
    }
    value[static_cast<std::size_t>(v)] = std::move(out);

    for (int w : successors[static_cast<std::size_t>(v)]) {
      if (--indegree[static_cast<std::size_t>(w)] == 0) ready.push(w);
    }
  }
  if (processed != n) throw std::invalid_argument("render_reference: graph has a cycle");

  std::vector<AudioBuffer> outputs;
  for (int v = 0; v < n; ++v) {
    if (fg.node_types[static_cast<std::size_t>(v)] == NodeType::Out) {
      outputs.push_back(value[static_cast<std::size_t>(v)]);
    }
  }
  return outputs;
}

}  // namespace mixgraph
