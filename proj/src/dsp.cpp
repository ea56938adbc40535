#include "mixgraph/dsp.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <stdexcept>

namespace mixgraph::dsp {

namespace {

// FFTW plan creation is not thread-safe; execution is. Plans are created
// unaligned so they can run on any caller buffer.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n, bool inverse) {
    std::scoped_lock lock(mutex_);
    auto key = std::make_pair(n, inverse);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
    auto* data = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_1d(n, data, data, inverse ? FFTW_BACKWARD : FFTW_FORWARD,
                                      FFTW_ESTIMATE | FFTW_UNALIGNED);
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, bool>, fftw_plan> plans_;
};

}  // namespace

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  if (a.empty()) return;
  const int n = static_cast<int>(a.size());
  fftw_plan plan = PlanCache::instance().get(n, inverse);
  auto* data = reinterpret_cast<fftw_complex*>(a.data());
  fftw_execute_dft(plan, data, data);
  if (inverse) {
    const double scale = 1.0 / n;
    for (auto& v : a) v *= scale;
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h,
                                 ConvMode mode) {
  const long length = static_cast<long>(x.size());
  const long taps = static_cast<long>(h.size());
  if (length < 1 || taps < 1) throw std::invalid_argument("fft_convolve: empty operand");
  if (mode == ConvMode::ZeroPhase && taps % 2 == 0) {
    throw std::invalid_argument("fft_convolve: zero-phase kernels must have odd length");
  }
  const std::size_t full = static_cast<std::size_t>(length + taps - 1);
  const std::size_t n = next_pow2(full);
  std::vector<std::complex<double>> a(n), b(n);
  for (long i = 0; i < length; ++i) a[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i)];
  for (long i = 0; i < taps; ++i) b[static_cast<std::size_t>(i)] = h[static_cast<std::size_t>(i)];
  fft_inplace(a, false);
  fft_inplace(b, false);
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
  fft_inplace(a, true);

  const long offset = mode == ConvMode::Causal ? 0 : (taps - 1) / 2;
  std::vector<double> y(static_cast<std::size_t>(length));
  for (long i = 0; i < length; ++i) y[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i + offset)].real();
  return y;
}

std::vector<double> hann_symmetric(int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (n < 2) return w;
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / (n - 1));
  }
  return w;
}

std::vector<double> hann_periodic(int n) {
  std::vector<double> w(static_cast<std::size_t>(n), 1.0);
  if (n < 2) return w;
  for (int i = 0; i < n; ++i) {
    w[static_cast<std::size_t>(i)] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  }
  return w;
}

ZeroPhaseFir zero_phase_fir(std::span<const double> log_mags, int fir_length) {
  if (fir_length < 1 || fir_length % 2 == 0) {
    throw std::invalid_argument("zero_phase_fir: length must be odd and positive");
  }
  const int bins = (fir_length + 1) / 2;
  if (static_cast<int>(log_mags.size()) != bins) {
    throw std::invalid_argument("zero_phase_fir: expected " + std::to_string(bins) +
                                " log magnitudes, got " + std::to_string(log_mags.size()));
  }
  // Even mirror of the one-sided magnitudes, then an inverse DFT. A real even
  // spectrum gives a real even impulse response.
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(fir_length));
  for (int k = 0; k < fir_length; ++k) {
    int bin = std::min(k, fir_length - k);
    spec[static_cast<std::size_t>(k)] = std::exp(log_mags[static_cast<std::size_t>(bin)]);
  }
  fft_inplace(spec, true);

  ZeroPhaseFir fir;
  fir.taps.assign(static_cast<std::size_t>(fir_length), 0.0);
  const int center = (fir_length - 1) / 2;
  for (int j = 0; j < fir_length; ++j) {
    // Circular shift: sample j of the IDFT corresponds to tap index j for
    // j <= center and j - fir_length for the tail.
    int tap = j <= center ? center + j : j - center - 1;
    fir.taps[static_cast<std::size_t>(tap)] = spec[static_cast<std::size_t>(j)].real();
  }
  std::vector<double> window = hann_symmetric(fir_length);
  for (int i = 0; i < fir_length; ++i) fir.taps[static_cast<std::size_t>(i)] *= window[static_cast<std::size_t>(i)];
  return fir;
}

Spectrogram stft(std::span<const double> x, int fft_length, int hop) {
  if (fft_length < 1 || hop < 1 || hop > fft_length) {
    throw std::invalid_argument("stft: need 1 <= hop <= fft_length");
  }
  const long length = static_cast<long>(x.size());
  Spectrogram spec;
  spec.fft_length = fft_length;
  spec.hop = hop;
  spec.num_bins = fft_length / 2 + 1;
  spec.num_frames = static_cast<int>((length + hop - 1) / hop);
  spec.bins.assign(static_cast<std::size_t>(spec.num_frames) * spec.num_bins, {});

  std::vector<double> window = hann_periodic(fft_length);
  std::vector<std::complex<double>> frame(static_cast<std::size_t>(fft_length));
  for (int m = 0; m < spec.num_frames; ++m) {
    const long start = static_cast<long>(m) * hop;
    for (int i = 0; i < fft_length; ++i) {
      const long idx = start + i;
      double v = idx < length ? x[static_cast<std::size_t>(idx)] : 0.0;
      frame[static_cast<std::size_t>(i)] = v * window[static_cast<std::size_t>(i)];
    }
    fft_inplace(frame, false);
    for (int k = 0; k < spec.num_bins; ++k) spec.at(m, k) = frame[static_cast<std::size_t>(k)];
  }
  return spec;
}

std::vector<double> istft(const Spectrogram& spec, long length) {
  std::vector<double> out(static_cast<std::size_t>(length), 0.0);
  std::vector<double> cover(static_cast<std::size_t>(length), 0.0);
  if (spec.num_frames == 0 || length == 0) return out;

  const int n = spec.fft_length;
  std::vector<double> window = hann_periodic(n);
  std::vector<std::complex<double>> frame(static_cast<std::size_t>(n));
  for (int m = 0; m < spec.num_frames; ++m) {
    for (int k = 0; k < spec.num_bins; ++k) frame[static_cast<std::size_t>(k)] = spec.at(m, k);
    for (int k = spec.num_bins; k < n; ++k) frame[static_cast<std::size_t>(k)] = std::conj(spec.at(m, n - k));
    fft_inplace(frame, true);
    const long start = static_cast<long>(m) * spec.hop;
    for (int i = 0; i < n; ++i) {
      const long idx = start + i;
      if (idx < 0 || idx >= length) continue;
      out[static_cast<std::size_t>(idx)] += frame[static_cast<std::size_t>(i)].real();
      cover[static_cast<std::size_t>(idx)] += window[static_cast<std::size_t>(i)];
    }
  }
  for (long i = 0; i < length; ++i) {
    double c = cover[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] = c > 1e-8 ? out[static_cast<std::size_t>(i)] / c : 0.0;
  }
  return out;
}

std::vector<double> surrogate_delay(std::complex<double> z, int n) {
  if (n < 1) throw std::invalid_argument("surrogate_delay: length must be positive");
  if (std::abs(z) > 1.0 + 1e-9) {
    throw std::invalid_argument("surrogate_delay: angular frequency outside the unit disk");
  }
  std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(n));
  std::complex<double> p = 1.0;
  for (int k = 0; k < n; ++k) {
    coeffs[static_cast<std::size_t>(k)] = p;
    p *= z;
  }
  fft_inplace(coeffs, true);
  std::vector<double> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = coeffs[static_cast<std::size_t>(i)].real();
  return y;
}

std::vector<std::complex<double>> surrogate_delay_grad(std::complex<double> z, int n) {
  if (n < 1) throw std::invalid_argument("surrogate_delay_grad: length must be positive");
  std::vector<std::complex<double>> coeffs(static_cast<std::size_t>(n));
  std::complex<double> p = 1.0;  // z^(k-1)
  coeffs[0] = 0.0;
  for (int k = 1; k < n; ++k) {
    coeffs[static_cast<std::size_t>(k)] = static_cast<double>(k) * p;
    p *= z;
  }
  fft_inplace(coeffs, true);
  return coeffs;
}

std::vector<double> uniform_noise(long n, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  constexpr double scale = 1.0 / 4294967296.0;  // 2^-32
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = 2.0 * (static_cast<double>(gen()) * scale) - 1.0;
  }
  return out;
}

}  // namespace mixgraph::dsp
