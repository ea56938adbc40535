#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace mixgraph::dsp {

// In-place complex FFT (FFTW-backed, any size). The inverse includes the 1/N
// scale. Thread-safe; plans are cached per size.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

std::size_t next_pow2(std::size_t n);

enum class ConvMode {
  Causal,    // first L samples of the linear convolution
  ZeroPhase  // center-aligned: odd kernel, (Lh-1)/2 samples dropped from the head
};

// Exact linear convolution via a zero-padded power-of-two FFT, trimmed to the
// input length.
std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h,
                                 ConvMode mode);

std::vector<double> hann_symmetric(int n);  // peak 1 at the center
std::vector<double> hann_periodic(int n);   // COLA at hop = n/2

// Even-symmetric FIR around index 0, stored as taps[0..N-1] with the center
// at (N-1)/2.
struct ZeroPhaseFir {
  std::vector<double> taps;
  int half() const { return (static_cast<int>(taps.size()) - 1) / 2; }
};

// Frequency-sampling design: mirror the one-sided log magnitudes to a full
// spectrum, inverse-DFT, center circularly, then apply a symmetric Hann
// window. fir_length must be odd; log_mags has (fir_length+1)/2 entries.
ZeroPhaseFir zero_phase_fir(std::span<const double> log_mags, int fir_length);

// One-sided short-time spectra, frame-major.
struct Spectrogram {
  int fft_length = 0;
  int hop = 0;
  int num_bins = 0;
  int num_frames = 0;
  std::vector<std::complex<double>> bins;  // [frame * num_bins + bin]

  std::complex<double>& at(int frame, int bin) { return bins[static_cast<std::size_t>(frame) * num_bins + bin]; }
  std::complex<double> at(int frame, int bin) const { return bins[static_cast<std::size_t>(frame) * num_bins + bin]; }
};

// Hann analysis window, frames every `hop` samples starting at 0, zero-padded
// tail frames.
Spectrogram stft(std::span<const double> x, int fft_length = 384, int hop = 192);

// Overlap-add with a rectangular synthesis window, normalized by the summed
// analysis window where it deviates from one (head/tail frames).
std::vector<double> istft(const Spectrogram& spec, long length);

// Real part of the inverse DFT of the geometric sequence z^k: a damped
// sinusoid that approximates a unit impulse at delay -angle(z) * N / (2 pi).
// Requires |z| <= 1 (+1e-9 slack).
std::vector<double> surrogate_delay(std::complex<double> z, int n);

// d(surrogate)/dz, one complex derivative per output sample: for output y[i],
// dy/d(Re z) = Re(g[i]) and dy/d(Im z) = -Im(g[i]).
std::vector<std::complex<double>> surrogate_delay_grad(std::complex<double> z, int n);

// Deterministic uniform noise in [-1, 1), identical across platforms.
std::vector<double> uniform_noise(long n, std::uint32_t seed);

}  // namespace mixgraph::dsp
