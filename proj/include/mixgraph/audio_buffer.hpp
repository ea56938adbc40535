#pragma once

#include <vector>

namespace mixgraph {

// Stereo sample block with an optional source-batch axis, stored
// batch-major: samples[b][c][n].
struct AudioBuffer {
  int batch = 1;
  int channels = 2;
  long length = 0;
  double sample_rate = 44100.0;
  std::vector<double> samples;

  AudioBuffer() = default;
  AudioBuffer(int batch_, int channels_, long length_, double sample_rate_)
      : batch(batch_),
        channels(channels_),
        length(length_),
        sample_rate(sample_rate_),
        samples(static_cast<std::size_t>(batch_) * channels_ * length_, 0.0) {}

  double* channel(int b, int c) {
    return samples.data() + (static_cast<std::size_t>(b) * channels + c) * length;
  }
  const double* channel(int b, int c) const {
    return samples.data() + (static_cast<std::size_t>(b) * channels + c) * length;
  }
  double& at(int b, int c, long n) { return channel(b, c)[n]; }
  double at(int b, int c, long n) const { return channel(b, c)[n]; }
};

}  // namespace mixgraph
