#pragma once

#include <string>

#include "mixgraph/audio_buffer.hpp"

namespace mixgraph {

// 32-bit float PCM RIFF/WAVE, little-endian, stereo. Sample data round-trips
// bit-exactly at float precision. The buffer's batch axis must be 1.
void write_wav(const AudioBuffer& buffer, const std::string& path);
AudioBuffer read_wav(const std::string& path);

}  // namespace mixgraph
